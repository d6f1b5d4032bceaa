#pragma once

// Bit strings and their text forms. A hex string denotes the binary
// expansion of its digits, most significant bit of each digit first; an
// explicit bit length keeps only the leading bits.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pacshift/core.hpp"

namespace pacshift {

using Bits = std::vector<std::uint8_t>;

inline Bits bits_from_string(std::string_view text) {
  Bits out;
  out.reserve(text.size());
  for (char c : text) {
    require(c == '0' || c == '1', "bit string may only contain '0' and '1'");
    out.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return out;
}

inline std::string bits_to_string(const Bits& bits) {
  std::string out;
  out.reserve(bits.size());
  for (auto b : bits) out.push_back(b ? '1' : '0');
  return out;
}

inline Bits bits_from_hex(std::string_view hex, std::size_t bit_length) {
  if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
  require(bit_length <= 4 * hex.size(), "bit length exceeds the hex string");
  Bits out;
  out.reserve(bit_length);
  for (char c : hex) {
    int digit = 0;
    if (c >= '0' && c <= '9') {
      digit = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      digit = c - 'a' + 10;
    } else if (c >= 'A' && c <= 'F') {
      digit = c - 'A' + 10;
    } else {
      throw InvalidArgument("invalid hex digit");
    }
    for (int shift = 3; shift >= 0 && out.size() < bit_length; --shift) {
      out.push_back(static_cast<std::uint8_t>((digit >> shift) & 1));
    }
  }
  return out;
}

inline std::string bits_to_hex(const Bits& bits) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (std::size_t i = 0; i < bits.size(); i += 4) {
    int digit = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      digit <<= 1;
      if (i + j < bits.size() && bits[i + j]) digit |= 1;
    }
    out.push_back(kDigits[digit]);
  }
  return out;
}

// Bit u (0-based) of the result is bits[u].
inline std::uint64_t bits_to_word(const Bits& bits) {
  require(bits.size() <= 64, "bit string longer than 64 bits");
  std::uint64_t word = 0;
  for (std::size_t u = 0; u < bits.size(); ++u) {
    if (bits[u]) word |= std::uint64_t{1} << u;
  }
  return word;
}

inline Bits word_to_bits(std::uint64_t word, int length) {
  Bits out(static_cast<std::size_t>(length));
  for (int u = 0; u < length; ++u) out[static_cast<std::size_t>(u)] = static_cast<std::uint8_t>((word >> u) & 1U);
  return out;
}

}  // namespace pacshift
