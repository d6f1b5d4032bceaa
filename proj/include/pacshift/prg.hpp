#pragma once

// Length-doubling generators G: {0,1}^s -> {0,1}^{2s} for s <= 30.
//
// The 2s output bits form a little-endian bit stream; the left half G_0 is
// bits [0, s) and the right half G_1 is bits [s, 2s).
//
//   hash: the stream is SHA-256("pacshift/ggm-prg" || s || state), with s as
//         one byte and the state as 4 little-endian bytes.
//   test: the stream is mix64(state * 2^8 + s) (splitmix64 finalizer). Fast,
//         reproducible, and NOT a secure generator.

#include <openssl/sha.h>

#include <array>
#include <cstdint>
#include <cstring>
#include <string>
#include <utility>

#include "pacshift/core.hpp"

namespace pacshift {

enum class PrgKind { hash, test };

struct PrgSpec {
  PrgKind kind = PrgKind::hash;
  int seed_bits = 16;

  PrgSpec() = default;
  PrgSpec(PrgKind k, int bits) : kind(k), seed_bits(bits) {
    require(bits >= 1 && bits <= kMaxInputBits, "PRG seed length must be in [1, 30]");
  }

  int output_bits() const { return 2 * seed_bits; }
  bool insecure() const { return kind == PrgKind::test; }
  std::string name() const { return kind == PrgKind::hash ? "hash" : "test"; }

  friend bool operator==(const PrgSpec&, const PrgSpec&) = default;
};

inline PrgKind parse_prg_kind(const std::string& name) {
  if (name == "hash") return PrgKind::hash;
  if (name == "test") return PrgKind::test;
  throw InvalidArgument("unknown PRG kind '" + name + "' (expected hash or test)");
}

namespace detail {

inline std::uint64_t sha256_stream(int seed_bits, std::uint64_t state) {
  static constexpr char kTag[] = "pacshift/ggm-prg";
  std::array<unsigned char, sizeof(kTag) - 1 + 1 + 4> message{};
  std::memcpy(message.data(), kTag, sizeof(kTag) - 1);
  std::size_t at = sizeof(kTag) - 1;
  message[at++] = static_cast<unsigned char>(seed_bits);
  for (int i = 0; i < 4; ++i) message[at++] = static_cast<unsigned char>(state >> (8 * i));

  std::array<unsigned char, SHA256_DIGEST_LENGTH> digest{};
  // The one-shot EVP path costs ~5x more per call on short messages.
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wdeprecated-declarations"
  SHA256_CTX ctx;
  SHA256_Init(&ctx);
  SHA256_Update(&ctx, message.data(), message.size());
  SHA256_Final(digest.data(), &ctx);
#pragma GCC diagnostic pop

  std::uint64_t word = 0;
  for (int i = 7; i >= 0; --i) word = (word << 8) | digest[static_cast<std::size_t>(i)];
  return word;
}

}  // namespace detail

/// Returns (G_0(state), G_1(state)).
inline std::pair<std::uint64_t, std::uint64_t> prg_expand(const PrgSpec& prg, std::uint64_t state) {
  const int s = prg.seed_bits;
  const std::uint64_t stream =
      prg.kind == PrgKind::hash ? detail::sha256_stream(s, state) : mix64((state << 8) | static_cast<std::uint64_t>(s));
  const std::uint64_t mask = low_mask(s);
  return {stream & mask, (stream >> s) & mask};
}

}  // namespace pacshift
