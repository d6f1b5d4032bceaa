#pragma once

// Input distributions over {0, ..., 2^n - 1}, the advice codec that stores a
// bit string in outcome probabilities, and total-variation utilities.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pacshift/bits.hpp"
#include "pacshift/concepts.hpp"
#include "pacshift/core.hpp"

namespace pacshift {

class DecodeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Largest width for which explicit tables and exact enumeration are allowed:
// 20 input bits plus one label bit for pair laws.
inline constexpr int kMaxEnumerableBits = 21;

// Tolerance on the total mass of explicit tables.
inline constexpr double kMassTolerance = 0x1.0p-40;

enum class DistKind { uniform_hypercube, uniform_range, advice, point_mass, table };

inline std::string to_string(DistKind kind) {
  switch (kind) {
    case DistKind::uniform_hypercube: return "uniform_hypercube";
    case DistKind::uniform_range: return "uniform_range";
    case DistKind::advice: return "advice";
    case DistKind::point_mass: return "point_mass";
    case DistKind::table: return "table";
  }
  return "unknown";
}

struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  // Cross-multiplied comparison, no normalization needed.
  friend bool operator==(const Rational& a, const Rational& b) {
    return static_cast<unsigned __int128>(a.num) * b.den == static_cast<unsigned __int128>(b.num) * a.den;
  }
};

namespace detail {

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace detail

class Distribution {
 public:
  static Distribution uniform_hypercube(int n) {
    require(n >= 1 && n <= kMaxInputBits, "uniform hypercube: n must be in [1, 30]");
    return Distribution(DistKind::uniform_hypercube, n);
  }

  // Uniform over the integers {1, ..., n} inside {0,1}^n.
  static Distribution uniform_range(int n) {
    require(n >= 1 && n <= kMaxInputBits, "uniform range: n must be in [1, 30]");
    return Distribution(DistKind::uniform_range, n);
  }

  static Distribution point_mass(int n, std::uint64_t x) {
    require(n >= 1 && n <= kMaxInputBits, "point mass: n must be in [1, 30]");
    require(x <= low_mask(n), "point mass: point does not fit in n bits");
    Distribution d(DistKind::point_mass, n);
    d.point_ = x;
    return d;
  }

  // Explicit probability table over {0, ..., 2^n - 1}, n <= 21.
  static Distribution table(int n, std::vector<double> probs) {
    require(n >= 1, "table: n must be positive");
    if (n > kMaxEnumerableBits) throw Unsupported("table distributions require n <= 21");
    require(probs.size() == (std::size_t{1} << n), "table: size must be 2^n");
    detail::CompensatedSum total;
    for (double p : probs) {
      require(std::isfinite(p) && p >= 0.0, "table: probabilities must be finite and non-negative");
      total.add(p);
    }
    require(std::abs(total.value() - 1.0) <= kMassTolerance, "table: probabilities must sum to 1");
    Distribution d(DistKind::table, n);
    d.cdf_.resize(probs.size());
    detail::CompensatedSum running;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      running.add(probs[i]);
      d.cdf_[i] = running.value();
    }
    d.probs_ = std::move(probs);
    return d;
  }

  // Uniform over an explicit support (duplicates ignored).
  static Distribution uniform_over(int n, std::vector<std::uint64_t> support) {
    require(!support.empty(), "uniform_over: empty support");
    if (n > kMaxEnumerableBits) throw Unsupported("uniform_over requires n <= 21");
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    require(support.back() <= low_mask(n), "uniform_over: point does not fit in n bits");
    std::vector<double> probs(std::size_t{1} << n, 0.0);
    for (auto x : support) probs[x] = 1.0 / static_cast<double>(support.size());
    return table(n, std::move(probs));
  }

  friend Distribution advice_encode(const Bits& payload, int n);

  int n() const { return n_; }
  DistKind kind() const { return kind_; }

  double pmf(std::uint64_t x) const {
    if (x > low_mask(n_)) return 0.0;
    if (kind_ == DistKind::table) return probs_[x];
    return exact_pmf(x)->value();
  }

  // Exact probability for every kind except explicit tables.
  std::optional<Rational> exact_pmf(std::uint64_t x) const {
    const bool in_range = x <= low_mask(n_);
    switch (kind_) {
      case DistKind::uniform_hypercube:
        return in_range ? Rational{1, std::uint64_t{1} << n_} : Rational{0, 1};
      case DistKind::uniform_range:
        return (x >= 1 && x <= static_cast<std::uint64_t>(n_)) ? Rational{1, static_cast<std::uint64_t>(n_)}
                                                               : Rational{0, 1};
      case DistKind::point_mass:
        return Rational{x == point_ ? 1U : 0U, 1};
      case DistKind::advice:
        return x < advice_bits_.size() ? Rational{1U + advice_bits_[x], advice_denominator_} : Rational{0, 1};
      case DistKind::table:
        return std::nullopt;
    }
    return std::nullopt;
  }

  template <class Engine>
  std::uint64_t sample(Engine& engine) const {
    switch (kind_) {
      case DistKind::uniform_hypercube:
        return engine() & low_mask(n_);
      case DistKind::uniform_range:
        return 1 + uniform_below(engine, static_cast<std::uint64_t>(n_));
      case DistKind::point_mass:
        return point_;
      case DistKind::advice: {
        // Inverse CDF over integer weights: exact.
        const std::uint64_t r = uniform_below(engine, advice_denominator_);
        return static_cast<std::uint64_t>(std::upper_bound(advice_cumulative_.begin(), advice_cumulative_.end(), r) -
                                          advice_cumulative_.begin());
      }
      case DistKind::table: {
        const double u = uniform_unit(engine) * cdf_.back();
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        if (it == cdf_.end()) --it;
        auto idx = static_cast<std::size_t>(it - cdf_.begin());
        while (probs_[idx] == 0.0 && idx > 0) --idx;  // never land on a zero-mass point
        return idx;
      }
    }
    return 0;
  }

  std::vector<std::uint64_t> sample_values(std::size_t count, const Seed& seed) const {
    auto engine = seed.engine();
    std::vector<std::uint64_t> out(count);
    for (auto& v : out) v = sample(engine);
    return out;
  }

  std::vector<Input> sample_inputs(std::size_t count, const Seed& seed) const {
    std::vector<Input> out;
    out.reserve(count);
    for (auto v : sample_values(count, seed)) out.emplace_back(n_, v);
    return out;
  }

  // Encoded bits (pilots included) and p0's denominator L + k.
  const Bits& advice_bits() const { return advice_bits_; }
  std::uint64_t advice_denominator() const { return advice_denominator_; }

  std::string describe() const {
    switch (kind_) {
      case DistKind::uniform_hypercube: return "uniform_hypercube(" + std::to_string(n_) + ")";
      case DistKind::uniform_range: return "uniform_range(1.." + std::to_string(n_) + ")";
      case DistKind::point_mass: return "point_mass(" + std::to_string(point_) + ")";
      case DistKind::advice: return "advice(" + std::to_string(advice_bits_.size() - 2) + " bits)";
      case DistKind::table: return "table(" + std::to_string(n_) + ")";
    }
    return "unknown";
  }

 private:
  Distribution(DistKind kind, int n) : kind_(kind), n_(n) {}

  DistKind kind_;
  int n_;
  std::uint64_t point_ = 0;
  std::vector<double> probs_;
  std::vector<double> cdf_;
  Bits advice_bits_;
  std::vector<std::uint64_t> advice_cumulative_;
  std::uint64_t advice_denominator_ = 1;
};

inline constexpr std::size_t kAdvicePilotBits = 2;

/// Encodes b = [0, 1, payload...] with outcome i carrying probability p0 if
/// b_i = 0 and 2 p0 if b_i = 1, p0 = 1 / (L + k) for L encoded bits of which
/// k are ones. Outcomes >= L have probability zero.
inline Distribution advice_encode(const Bits& payload, int n) {
  require(n >= 1 && n <= kMaxInputBits, "advice: n must be in [1, 30]");
  require(!payload.empty(), "advice: payload must be non-empty");
  require(payload.size() + kAdvicePilotBits <= (std::uint64_t{1} << n), "advice: payload too long for 2^n outcomes");
  Distribution d(DistKind::advice, n);
  d.advice_bits_ = {0, 1};
  for (auto b : payload) {
    require(b <= 1, "advice: payload entries must be bits");
    d.advice_bits_.push_back(b);
  }
  std::uint64_t total = 0;
  d.advice_cumulative_.reserve(d.advice_bits_.size());
  for (auto b : d.advice_bits_) {
    total += 1U + b;
    d.advice_cumulative_.push_back(total);
  }
  d.advice_denominator_ = total;
  return d;
}

/// Frequency decoder: the pilot outcomes 0 and 1 calibrate the two levels,
/// and payload bit i is 1 iff count(i + 2) exceeds their midpoint.
inline Bits advice_decode(std::span<const Input> samples, std::size_t payload_length) {
  require(!samples.empty(), "advice decode: no samples");
  require(payload_length >= 1, "advice decode: payload length must be positive");
  const int n = samples.front().n;
  require(payload_length + kAdvicePilotBits <= (std::uint64_t{1} << n), "advice decode: payload too long for n");
  std::vector<std::uint64_t> counts(payload_length + kAdvicePilotBits, 0);
  for (const auto& x : samples) {
    require(x.n == n, "advice decode: samples have mixed widths");
    if (x.value < counts.size()) ++counts[x.value];
  }
  if (counts[0] == 0 || counts[1] == 0) throw DecodeFailure("advice decode: pilot outcome unobserved");
  const std::uint64_t pilot_sum = counts[0] + counts[1];
  Bits out(payload_length);
  for (std::size_t i = 0; i < payload_length; ++i) {
    out[i] = 2 * counts[i + kAdvicePilotBits] > pilot_sum ? 1 : 0;
  }
  return out;
}

/// (1/2) sum_x |p1(x) - p2(x)| by exact enumeration.
inline double tv_distance(const Distribution& d1, const Distribution& d2) {
  require(d1.n() == d2.n(), "tv distance: width mismatch");
  if (d1.n() > kMaxEnumerableBits) throw Unsupported("tv distance requires n <= 21");
  detail::CompensatedSum sum;
  const std::uint64_t size = std::uint64_t{1} << d1.n();
  for (std::uint64_t x = 0; x < size; ++x) sum.add(std::abs(d1.pmf(x) - d2.pmf(x)));
  return std::clamp(0.5 * sum.value(), 0.0, 1.0);
}

/// Fewest samples that can separate two laws at distance tv with average
/// error eps under equal priors: ceil((2 - 4 eps) / tv).
inline std::uint64_t min_samples_to_distinguish(double tv, double eps) {
  require(tv > 0.0 && tv <= 1.0, "min samples: tv must be in (0, 1]");
  require(eps >= 0.0 && eps < 0.5, "min samples: eps must be in [0, 1/2)");
  const double ratio = (2.0 - 4.0 * eps) / tv;
  const double nearest = std::round(ratio);
  // Ratios that are integers up to rounding noise are not bumped by ceil.
  if (std::abs(ratio - nearest) <= 1e-9 * ratio) return static_cast<std::uint64_t>(nearest);
  return static_cast<std::uint64_t>(std::ceil(ratio));
}

/// Law of (X, c(X)) as a table over n + 1 bits: pair (x, y) is stored at
/// index x + y * 2^n.
inline Distribution induced_example_law(const Concept& target, const Distribution& dist) {
  require(target.n() == dist.n(), "induced law: width mismatch");
  if (dist.n() > kMaxEnumerableBits - 1) throw Unsupported("induced law requires n <= 20");
  const int n = dist.n();
  const std::size_t size = std::size_t{1} << n;
  const auto labels = target.truth_table();
  std::vector<double> probs(2 * size, 0.0);
  for (std::size_t x = 0; x < size; ++x) probs[x + (labels[x] ? size : 0)] = dist.pmf(x);
  return Distribution::table(n + 1, std::move(probs));
}

}  // namespace pacshift
