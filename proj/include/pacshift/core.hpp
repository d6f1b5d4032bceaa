#pragma once

// Shared domain types: inputs, labeled examples, training sets, precision,
// splittable seeds and risk estimates.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pacshift {

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Requested size is outside the exact-enumeration range of an operation.
class Unsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMaxInputBits = 30;

// Two-sided 99% normal quantile.
inline constexpr double kZ99 = 2.5758293035489004;

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

inline constexpr std::uint64_t low_mask(int bits) {
  return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

// splitmix64 finalizer.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// A point of the Boolean hypercube {0,1}^n. Coordinate u (1-based) is bit
/// u-1 of `value`.
struct Input {
  int n = 1;
  std::uint64_t value = 0;

  Input() = default;
  Input(int bits, std::uint64_t v) : n(bits), value(v) {
    require(bits >= 1 && bits <= 63, "input width must be in [1, 63]");
    require(v <= low_mask(bits), "input value does not fit in n bits");
  }

  bool coordinate(int u) const { return ((value >> (u - 1)) & 1U) != 0; }

  friend bool operator==(const Input&, const Input&) = default;
};

struct LabeledExample {
  Input x;
  bool y = false;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

/// Ordered multiset of labeled examples sharing one input width.
class TrainingSet {
 public:
  explicit TrainingSet(int n) : n_(n) { require(n >= 1, "training set width must be positive"); }

  void add(LabeledExample example) {
    require(example.x.n == n_, "example width differs from training set width");
    examples_.push_back(example);
  }
  void reserve(std::size_t count) { examples_.reserve(count); }

  int n() const { return n_; }
  std::size_t size() const { return examples_.size(); }
  bool empty() const { return examples_.empty(); }
  const LabeledExample& operator[](std::size_t i) const { return examples_[i]; }
  auto begin() const { return examples_.begin(); }
  auto end() const { return examples_.end(); }
  const std::vector<LabeledExample>& examples() const { return examples_; }

  std::vector<Input> inputs() const {
    std::vector<Input> xs;
    xs.reserve(examples_.size());
    for (const auto& e : examples_) xs.push_back(e.x);
    return xs;
  }

  TrainingSet slice(std::size_t first, std::size_t count) const {
    require(first <= examples_.size() && count <= examples_.size() - first, "training set slice out of range");
    TrainingSet out(n_);
    out.examples_.assign(examples_.begin() + static_cast<std::ptrdiff_t>(first),
                         examples_.begin() + static_cast<std::ptrdiff_t>(first + count));
    return out;
  }

  friend bool operator==(const TrainingSet&, const TrainingSet&) = default;

 private:
  int n_;
  std::vector<LabeledExample> examples_;
};

/// Target accuracy parameter m; the success threshold is 1 - 1/m.
class Precision {
 public:
  explicit Precision(std::uint64_t m) : m_(m) { require(m >= 1, "precision m must be >= 1"); }
  std::uint64_t m() const { return m_; }
  double threshold() const { return 1.0 - 1.0 / static_cast<double>(m_); }

 private:
  std::uint64_t m_;
};

/// Splittable seed: a master value plus a derivation path. The stream key is
/// folded incrementally along the path, with the depth mixed into each step
/// so that prefixes and permutations of a path land on different keys.
class Seed {
 public:
  explicit Seed(std::uint64_t master = 0) : master_(master), key_(mix64(master ^ 0x6A09E667F3BCC908ULL)) {}

  Seed derive(std::uint64_t index) const {
    Seed child = *this;
    child.path_.push_back(index);
    const auto depth = static_cast<std::uint64_t>(child.path_.size());
    child.key_ = mix64(key_ ^ mix64(index + 0xBB67AE8584CAA73BULL * depth));
    return child;
  }

  Seed derive(std::initializer_list<std::uint64_t> indices) const {
    Seed s = *this;
    for (auto i : indices) s = s.derive(i);
    return s;
  }

  std::uint64_t master() const { return master_; }
  const std::vector<std::uint64_t>& path() const { return path_; }
  std::uint64_t key() const { return key_; }
  std::mt19937_64 engine() const { return std::mt19937_64(key_); }

  friend bool operator==(const Seed& a, const Seed& b) { return a.master_ == b.master_ && a.path_ == b.path_; }

 private:
  std::uint64_t master_;
  std::vector<std::uint64_t> path_;
  std::uint64_t key_;
};

// Bit-exact sampling helpers (std distributions are implementation-defined).
template <class Engine>
std::uint64_t uniform_below(Engine& engine, std::uint64_t bound) {
  if (bound == 0) throw InvalidArgument("uniform_below: empty range");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    const std::uint64_t r = engine();
    if (r < limit) return r % bound;
  }
}

template <class Engine>
double uniform_unit(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

template <class Engine>
bool fair_coin(Engine& engine) {
  return (engine() >> 63) != 0;
}

template <class Engine>
bool bernoulli(Engine& engine, double p) {
  return uniform_unit(engine) < p;
}

/// Empirical accuracy (1 - risk under the 0/1 loss) with a 99% normal
/// approximation half-width.
struct RiskEstimate {
  double accuracy = 0.0;
  double half_width = 0.0;
  std::uint64_t trials = 0;

  double risk() const { return 1.0 - accuracy; }

  // half_width = z * sqrt(acc (1 - acc) / trials).
  static RiskEstimate from_counts(std::uint64_t correct, std::uint64_t trials) {
    require(trials > 0, "risk estimate needs at least one trial");
    const double acc = static_cast<double>(correct) / static_cast<double>(trials);
    return {acc, kZ99 * std::sqrt(acc * (1.0 - acc) / static_cast<double>(trials)), trials};
  }

  // Per-trial scores c_t in [0, per_trial]: accuracy = sum c / (T * per_trial),
  // half-width from the population variance of per-trial accuracies. Reduces
  // to from_counts when per_trial == 1.
  static RiskEstimate from_scores(std::uint64_t sum, std::uint64_t sum_sq, std::uint64_t trials,
                                  std::uint64_t per_trial) {
    require(trials > 0 && per_trial > 0, "risk estimate needs trials and test points");
    if (per_trial == 1) return from_counts(sum, trials);
    const double t = static_cast<double>(trials);
    const double k = static_cast<double>(per_trial);
    const double mean = static_cast<double>(sum) / (t * k);
    const double second = static_cast<double>(sum_sq) / (t * k * k);
    const double var = std::max(0.0, second - mean * mean);
    return {mean, kZ99 * std::sqrt(var / t), trials};
  }
};

/// Mean of a real-valued per-trial statistic with a 99% half-width.
struct MeanEstimate {
  double mean = 0.0;
  double half_width = 0.0;
  std::uint64_t trials = 0;

  // Sample variance (n - 1 denominator).
  static MeanEstimate from_sums(double sum, double sum_sq, std::uint64_t trials) {
    require(trials > 0, "mean estimate needs at least one trial");
    const double t = static_cast<double>(trials);
    const double mean = sum / t;
    double var = 0.0;
    if (trials > 1) var = std::max(0.0, (sum_sq - t * mean * mean) / (t - 1.0));
    return {mean, kZ99 * std::sqrt(var / t), trials};
  }
};

}  // namespace pacshift
