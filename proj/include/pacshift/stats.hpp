#pragma once

// Analytic bounds and stochastic-process checks: distinct counts, Bernoulli
// walk hitting times, the uniform-sample budget that dominates distinct
// counts, the expectation-transfer inequality, entropy and ball-size bounds,
// the Bayes reconstruction error bound and the distinguishing experiment.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "pacshift/concepts.hpp"
#include "pacshift/core.hpp"
#include "pacshift/distributions.hpp"
#include "pacshift/learners.hpp"
#include "pacshift/parallel.hpp"

namespace pacshift {

using BigInt = boost::multiprecision::cpp_int;

inline std::uint64_t distinct_count(std::span<const std::uint64_t> xs) {
  std::vector<std::uint64_t> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  return static_cast<std::uint64_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

inline std::uint64_t distinct_count(std::span<const Input> xs) {
  std::vector<std::uint64_t> values;
  values.reserve(xs.size());
  for (const auto& x : xs) values.push_back(x.value);
  return distinct_count(std::span<const std::uint64_t>(values));
}

// ---------------------------------------------------------------------------
// Hitting times of W_{i+1} = W_i + Bern(p)

struct WalkSpec {
  double p = 1.0;
  std::uint64_t k = 1;

  WalkSpec(double success, std::uint64_t target) : p(success), k(target) {
    require(p > 0.0 && p <= 1.0, "walk: p must be in (0, 1]");
    require(k >= 1, "walk: target level must be positive");
  }
};

inline double hitting_time_mean(const WalkSpec& spec) { return static_cast<double>(spec.k) / spec.p; }

/// Monte-Carlo mean of the first step i with W_i = k, starting at W_0 = 0.
inline MeanEstimate simulate_hitting_time(const WalkSpec& spec, std::uint64_t trials, const Seed& seed,
                                          Execution exec = {}) {
  require(trials >= 100, "simulate_hitting_time: at least 100 trials required");
  const Tally tally = parallel_accumulate<Tally>(trials, exec, [&](std::uint64_t t, Tally& acc) {
    auto engine = seed.derive(t).engine();
    std::uint64_t steps = 0;
    std::uint64_t level = 0;
    while (level < spec.k) {
      ++steps;
      if (bernoulli(engine, spec.p)) ++level;
    }
    acc.add(steps);
  });
  return MeanEstimate::from_sums(static_cast<double>(tally.sum), static_cast<double>(tally.sum_sq), trials);
}

// ---------------------------------------------------------------------------
// Distinct-count domination

inline constexpr std::uint64_t kBudgetConstant = 1;

/// 2 p q + c.
inline std::uint64_t uniform_budget(std::uint64_t p_samples, std::uint64_t q_inverse,
                                    std::uint64_t c = kBudgetConstant) {
  require(p_samples >= 1 && q_inverse >= 1, "uniform_budget: p and q must be positive");
  return 2 * p_samples * q_inverse + c;
}

/// Smallest n with p < 2^n. Below it the walk comparison does not apply.
inline int budget_threshold_bits(std::uint64_t p_samples) {
  int n = 0;
  while (n < 63 && p_samples >= (std::uint64_t{1} << n)) ++n;
  return n;
}

/// uniform_budget(p, q), doubled when n is below budget_threshold_bits(p).
inline std::uint64_t regularity_budget(int n, std::uint64_t p_samples, std::uint64_t q_inverse) {
  const std::uint64_t base = uniform_budget(p_samples, q_inverse);
  return n < budget_threshold_bits(p_samples) ? 2 * base : base;
}

/// Empirical P(N(x^p) <= N(z^budget)) with x_i ~ d and z_i uniform on
/// {0,1}^n.
inline MeanEstimate distinct_domination_prob(const Distribution& d, std::uint64_t p_samples,
                                             std::uint64_t uniform_samples, std::uint64_t trials, const Seed& seed,
                                             Execution exec = {}) {
  require(trials >= 1000, "distinct_domination_prob: at least 1000 trials required");
  const Distribution uniform = Distribution::uniform_hypercube(d.n());
  const Tally tally = parallel_accumulate<Tally>(trials, exec, [&](std::uint64_t t, Tally& acc) {
    const Seed trial = seed.derive(t);
    const auto xs = d.sample_values(p_samples, trial.derive(0));
    const auto zs = uniform.sample_values(uniform_samples, trial.derive(1));
    acc.add(distinct_count(std::span<const std::uint64_t>(xs)) <= distinct_count(std::span<const std::uint64_t>(zs))
                ? 1
                : 0);
  });
  return MeanEstimate::from_sums(static_cast<double>(tally.sum), static_cast<double>(tally.sum_sq), trials);
}

/// Point mass, two-point support, uniform over 2^(n/2) values, uniform
/// hypercube.
inline std::vector<std::pair<std::string, Distribution>> adversarial_family(int n) {
  require(n >= 2 && n <= kMaxEnumerableBits, "adversarial family needs 2 <= n <= 21");
  std::vector<std::uint64_t> block(std::size_t{1} << (n / 2));
  for (std::size_t i = 0; i < block.size(); ++i) block[i] = i;
  std::vector<std::pair<std::string, Distribution>> out;
  out.emplace_back("point_mass", Distribution::point_mass(n, 0));
  out.emplace_back("two_point", Distribution::uniform_over(n, {0, 1}));
  out.emplace_back("uniform_sqrt_support", Distribution::uniform_over(n, block));
  out.emplace_back("uniform_hypercube", Distribution::uniform_hypercube(n));
  return out;
}

// ---------------------------------------------------------------------------
// Expectation transfer: E f(X) <= E g(Y) + B P(f(X) > g(Y)), X, Y independent

struct TransferCheck {
  bool holds = false;
  double lhs = 0.0;          // E f(X)
  double rhs = 0.0;          // E g(Y) + B P(f(X) > g(Y))
  double prob_exceeds = 0.0; // P(f(X) > g(Y))
};

// Slack for floating accumulation, relative to B.
inline constexpr double kTransferTolerance = 0x1.0p-40;

inline TransferCheck expectation_transfer_holds(std::span<const double> f_table, std::span<const double> g_table,
                                                const Distribution& law_x, const Distribution& law_y, double bound) {
  require(bound > 0.0 && std::isfinite(bound), "expectation transfer: B must be positive");
  if (law_x.n() > 16 || law_y.n() > 16) throw Unsupported("expectation transfer requires n <= 16");
  require(f_table.size() == (std::size_t{1} << law_x.n()), "expectation transfer: f table size must be 2^n");
  require(g_table.size() == (std::size_t{1} << law_y.n()), "expectation transfer: g table size must be 2^n");
  for (double v : f_table) require(v >= 0.0 && v <= bound, "expectation transfer: f outside [0, B]");
  for (double v : g_table) require(v >= 0.0 && v <= bound, "expectation transfer: g outside [0, B]");

  // (g value, probability) sorted by value, with prefix masses, so that
  // P(g(Y) < v) is one binary search.
  std::vector<std::pair<double, double>> g_law;
  detail::CompensatedSum eg;
  for (std::size_t y = 0; y < g_table.size(); ++y) {
    const double p = law_y.pmf(y);
    if (p == 0.0) continue;
    g_law.emplace_back(g_table[y], p);
    eg.add(p * g_table[y]);
  }
  std::sort(g_law.begin(), g_law.end());
  std::vector<double> below(g_law.size() + 1, 0.0);
  {
    detail::CompensatedSum run;
    for (std::size_t i = 0; i < g_law.size(); ++i) {
      run.add(g_law[i].second);
      below[i + 1] = run.value();
    }
  }

  detail::CompensatedSum ef;
  detail::CompensatedSum exceed;
  for (std::size_t x = 0; x < f_table.size(); ++x) {
    const double p = law_x.pmf(x);
    if (p == 0.0) continue;
    ef.add(p * f_table[x]);
    const auto it = std::lower_bound(g_law.begin(), g_law.end(), f_table[x],
                                     [](const std::pair<double, double>& e, double v) { return e.first < v; });
    exceed.add(p * below[static_cast<std::size_t>(it - g_law.begin())]);
  }

  TransferCheck out;
  out.lhs = ef.value();
  out.prob_exceeds = exceed.value();
  out.rhs = eg.value() + bound * out.prob_exceeds;
  out.holds = out.lhs <= out.rhs + kTransferTolerance * bound;
  return out;
}

// ---------------------------------------------------------------------------
// Entropy, balls and the reconstruction error bound

inline double binary_entropy(double x) {
  require(x >= 0.0 && x <= 1.0, "binary entropy: argument must be in [0, 1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

// log2 of a non-negative big integer, accurate to double precision.
inline double log2_big(const BigInt& v) {
  if (v == 0) return -std::numeric_limits<double>::infinity();
  const auto top = static_cast<long>(boost::multiprecision::msb(v));
  if (top < 53) return std::log2(v.convert_to<double>());
  const long shift = top - 52;
  return std::log2(static_cast<BigInt>(v >> shift).convert_to<double>()) + static_cast<double>(shift);
}

/// ceil(alpha 2^n); alpha * 2^n is exact for a binary power scale.
inline std::uint64_t ball_radius(int n, double alpha) {
  return static_cast<std::uint64_t>(std::ceil(std::ldexp(alpha, n)));
}

struct BallSize {
  std::uint64_t radius = 0;    // ceil(alpha 2^n)
  BigInt exact;                // sum_{i <= radius} C(2^n, i)
  double log2_exact = 0.0;
  double log2_bound = 0.0;     // 2^n H(radius / 2^n) + log2(radius + 1)
  bool bound_checked = false;  // radius >= 1
};

inline BallSize ball_size(int n, double alpha) {
  require(n >= 1, "ball size: n must be positive");
  if (n > 10) throw Unsupported("ball size requires n <= 10");
  require(alpha >= 0.0 && alpha < 0.5, "ball size: alpha must be in [0, 1/2)");
  const std::uint64_t points = std::uint64_t{1} << n;
  BallSize out;
  out.radius = ball_radius(n, alpha);
  BigInt term = 1;
  out.exact = 1;
  for (std::uint64_t i = 0; i < out.radius; ++i) {
    term = term * (points - i) / (i + 1);
    out.exact += term;
  }
  out.log2_exact = log2_big(out.exact);
  const double fraction = static_cast<double>(out.radius) / static_cast<double>(points);
  out.log2_bound = static_cast<double>(points) * binary_entropy(fraction) + std::log2(static_cast<double>(out.radius + 1));
  if (out.radius >= 1) {
    out.bound_checked = true;
    if (!(out.log2_exact <= out.log2_bound)) throw std::logic_error("ball size exceeds its entropy bound");
  }
  return out;
}

/// 1 - 2^(2^n (H(r / 2^n) - 1) + p) (r + 1) with r = ceil(alpha 2^n).
/// Returned verbatim; values <= 0 carry no information.
inline double bayes_error_lower_bound(int n, std::uint64_t p_samples, double alpha) {
  require(n >= 1, "bayes bound: n must be positive");
  if (n > 10) throw Unsupported("bayes bound requires n <= 10");
  require(alpha >= 0.0 && alpha < 0.5, "bayes bound: alpha must be in [0, 1/2)");
  const std::uint64_t points = std::uint64_t{1} << n;
  const std::uint64_t r = ball_radius(n, alpha);
  const long double exponent =
      static_cast<long double>(points) *
          (static_cast<long double>(binary_entropy(static_cast<double>(r) / static_cast<double>(points))) - 1.0L) +
      static_cast<long double>(p_samples);
  return static_cast<double>(1.0L - std::exp2(exponent) * static_cast<long double>(r + 1));
}

struct BoundReport {
  std::string name;
  std::vector<std::pair<std::string, double>> inputs;
  double value = 0.0;
  std::string notes;
};

inline BoundReport bayes_bound_report(int n, std::uint64_t p_samples, double alpha) {
  const std::uint64_t r = ball_radius(n, alpha);
  const double points = std::ldexp(1.0, n);
  const double h = binary_entropy(static_cast<double>(r) / points);
  BoundReport out;
  out.name = "bayes_error_lower_bound";
  out.inputs = {{"n", n}, {"p_samples", static_cast<double>(p_samples)}, {"alpha", alpha}};
  out.value = bayes_error_lower_bound(n, p_samples, alpha);
  out.notes = "radius=" + std::to_string(r) + " H=" + std::to_string(h) +
              " exponent=" + std::to_string(points * (h - 1.0) + static_cast<double>(p_samples));
  return out;
}

// ---------------------------------------------------------------------------
// Closed-form predictions for the lookup learner under uniform sampling

/// P(x in T) for S uniform samples on {0,1}^n: 1 - (1 - 2^-n)^S.
inline double collision_probability(int n, std::uint64_t train_size) {
  return -std::expm1(static_cast<double>(train_size) * std::log1p(-std::ldexp(1.0, -n)));
}

/// Lookup accuracy with uniform training and test: 1/2 + q/2.
inline double lookup_collision_accuracy(int n, std::uint64_t train_size) {
  return 0.5 + 0.5 * collision_probability(n, train_size);
}

/// Majority of k independent lookups on S samples each: votes that hit are
/// correct, the others are fair coins.
inline double amplified_lookup_accuracy(int n, std::uint64_t train_size, std::uint64_t k) {
  const double q = collision_probability(n, train_size);
  auto choose = [](std::uint64_t a, std::uint64_t b) {
    return std::exp(std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0));
  };
  double total = 0.0;
  for (std::uint64_t hits = 0; hits <= k; ++hits) {
    const double p_hits = choose(k, hits) * std::pow(q, hits) * std::pow(1.0 - q, k - hits);
    double p_major = 0.0;
    for (std::uint64_t heads = 0; heads <= k - hits; ++heads) {
      if (2 * (hits + heads) > k) p_major += choose(k - hits, heads) * std::ldexp(1.0, -static_cast<int>(k - hits));
    }
    total += p_hits * p_major;
  }
  return total;
}

/// P(S uniform draws from {1..n} cover every value), by inclusion-exclusion.
inline double coupon_completion_probability(int n, std::uint64_t draws) {
  double missing = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double term = std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) +
                                 static_cast<double>(draws) * std::log1p(-static_cast<double>(i) / n));
    missing += (i % 2 == 1 ? term : -term);
  }
  return 1.0 - missing;
}

// ---------------------------------------------------------------------------
// Distinguishing experiment

struct DistinguishResult {
  RiskEstimate pseudo;
  RiskEstimate random;
  double advantage = 0.0;   // pseudo.accuracy - random.accuracy
  double half_width = 0.0;  // sqrt(h_pseudo^2 + h_random^2)
};

/// Accuracy of `learner` on uniformly indexed concepts of `pseudo` minus its
/// accuracy on concepts of `random`, both with uniform training and test
/// inputs. Both arms share the per-trial seeds (common random numbers); only
/// the target differs.
inline DistinguishResult distinguishing_advantage(const Learner& learner, const ConceptClass& pseudo,
                                                  const ConceptClass& random, int n, std::size_t train_size,
                                                  std::uint64_t trials, const Seed& seed,
                                                  const Precision& m = Precision(10), Execution exec = {}) {
  require(pseudo.n() == n && random.n() == n, "distinguishing advantage: width mismatch");
  require(trials >= 1000, "distinguishing advantage: at least 1000 trials required");
  const Distribution uniform = Distribution::uniform_hypercube(n);
  DistinguishResult out;
  out.pseudo = estimate_class_risk(learner, pseudo, uniform, uniform, train_size, m, trials, seed, exec);
  out.random = estimate_class_risk(learner, random, uniform, uniform, train_size, m, trials, seed, exec);
  out.advantage = out.pseudo.accuracy - out.random.accuracy;
  out.half_width = std::hypot(out.pseudo.half_width, out.random.half_width);
  return out;
}

}  // namespace pacshift
