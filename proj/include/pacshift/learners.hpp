#pragma once

// Learners share one interface: predict(x, T, 1^m, seed) -> bit. The suite
// covers table lookup, index recovery for the modified class, advice
// decoding, the Bayes-optimal learner over the exhaustive class and
// majority-vote amplification, plus the risk estimator that scores them.

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pacshift/bits.hpp"
#include "pacshift/concepts.hpp"
#include "pacshift/core.hpp"
#include "pacshift/distributions.hpp"
#include "pacshift/parallel.hpp"
#include "pacshift/sampling.hpp"

namespace pacshift {

class InconsistentTrainingSet : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LearnerCounters {
  std::atomic<std::uint64_t> decode_failures{0};
};

class Learner {
 public:
  using Predict = std::function<bool(const Input&, const TrainingSet&, const Precision&, const Seed&)>;

  Learner(std::string name, Predict predict, std::string requirement = "any",
          std::shared_ptr<LearnerCounters> counters = nullptr)
      : name_(std::move(name)),
        predict_(std::move(predict)),
        requirement_(std::move(requirement)),
        counters_(std::move(counters)) {}

  const std::string& name() const { return name_; }
  // Declared training-distribution requirement (free-form).
  const std::string& requirement() const { return requirement_; }
  const LearnerCounters* counters() const { return counters_.get(); }

  bool predict(const Input& x, const TrainingSet& training, const Precision& m, const Seed& seed) const {
    return predict_(x, training, m, seed);
  }

 private:
  std::string name_;
  Predict predict_;
  std::string requirement_;
  std::shared_ptr<LearnerCounters> counters_;
};

inline Learner constant_learner(bool bit) {
  return Learner(bit ? "constant1" : "constant0",
                 [bit](const Input&, const TrainingSet&, const Precision&, const Seed&) { return bit; });
}

// Answers with the target itself; a perfect reference.
inline Learner oracle_learner(Concept target) {
  return Learner("oracle", [target = std::move(target)](const Input& x, const TrainingSet&, const Precision&,
                                                          const Seed&) { return target(x); });
}

namespace detail {

inline bool seeded_coin(const Seed& seed) {
  auto engine = seed.engine();
  return fair_coin(engine);
}

// Majority label of x in T, or nullopt when x is absent or tied.
inline std::optional<bool> lookup_label(const Input& x, const TrainingSet& training) {
  std::size_t ones = 0;
  std::size_t zeros = 0;
  for (const auto& e : training) {
    if (e.x.value == x.value) (e.y ? ones : zeros) += 1;
  }
  if (ones == zeros) return std::nullopt;
  return ones > zeros;
}

}  // namespace detail

/// Returns the stored label when x occurs in T, otherwise a fair coin drawn
/// from the seed.
inline Learner lookup_learner() {
  return Learner(
      "lookup",
      [](const Input& x, const TrainingSet& training, const Precision&, const Seed& seed) {
        if (auto hit = detail::lookup_label(x, training)) return *hit;
        return detail::seeded_coin(seed);
      },
      "any");
}

/// For the modified class: every example (u, y) with 1 <= u <= n reveals bit
/// u-1 of the target index. Unobserved index bits default to 0.
inline Learner index_recovery_learner(const ConceptClass& cls) {
  require(cls.kind() == ClassKind::modified, "index recovery needs a modified class");
  const int n = cls.n();
  return Learner(
      "index_recovery",
      [cls, n](const Input& x, const TrainingSet& training, const Precision&, const Seed&) {
        std::uint64_t index = 0;
        for (const auto& e : training) {
          const std::uint64_t u = e.x.value;
          if (u >= 1 && u <= static_cast<std::uint64_t>(n)) {
            const std::uint64_t bit = std::uint64_t{1} << (u - 1);
            index = e.y ? (index | bit) : (index & ~bit);
          }
        }
        return cls.get(index)(x);
      },
      "uniform over {1..n}");
}

using AdviceEvaluator = std::function<bool(const Bits&, const Input&)>;

/// Decodes the advice from the training inputs and answers evaluator(advice,
/// x). A failed decode (pilots unobserved, or an empty T) falls back to
/// lookup and is counted.
inline Learner advice_learner(std::size_t payload_length, AdviceEvaluator evaluator) {
  require(payload_length >= 1, "advice learner: payload length must be positive");
  auto counters = std::make_shared<LearnerCounters>();
  const Learner fallback = lookup_learner();
  return Learner(
      "advice",
      [payload_length, evaluator = std::move(evaluator), counters, fallback](
          const Input& x, const TrainingSet& training, const Precision& m, const Seed& seed) {
        if (!training.empty()) {
          try {
            const auto inputs = training.inputs();
            return evaluator(advice_decode(inputs, payload_length), x);
          } catch (const DecodeFailure&) {
          }
        }
        counters->decode_failures.fetch_add(1, std::memory_order_relaxed);
        return fallback.predict(x, training, m, seed);
      },
      "advice-encoding distribution", counters);
}

struct PosteriorSummary {
  double mass_one = 0.0;
  std::uint64_t consistent_count = 0;
};

/// Posterior over the exhaustive class under a uniform prior: uniform over
/// the concepts consistent with T. Enumerates all 2^(2^n) truth tables.
inline PosteriorSummary bayes_posterior(const ConceptClass& cls, const TrainingSet& training, const Input& x) {
  require(cls.kind() == ClassKind::exhaustive, "bayes posterior needs the exhaustive class");
  require(training.n() == cls.n() && x.n == cls.n(), "bayes posterior: width mismatch");
  std::uint64_t must_one = 0;
  std::uint64_t must_zero = 0;
  for (const auto& e : training) (e.y ? must_one : must_zero) |= std::uint64_t{1} << e.x.value;
  const std::uint64_t concepts = std::uint64_t{1} << cls.index_bits();
  const std::uint64_t x_bit = std::uint64_t{1} << x.value;
  std::uint64_t consistent = 0;
  std::uint64_t with_one = 0;
  for (std::uint64_t j = 0; j < concepts; ++j) {
    if ((j & must_one) != must_one || (j & must_zero) != 0) continue;
    ++consistent;
    if (j & x_bit) ++with_one;
  }
  if (consistent == 0) throw InconsistentTrainingSet("bayes posterior: no target is consistent with T");
  return {static_cast<double>(with_one) / static_cast<double>(consistent), consistent};
}

/// Predicts 1 iff the posterior mass of label 1 exceeds 1/2; ties go to 0.
inline Learner bayes_optimal_learner(const ConceptClass& cls) {
  require(cls.kind() == ClassKind::exhaustive, "bayes optimal learner needs the exhaustive class");
  return Learner(
      "bayes_optimal",
      [cls](const Input& x, const TrainingSet& training, const Precision&, const Seed&) {
        return bayes_posterior(cls, training, x).mass_one > 0.5;
      },
      "any");
}

enum class AmplifyMode {
  resample,  // vote i sees the i-th of k disjoint consecutive chunks of T
  fixed,     // every vote sees all of T
};

/// Majority of k base predictions, vote i seeded with seed.derive(i). In
/// resample mode T (of size k * S) is cut into k consecutive chunks of
/// floor(|T| / k) examples, which are independent training sets when T is
/// i.i.d.; the remainder is unused.
inline Learner majority_amplify(Learner base, std::uint64_t k, AmplifyMode mode = AmplifyMode::resample) {
  require(k >= 1 && k % 2 == 1, "majority amplification needs an odd vote count");
  std::string name = "majority" + std::to_string(k) + "(" + base.name() + ")";
  if (mode == AmplifyMode::fixed) name += "[fixed]";
  return Learner(
      name,
      [base, k, mode](const Input& x, const TrainingSet& training, const Precision& m, const Seed& seed) {
        const std::size_t chunk = training.size() / k;
        std::uint64_t ones = 0;
        for (std::uint64_t i = 0; i < k; ++i) {
          const Seed vote_seed = seed.derive(i);
          const bool vote = mode == AmplifyMode::fixed
                                ? base.predict(x, training, m, vote_seed)
                                : base.predict(x, training.slice(i * chunk, chunk), m, vote_seed);
          ones += vote ? 1 : 0;
        }
        return 2 * ones > k;
      },
      base.requirement(), nullptr);
}

namespace detail {

// Trial t uses seed.derive(t) with children 0 (training set), 1 (test
// points), {2, i} (learner randomness at test point i) and 3 (target draw).
template <class ConceptForTrial>
RiskEstimate estimate_risk_impl(const Learner& learner, ConceptForTrial concept_for_trial,
                                const Distribution& train_dist, const Distribution& test_dist,
                                std::size_t train_size, const Precision& m, std::uint64_t trials,
                                const Seed& seed, Execution exec, std::uint64_t test_points) {
  require(trials >= 100, "estimate_risk: at least 100 trials required");
  require(test_points >= 1, "estimate_risk: at least one test point per trial");
  require(train_dist.n() == test_dist.n(), "estimate_risk: train and test widths differ");
  const int n = test_dist.n();
  const Tally tally = parallel_accumulate<Tally>(trials, exec, [&](std::uint64_t t, Tally& acc) {
    const Seed trial = seed.derive(t);
    const Concept target = concept_for_trial(trial.derive(3));
    require(target.n() == n, "estimate_risk: target width differs from distributions");
    const TrainingSet training = sample_training_set(target, train_dist, train_size, trial.derive(0));
    auto engine = trial.derive(1).engine();
    std::uint64_t correct = 0;
    for (std::uint64_t i = 0; i < test_points; ++i) {
      const Input x(n, test_dist.sample(engine));
      if (learner.predict(x, training, m, trial.derive({2, i})) == target.at(x.value)) ++correct;
    }
    acc.add(correct);
  });
  return RiskEstimate::from_scores(tally.sum, tally.sum_sq, trials, test_points);
}

}  // namespace detail

/// Estimates E[1{A(x, T, 1^m) = c(x)}] jointly over x ~ test, T ~ train and
/// the learner's coins, with a fresh T and fresh test points per trial.
inline RiskEstimate estimate_risk(const Learner& learner, const Concept& target, const Distribution& train_dist,
                                  const Distribution& test_dist, std::size_t train_size, const Precision& m,
                                  std::uint64_t trials, const Seed& seed, Execution exec = {},
                                  std::uint64_t test_points = 1) {
  return detail::estimate_risk_impl(
      learner, [&target](const Seed&) { return target; }, train_dist, test_dist, train_size, m, trials, seed, exec,
      test_points);
}

/// As estimate_risk, with the target drawn uniformly from `cls` per trial.
inline RiskEstimate estimate_class_risk(const Learner& learner, const ConceptClass& cls,
                                        const Distribution& train_dist, const Distribution& test_dist,
                                        std::size_t train_size, const Precision& m, std::uint64_t trials,
                                        const Seed& seed, Execution exec = {}, std::uint64_t test_points = 1) {
  return detail::estimate_risk_impl(
      learner, [&cls](const Seed& s) { return cls.get(cls.sample_index(s)); }, train_dist, test_dist, train_size, m,
      trials, seed, exec, test_points);
}

/// Exact error P_e(W_opt) of the optimal reconstruction algorithm over the
/// class of all functions on n <= 2 bits: T holds p uniform samples, and
/// W_opt succeeds when its output agrees with the target on at least a
/// 1 - alpha fraction of inputs. Brute force over every target, every
/// sample sequence and every candidate output.
inline double wopt_error_exhaustive(int n, std::uint64_t p_samples, double alpha) {
  if (n < 1 || n > 2) throw Unsupported("exhaustive W_opt error requires n <= 2");
  if (p_samples > 6) throw Unsupported("exhaustive W_opt error requires p <= 6");
  require(alpha >= 0.0 && alpha < 0.5, "alpha must be in [0, 1/2)");
  const std::uint64_t points = std::uint64_t{1} << n;
  const std::uint64_t concepts = std::uint64_t{1} << points;
  const auto radius = static_cast<int>(std::floor(alpha * static_cast<double>(points)));
  std::uint64_t sequences = 1;
  for (std::uint64_t i = 0; i < p_samples; ++i) sequences *= points;

  double total = 0.0;
  for (std::uint64_t seq = 0; seq < sequences; ++seq) {
    std::uint64_t fixed = 0;  // inputs present in T
    std::uint64_t rest = seq;
    for (std::uint64_t i = 0; i < p_samples; ++i) {
      fixed |= std::uint64_t{1} << (rest % points);
      rest /= points;
    }
    const double consistent = static_cast<double>(concepts >> std::popcount(fixed));
    for (std::uint64_t c = 0; c < concepts; ++c) {
      // Posterior is uniform over concepts agreeing with c on `fixed`.
      std::uint64_t best = 0;
      for (std::uint64_t guess = 0; guess < concepts; ++guess) {
        std::uint64_t inside = 0;
        for (std::uint64_t other = 0; other < concepts; ++other) {
          if (((other ^ c) & fixed) != 0) continue;
          if (std::popcount(other ^ guess) <= radius) ++inside;
        }
        best = std::max(best, inside);
      }
      total += 1.0 - static_cast<double>(best) / consistent;
    }
  }
  return total / (static_cast<double>(concepts) * static_cast<double>(sequences));
}

}  // namespace pacshift
