#pragma once

// The six experiments reachable from the command line. Each returns a
// report that depends only on the configuration, never on the worker count.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "pacshift/bits.hpp"
#include "pacshift/concepts.hpp"
#include "pacshift/core.hpp"
#include "pacshift/distributions.hpp"
#include "pacshift/harness/config.hpp"
#include "pacshift/harness/report.hpp"
#include "pacshift/learners.hpp"
#include "pacshift/parallel.hpp"
#include "pacshift/stats.hpp"

namespace pacshift::harness {

namespace detail {

inline ExperimentReport start_report(const ExperimentConfig& cfg, std::vector<std::string> columns) {
  ExperimentReport r;
  r.experiment = cfg.experiment;
  r.seed = cfg.seed;
  for (const auto& [k, v] : cfg.echo()) r.config.emplace_back(k, cell(v));
  r.columns = std::move(columns);
  return r;
}

inline void note_prg(ExperimentReport& r, PrgKind kind) {
  const bool insecure = PrgSpec(kind, 1).insecure();
  r.summary.emplace_back("prg", cell(PrgSpec(kind, 1).name()));
  r.summary.emplace_back("prg_insecure", cell(insecure));
  if (insecure) r.notes.emplace_back("INSECURE: the test PRG is not pseudorandom; no hardness claim applies");
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// Uniform-range training against uniform-hypercube training on the
/// modified first-bit class, both tested on the hypercube.
inline ExperimentReport run_separation(const ExperimentConfig& cfg, Execution exec = {}) {
  const int n = cfg.n;
  const ConceptClass cls = modified_class(first_bit_class(n, cfg.prg));
  const Distribution cube = Distribution::uniform_hypercube(n);
  const Distribution range = Distribution::uniform_range(n);
  const Precision m(cfg.m);
  const Seed root(cfg.seed);

  ExperimentReport r = detail::start_report(
      cfg, {"arm", "learner", "train_distribution", "train_size", "trials", "accuracy", "ci99_half_width",
            "oracle_accuracy", "oracle_kind"});
  auto add = [&](const std::string& arm, const Learner& learner, const Distribution& train, std::uint64_t size,
                 std::uint64_t stream, double oracle, const std::string& oracle_kind) {
    const RiskEstimate est =
        estimate_class_risk(learner, cls, train, cube, size, m, cfg.trials, root.derive(stream), exec, cfg.test_points);
    r.add_row({cell(arm), cell(learner.name()), cell(to_string(train.kind())), cell(size), cell(cfg.trials),
               cell(est.accuracy), cell(est.half_width), cell(oracle), cell(oracle_kind)});
    return est;
  };

  const RiskEstimate arm_a = add("A", index_recovery_learner(cls), range, cfg.range_train_size, 0,
                                 coupon_completion_probability(n, cfg.range_train_size), "coupon_lower_bound");
  const Learner lookup = lookup_learner();
  const RiskEstimate arm_b =
      add("B", lookup, cube, cfg.train_size, 1, lookup_collision_accuracy(n, cfg.train_size), "collision");
  const bool resample = cfg.amplify_mode == AmplifyMode::resample;
  add("B", majority_amplify(lookup, cfg.votes, cfg.amplify_mode), cube,
      resample ? cfg.votes * cfg.train_size : cfg.train_size, 2,
      resample ? amplified_lookup_accuracy(n, cfg.train_size, cfg.votes) : lookup_collision_accuracy(n, cfg.train_size),
      "collision");

  const double gap = arm_a.accuracy - arm_b.accuracy;
  const double gap_half = std::hypot(arm_a.half_width, arm_b.half_width);
  const double tv_bound = static_cast<double>(n) / std::ldexp(1.0, n);
  r.summary = {
      {"n", cell(n)},
      {"arm_a_accuracy", cell(arm_a.accuracy)},
      {"arm_b_accuracy", cell(arm_b.accuracy)},
      {"gap", cell(gap)},
      {"gap_ci99_half_width", cell(gap_half)},
      {"gap_ci99_lower", cell(gap - gap_half)},
      {"collision_probability", cell(collision_probability(n, cfg.train_size))},
      {"coupon_completion_probability", cell(coupon_completion_probability(n, cfg.range_train_size))},
      {"tv_bound", cell(tv_bound)},
      {"min_samples_to_distinguish", cell(min_samples_to_distinguish(tv_bound, 0.25))},
  };
  detail::note_prg(r, cfg.prg);
  r.notes.emplace_back("oracle_kind coupon_lower_bound is P(all of 1..n observed), a lower bound on arm A accuracy");
  if (resample) {
    r.notes.emplace_back("majority row draws votes * train_size samples, one disjoint chunk per vote");
  }
  return r;
}

// ---------------------------------------------------------------------------

/// Encode, sample, decode round trips of an advice payload.
inline ExperimentReport run_codec(const ExperimentConfig& cfg, Execution exec = {}) {
  const int n = cfg.n;
  const std::size_t length = cfg.payload_bits;
  const Seed root(cfg.seed);
  const Bits fixed = cfg.payload.empty() ? Bits{} : bits_from_hex(cfg.payload, length);

  struct Outcome {
    std::string payload_hex;
    bool success = false;
    bool failure = false;
    std::uint64_t errors = 0;
    std::string positions;
  };
  const auto outcomes = parallel_map<Outcome>(cfg.trials, exec, [&](std::uint64_t t) {
    const Seed trial = root.derive(t);
    Bits payload = fixed;
    if (payload.empty()) {
      auto engine = trial.derive(0).engine();
      payload.resize(length);
      for (auto& b : payload) b = fair_coin(engine) ? 1 : 0;
    }
    const Distribution dist = advice_encode(payload, n);
    const auto samples = dist.sample_inputs(cfg.samples, trial.derive(1));
    Outcome o;
    o.payload_hex = bits_to_hex(payload);
    try {
      const Bits decoded = advice_decode(samples, length);
      for (std::size_t i = 0; i < length; ++i) {
        if (decoded[i] != payload[i]) {
          if (o.errors++) o.positions += ' ';
          o.positions += std::to_string(i);
        }
      }
      o.success = o.errors == 0;
    } catch (const DecodeFailure&) {
      o.failure = true;
      o.errors = length;
    }
    return o;
  });

  ExperimentReport r = detail::start_report(cfg, {"trial", "payload_hex", "payload_bits", "samples", "success",
                                                  "decode_failure", "bit_errors", "error_positions"});
  std::uint64_t successes = 0;
  std::uint64_t failures = 0;
  std::uint64_t bit_errors = 0;
  for (std::uint64_t t = 0; t < outcomes.size(); ++t) {
    const auto& o = outcomes[t];
    successes += o.success ? 1 : 0;
    failures += o.failure ? 1 : 0;
    bit_errors += o.errors;
    r.add_row({cell(t), cell(o.payload_hex), cell(length), cell(cfg.samples), cell(o.success), cell(o.failure),
               cell(o.errors), cell(o.positions)});
  }
  const RiskEstimate rate = RiskEstimate::from_counts(successes, cfg.trials);
  r.summary = {
      {"n", cell(n)},
      {"success_rate", cell(rate.accuracy)},
      {"success_ci99_half_width", cell(rate.half_width)},
      {"decode_failures", cell(failures)},
      {"bit_errors", cell(bit_errors)},
  };
  r.notes.emplace_back("payload bit i is carried by outcome i + 2; outcomes 0 and 1 are the pilots 0, 1");
  return r;
}

// ---------------------------------------------------------------------------

inline ExperimentReport run_walk(const ExperimentConfig& cfg, Execution exec = {}) {
  std::vector<WalkSpec> grid;
  if (cfg.walk_p) {
    grid.emplace_back(*cfg.walk_p, *cfg.walk_k);
  } else {
    for (double p : {0.1, 0.25, 0.5, 1.0}) {
      for (std::uint64_t k : {1, 5, 10}) grid.emplace_back(p, k);
    }
  }
  ExperimentReport r = detail::start_report(
      cfg, {"p", "k", "trials", "mean", "ci99_half_width", "expected", "relative_error", "within_3ci"});
  const Seed root(cfg.seed);
  std::uint64_t inside = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const MeanEstimate est = simulate_hitting_time(grid[i], cfg.trials, root.derive(i), exec);
    const double expected = hitting_time_mean(grid[i]);
    const bool within = std::abs(est.mean - expected) <= 3.0 * est.half_width;
    inside += within ? 1 : 0;
    r.add_row({cell(grid[i].p), cell(grid[i].k), cell(cfg.trials), cell(est.mean), cell(est.half_width),
               cell(expected), cell(std::abs(est.mean - expected) / expected), cell(within)});
  }
  r.summary = {{"grid_points", cell(grid.size())}, {"within_3ci", cell(inside)}};
  return r;
}

// ---------------------------------------------------------------------------

inline ExperimentReport run_bounds(const ExperimentConfig& cfg, Execution = {}) {
  const int n = cfg.n;
  const std::uint64_t points = std::uint64_t{1} << n;
  std::vector<std::uint64_t> p_grid;
  if (points <= 8) {
    for (std::uint64_t p = 1; p <= points; ++p) p_grid.push_back(p);
  } else {
    for (std::uint64_t p = 1; p <= points; p *= 2) p_grid.push_back(p);
  }
  ExperimentReport r = detail::start_report(
      cfg, {"n", "p_samples", "alpha", "radius", "ball_size", "ball_size_log2", "entropy_bound_log2", "bound_holds",
            "bayes_error_lower_bound", "vacuous", "wopt_computed", "wopt_exact_error"});
  std::uint64_t vacuous_rows = 0;
  std::uint64_t oracle_rows = 0;
  for (double alpha : {0.0, 0.125, 0.25, 0.375}) {
    const BallSize ball = ball_size(n, alpha);
    for (std::uint64_t p : p_grid) {
      const double bound = bayes_error_lower_bound(n, p, alpha);
      const bool computed = n <= 2 && p <= 6;
      double exact = 0.0;
      if (computed) {
        exact = wopt_error_exhaustive(n, p, alpha);
        if (bound > exact + 1e-12) throw std::logic_error("bayes error bound exceeds the exact W_opt error");
        ++oracle_rows;
      }
      vacuous_rows += bound <= 0.0 ? 1 : 0;
      r.add_row({cell(n), cell(p), cell(alpha), cell(ball.radius), cell(ball.exact.str()), cell(ball.log2_exact),
                 cell(ball.log2_bound), cell(ball.log2_exact <= ball.log2_bound), cell(bound), cell(bound <= 0.0),
                 cell(computed), cell(exact)});
    }
  }
  r.summary = {{"n", cell(n)}, {"vacuous_rows", cell(vacuous_rows)}, {"oracle_rows", cell(oracle_rows)}};
  r.notes.emplace_back("wopt_exact_error is 0 and meaningless when wopt_computed is false");
  return r;
}

// ---------------------------------------------------------------------------

inline Learner distinguish_learner(const ExperimentConfig& cfg) {
  if (cfg.learner == "lookup") return lookup_learner();
  if (cfg.learner == "majority") return majority_amplify(lookup_learner(), cfg.votes, AmplifyMode::fixed);
  if (cfg.learner == "constant0") return constant_learner(false);
  if (cfg.learner == "constant1") return constant_learner(true);
  throw InvalidArgument("unknown learner '" + cfg.learner + "'");
}

/// First-bit pseudorandom class against lazily sampled random functions.
inline ExperimentReport run_distinguish(const ExperimentConfig& cfg, Execution exec = {}) {
  const int n = cfg.n;
  const Seed root(cfg.seed);
  const ConceptClass pseudo = first_bit_class(n, cfg.prg);
  const ConceptClass random = random_function_class(n, root.derive(1));
  const Learner learner = distinguish_learner(cfg);
  const DistinguishResult res = distinguishing_advantage(learner, pseudo, random, n, cfg.train_size, cfg.trials,
                                                         root.derive(0), Precision(cfg.m), exec);
  ExperimentReport r = detail::start_report(
      cfg, {"arm", "class", "learner", "train_size", "trials", "accuracy", "ci99_half_width"});
  r.add_row({cell("pseudo"), cell(to_string(pseudo.kind())), cell(learner.name()), cell(cfg.train_size),
             cell(cfg.trials), cell(res.pseudo.accuracy), cell(res.pseudo.half_width)});
  r.add_row({cell("random"), cell(to_string(random.kind())), cell(learner.name()), cell(cfg.train_size),
             cell(cfg.trials), cell(res.random.accuracy), cell(res.random.half_width)});
  r.summary = {
      {"n", cell(n)},
      {"advantage", cell(res.advantage)},
      {"advantage_ci99_half_width", cell(res.half_width)},
  };
  detail::note_prg(r, cfg.prg);
  r.notes.emplace_back("both arms share per-trial seeds; only the target differs");
  return r;
}

// ---------------------------------------------------------------------------

struct TransferSummary {
  std::uint64_t instances = 0;
  std::uint64_t holds = 0;
  double min_slack = std::numeric_limits<double>::infinity();  // rhs - lhs

  TransferSummary& operator+=(const TransferSummary& o) {
    instances += o.instances;
    holds += o.holds;
    min_slack = std::min(min_slack, o.min_slack);
    return *this;
  }
};

/// One random bounded instance at a width in [1, max_n]: random B, random
/// laws with some zero masses, and f, g that are either continuous or drawn
/// from a 5-level grid (which produces ties).
inline TransferCheck random_transfer_instance(const Seed& seed, int max_n = 6) {
  auto engine = seed.engine();
  const int n = 1 + static_cast<int>(uniform_below(engine, static_cast<std::uint64_t>(max_n)));
  const std::size_t size = std::size_t{1} << n;
  const double bound = 0.5 + 9.5 * uniform_unit(engine);
  auto law = [&] {
    std::vector<double> w(size);
    double total = 0.0;
    for (auto& v : w) {
      v = bernoulli(engine, 0.2) ? 0.0 : uniform_unit(engine);
      total += v;
    }
    if (total == 0.0) {
      w[0] = 1.0;
      total = 1.0;
    }
    for (auto& v : w) v /= total;
    return Distribution::table(n, std::move(w));
  };
  auto table = [&] {
    std::vector<double> t(size);
    const bool grid = fair_coin(engine);
    for (auto& v : t) {
      v = grid ? bound * static_cast<double>(uniform_below(engine, 5)) / 4.0 : bound * uniform_unit(engine);
    }
    return t;
  };
  const Distribution law_x = law();
  const Distribution law_y = law();
  const auto f = table();
  const auto g = table();
  return expectation_transfer_holds(f, g, law_x, law_y, bound);
}

inline TransferSummary transfer_suite(std::uint64_t instances, const Seed& seed, Execution exec = {}) {
  return parallel_accumulate<TransferSummary>(instances, exec, [&](std::uint64_t i, TransferSummary& acc) {
    const TransferCheck c = random_transfer_instance(seed.derive(i));
    ++acc.instances;
    acc.holds += c.holds ? 1 : 0;
    acc.min_slack = std::min(acc.min_slack, c.rhs - c.lhs);
  });
}

/// Distinct-count domination over the adversarial family, plus the
/// randomized expectation-transfer suite.
inline ExperimentReport run_regularity(const ExperimentConfig& cfg, Execution exec = {}) {
  const int n = cfg.n;
  const Seed root(cfg.seed);
  const std::uint64_t budget = regularity_budget(n, cfg.p_samples, cfg.q);
  const double threshold = 1.0 - 1.0 / static_cast<double>(cfg.q);
  constexpr double kSlack = 0.02;
  ExperimentReport r = detail::start_report(cfg, {"distribution", "p_samples", "q", "budget", "trials",
                                                  "domination_prob", "ci99_half_width", "threshold", "holds"});
  std::uint64_t holding = 0;
  const auto family = adversarial_family(n);
  for (std::size_t i = 0; i < family.size(); ++i) {
    const MeanEstimate est =
        distinct_domination_prob(family[i].second, cfg.p_samples, budget, cfg.trials, root.derive({0, i}), exec);
    const bool holds = est.mean >= threshold - kSlack;
    holding += holds ? 1 : 0;
    r.add_row({cell(family[i].first), cell(cfg.p_samples), cell(cfg.q), cell(budget), cell(cfg.trials),
               cell(est.mean), cell(est.half_width), cell(threshold), cell(holds)});
  }
  const TransferSummary transfer = transfer_suite(cfg.transfer_instances, root.derive(1), exec);
  r.summary = {
      {"n", cell(n)},
      {"budget", cell(budget)},
      {"budget_threshold_bits", cell(budget_threshold_bits(cfg.p_samples))},
      {"distributions_holding", cell(holding)},
      {"transfer_instances", cell(transfer.instances)},
      {"transfer_holds", cell(transfer.holds)},
  };
  if (transfer.instances > 0) r.summary.emplace_back("transfer_min_slack", cell(transfer.min_slack));
  r.notes.emplace_back("holds means domination_prob >= threshold - 0.02");
  return r;
}

// ---------------------------------------------------------------------------

/// Runs cfg.experiment. Wall-clock time is added to the summary only when
/// cfg.timing is set, since it would break byte-identical reruns.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg, Execution exec = {}) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport r;
  if (cfg.experiment == "separation") {
    r = run_separation(cfg, exec);
  } else if (cfg.experiment == "codec") {
    r = run_codec(cfg, exec);
  } else if (cfg.experiment == "walk") {
    r = run_walk(cfg, exec);
  } else if (cfg.experiment == "bounds") {
    r = run_bounds(cfg, exec);
  } else if (cfg.experiment == "distinguish") {
    r = run_distinguish(cfg, exec);
  } else if (cfg.experiment == "regularity") {
    r = run_regularity(cfg, exec);
  } else {
    throw InvalidArgument("unknown experiment '" + cfg.experiment + "'");
  }
  if (cfg.timing) {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    r.summary.emplace_back("wall_clock_seconds", cell(elapsed.count()));
  }
  return r;
}

}  // namespace pacshift::harness
