#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pacshift/harness/config.hpp"
#include "pacshift/harness/experiments.hpp"
#include "pacshift/harness/report.hpp"

namespace pacshift::harness {
namespace {

ExperimentConfig small_config(const std::string& experiment) {
  ExperimentConfig c = ExperimentConfig::defaults(experiment);
  if (experiment == "separation") {
    c.n = 8;
    c.train_size = 100;
    c.range_train_size = 40;
    c.trials = 300;
  } else if (experiment == "codec") {
    c.n = 6;
    c.payload_bits = 16;
    c.samples = 5000;
    c.trials = 20;
  } else if (experiment == "walk") {
    c.trials = 500;
  } else if (experiment == "distinguish") {
    c.n = 10;
    c.train_size = 100;
    c.trials = 1000;
  } else if (experiment == "regularity") {
    c.n = 6;
    c.trials = 1000;
    c.transfer_instances = 200;
  }
  return c;
}

const Cell& summary(const ExperimentReport& r, const std::string& key) {
  const Cell* c = r.find_summary(key);
  if (c == nullptr) throw std::out_of_range("missing summary key " + key);
  return *c;
}

std::size_t column(const ExperimentReport& r, const std::string& name) {
  for (std::size_t i = 0; i < r.columns.size(); ++i) {
    if (r.columns[i] == name) return i;
  }
  throw std::out_of_range("missing column " + name);
}

TEST(ConfigTest, PerExperimentDefaults) {
  EXPECT_EQ(ExperimentConfig::defaults("separation").n, 16);
  EXPECT_EQ(ExperimentConfig::defaults("separation").train_size, 1000u);
  EXPECT_EQ(ExperimentConfig::defaults("separation").range_train_size, 200u);
  EXPECT_EQ(ExperimentConfig::defaults("codec").trials, 100u);
  EXPECT_EQ(ExperimentConfig::defaults("bounds").n, 2);
  EXPECT_EQ(ExperimentConfig::defaults("regularity").n, 8);
  EXPECT_THROW(ExperimentConfig::defaults("train"), InvalidArgument);
}

TEST(ConfigTest, SetParsesAndRejects) {
  ExperimentConfig c = ExperimentConfig::defaults("separation");
  c.set("train-size", "250");
  c.set("prg", "test");
  c.set("walk-p", "0.25");
  EXPECT_EQ(c.train_size, 250u);
  EXPECT_EQ(c.prg, PrgKind::test);
  EXPECT_EQ(*c.walk_p, 0.25);
  EXPECT_THROW(c.set("train-size", "-3"), InvalidArgument);
  EXPECT_THROW(c.set("train-size", "12x"), InvalidArgument);
  EXPECT_THROW(c.set("colour", "red"), InvalidArgument);
  EXPECT_THROW(c.set("amplify-mode", "sometimes"), InvalidArgument);
}

TEST(ConfigTest, InsecurePrgNeedsOptIn) {
  ExperimentConfig c = ExperimentConfig::defaults("separation");
  c.prg = PrgKind::test;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.allow_insecure = true;
  EXPECT_NO_THROW(c.validate());
}

TEST(ConfigTest, Validation) {
  ExperimentConfig c = ExperimentConfig::defaults("separation");
  c.n = 25;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = ExperimentConfig::defaults("bounds");
  c.n = 11;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = ExperimentConfig::defaults("codec");
  c.n = 6;
  c.payload_bits = 63;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = ExperimentConfig::defaults("separation");
  c.votes = 2;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = ExperimentConfig::defaults("walk");
  c.walk_p = 0.5;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(ConfigTest, FlagsOverrideFileOverrideDefaults) {
  const auto file = parse_config_text("# comment\n\ntrials = 500\n--n = 10\nseed=3\n");
  EXPECT_EQ(file.at("n"), "10");
  const auto c = resolve_config("separation", file, {{"trials", "700"}});
  EXPECT_EQ(c.trials, 700u);
  EXPECT_EQ(c.n, 10);
  EXPECT_EQ(c.seed, 3u);
  EXPECT_EQ(c.train_size, 1000u);
  EXPECT_THROW(parse_config_text("trials 500\n"), InvalidArgument);
}

TEST(ConfigTest, EchoReproducesConfig) {
  ExperimentConfig c = small_config("separation");
  c.seed = 99;
  c.amplify_mode = AmplifyMode::fixed;
  std::map<std::string, std::string> echoed;
  for (const auto& [k, v] : c.echo()) {
    if (!v.empty()) echoed[k] = v;
  }
  const auto again = resolve_config("separation", {}, echoed);
  EXPECT_EQ(again.echo(), c.echo());
}

TEST(EmitTest, EmptyReportIsHeaderOnlyCsv) {
  ExperimentReport r;
  r.columns = {"a", "b"};
  EXPECT_EQ(emit_csv(r), "a,b\n");
}

TEST(EmitTest, CsvQuotingRoundTrips) {
  ExperimentReport r;
  r.columns = {"text", "value", "flag"};
  r.add_row({cell("plain"), cell(0.1), cell(true)});
  r.add_row({cell("with, comma"), cell(-2), cell(false)});
  r.add_row({cell("quote \" and\nnewline"), cell(std::uint64_t{18446744073709551615ULL}), cell(false)});
  const auto records = parse_csv(emit_csv(r));
  ASSERT_EQ(records.size(), 4u);
  EXPECT_EQ(records[0], r.columns);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    for (std::size_t j = 0; j < r.columns.size(); ++j) EXPECT_EQ(records[i + 1][j], to_text(r.rows[i][j]));
  }
  EXPECT_EQ(records[1][1], "0.1");
  EXPECT_THROW(r.add_row({cell(1)}), InvalidArgument);
}

TEST(EmitTest, JsonRoundTripsIncludingNonFinite) {
  ExperimentReport r;
  r.experiment = "custom";
  r.seed = 18446744073709551615ULL;
  r.config = {{"n", cell("4")}};
  r.summary = {{"inf", cell(std::numeric_limits<double>::infinity())}, {"neg", cell(-3)}, {"x", cell(2.5)}};
  r.columns = {"a"};
  r.add_row({cell(1.0)});
  r.notes = {"note"};
  const std::string text = emit_json(r);
  EXPECT_EQ(parse_json(text), r);
  EXPECT_NE(text.find("\"Infinity\""), std::string::npos);
  // Stable key order.
  EXPECT_LT(text.find("schema_version"), text.find("artifact_version"));
  EXPECT_LT(text.find("artifact_version"), text.find("\"experiment\""));
  EXPECT_LT(text.find("\"summary\""), text.find("\"columns\""));
}

TEST(EmitTest, EveryExperimentRoundTrips) {
  for (const auto& name : experiment_names()) {
    const auto report = run_experiment(small_config(name));
    EXPECT_EQ(parse_json(emit_json(report)), report) << name;
    const auto records = parse_csv(emit_csv(report));
    ASSERT_EQ(records.size(), report.rows.size() + 1) << name;
    EXPECT_EQ(records[0], report.columns);
  }
}

TEST(EmitTest, RejectsUnknownFormat) {
  EXPECT_THROW(emit(ExperimentReport{}, "xml"), InvalidArgument);
}

TEST(SeparationTest, ReportColumns) {
  ExperimentConfig c = small_config("separation");
  const auto r = run_separation(c);
  EXPECT_EQ(r.columns, (std::vector<std::string>{"arm", "learner", "train_distribution", "train_size", "trials",
                                                 "accuracy", "ci99_half_width", "oracle_accuracy", "oracle_kind"}));
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_EQ(std::get<std::string>(r.rows[0][0]), "A");
  EXPECT_EQ(std::get<std::string>(r.rows[2][1]), "majority3(lookup)");
  EXPECT_EQ(std::get<std::uint64_t>(r.rows[2][3]), 300u);
  EXPECT_DOUBLE_EQ(std::get<double>(summary(r, "tv_bound")), 8.0 / 256);
  EXPECT_FALSE(std::get<bool>(summary(r, "prg_insecure")));
  EXPECT_EQ(std::get<std::uint64_t>(summary(r, "min_samples_to_distinguish")),
            min_samples_to_distinguish(8.0 / 256, 0.25));
}

TEST(SeparationTest, InsecurePrgIsFlaggedAndReproducible) {
  ExperimentConfig c = small_config("separation");
  c.n = 4;
  c.prg = PrgKind::test;
  c.allow_insecure = true;
  c.seed = 12345;
  const auto a = emit_json(run_experiment(c));
  const auto b = emit_json(run_experiment(c));
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("INSECURE"), std::string::npos);
  EXPECT_NE(a.find("\"prg_insecure\": true"), std::string::npos);
}

TEST(SeparationTest, EmptyRangeArmMatchesIndexZeroAgreement) {
  ExperimentConfig c = small_config("separation");
  c.range_train_size = 0;
  c.trials = 4000;
  const auto r = run_separation(c);
  // Agreement of target 0 with a uniformly drawn target at a uniform point.
  const auto cls = modified_class(first_bit_class(c.n, c.prg));
  const auto zero = cls.get(0).truth_table();
  double agree = 0.0;
  for (std::uint64_t j = 0; j < 256; ++j) {
    const auto t = cls.get(j).truth_table();
    for (std::size_t x = 0; x < 256; ++x) agree += t[x] == zero[x] ? 1.0 : 0.0;
  }
  agree /= 256.0 * 256.0;
  const double acc = std::get<double>(r.rows[0][column(r, "accuracy")]);
  const double half = std::get<double>(r.rows[0][column(r, "ci99_half_width")]);
  EXPECT_NEAR(acc, agree, half);
}

TEST(SeparationTest, IndependentOfWorkerCount) {
  ExperimentConfig c = small_config("separation");
  EXPECT_EQ(emit_csv(run_experiment(c, Execution{1})), emit_csv(run_experiment(c, Execution{8})));
}

TEST(CodecTest, SingleBitPayload) {
  ExperimentConfig c = ExperimentConfig::defaults("codec");
  c.n = 2;
  c.payload = "8";
  c.payload_bits = 1;
  c.samples = 10000;
  const auto r = run_codec(c);
  EXPECT_EQ(std::get<double>(summary(r, "success_rate")), 1.0);
  EXPECT_EQ(std::get<std::string>(r.rows[0][column(r, "payload_hex")]), "8");
}

TEST(CodecTest, StarvedBudgetDegradesGracefully) {
  ExperimentConfig c = ExperimentConfig::defaults("codec");
  c.samples = 10;
  const auto r = run_codec(c);
  EXPECT_LT(std::get<double>(summary(r, "success_rate")), 0.05);
  EXPECT_EQ(r.rows.size(), 100u);
}

TEST(CodecTest, DefaultBudgetSucceeds) {
  ExperimentConfig c = ExperimentConfig::defaults("codec");
  c.trials = 20;
  const auto r = run_codec(c);
  EXPECT_EQ(std::get<double>(summary(r, "success_rate")), 1.0);
  EXPECT_EQ(std::get<std::uint64_t>(summary(r, "decode_failures")), 0u);
}

TEST(BoundsTest, N2Grid) {
  const auto r = run_bounds(ExperimentConfig::defaults("bounds"));
  EXPECT_EQ(r.columns, (std::vector<std::string>{"n", "p_samples", "alpha", "radius", "ball_size", "ball_size_log2",
                                                 "entropy_bound_log2", "bound_holds", "bayes_error_lower_bound",
                                                 "vacuous", "wopt_computed", "wopt_exact_error"}));
  bool saw_075 = false;
  bool saw_vacuous = false;
  for (const auto& row : r.rows) {
    const auto p = std::get<std::uint64_t>(row[column(r, "p_samples")]);
    const double alpha = std::get<double>(row[column(r, "alpha")]);
    const double bound = std::get<double>(row[column(r, "bayes_error_lower_bound")]);
    if (p == 2 && alpha == 0.0) {
      saw_075 = true;
      EXPECT_EQ(bound, 0.75);
      EXPECT_GE(std::get<double>(row[column(r, "wopt_exact_error")]), 0.75);
    }
    if (p == 4 && alpha == 0.0) saw_vacuous = std::get<bool>(row[column(r, "vacuous")]);
    EXPECT_TRUE(std::get<bool>(row[column(r, "bound_holds")]));
    EXPECT_TRUE(std::get<bool>(row[column(r, "wopt_computed")]));
  }
  EXPECT_TRUE(saw_075);
  EXPECT_TRUE(saw_vacuous);
}

TEST(BoundsTest, N10Grid) {
  ExperimentConfig c = ExperimentConfig::defaults("bounds");
  c.n = 10;
  const auto r = run_bounds(c);
  EXPECT_EQ(r.rows.size(), 4u * 11u);
  for (const auto& row : r.rows) EXPECT_FALSE(std::get<bool>(row[column(r, "wopt_computed")]));
}

TEST(WalkExperimentTest, GridAndSinglePoint) {
  ExperimentConfig c = small_config("walk");
  EXPECT_EQ(run_walk(c).rows.size(), 12u);
  c.walk_p = 0.25;
  c.walk_k = 10;
  const auto r = run_walk(c);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(std::get<double>(r.rows[0][column(r, "expected")]), 40.0);
}

TEST(DistinguishExperimentTest, ConstantLearner) {
  ExperimentConfig c = small_config("distinguish");
  c.learner = "constant0";
  const auto r = run_distinguish(c);
  EXPECT_LE(std::abs(std::get<double>(summary(r, "advantage"))),
            std::get<double>(summary(r, "advantage_ci99_half_width")));
}

TEST(RegularityExperimentTest, AllHold) {
  const auto r = run_regularity(small_config("regularity"));
  EXPECT_EQ(std::get<std::uint64_t>(summary(r, "distributions_holding")), 4u);
  EXPECT_EQ(std::get<std::uint64_t>(summary(r, "transfer_holds")), 200u);
}

TEST(RunExperimentTest, TimingOnlyWhenRequested) {
  ExperimentConfig c = small_config("walk");
  EXPECT_EQ(run_experiment(c).find_summary("wall_clock_seconds"), nullptr);
  c.timing = true;
  EXPECT_NE(run_experiment(c).find_summary("wall_clock_seconds"), nullptr);
}

}  // namespace
}  // namespace pacshift::harness
