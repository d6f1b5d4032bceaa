#pragma once

// Experiment configuration: per-experiment defaults overlaid by flat
// "key = value" settings whose keys are the long flag names.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pacshift/core.hpp"
#include "pacshift/learners.hpp"
#include "pacshift/prg.hpp"

namespace pacshift::harness {

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> kNames = {"separation", "codec",       "walk",
                                                  "bounds",     "distinguish", "regularity"};
  return kNames;
}

struct ExperimentConfig {
  std::string experiment = "separation";
  int n = 16;
  std::uint64_t train_size = 1000;
  std::uint64_t range_train_size = 200;  // separation, uniform-range arm
  std::uint64_t test_points = 1;
  std::uint64_t trials = 10000;
  std::uint64_t m = 10;
  PrgKind prg = PrgKind::hash;
  std::uint64_t seed = 0;
  std::string format = "csv";
  bool allow_insecure = false;
  unsigned workers = 1;
  bool timing = false;

  std::uint64_t votes = 3;  // odd
  AmplifyMode amplify_mode = AmplifyMode::resample;
  std::string learner = "lookup";  // distinguish

  std::string payload;  // codec, hex; empty draws a fresh payload per trial
  std::uint64_t payload_bits = 64;
  std::uint64_t samples = 100000;

  std::optional<double> walk_p;  // unset runs the grid
  std::optional<std::uint64_t> walk_k;

  std::uint64_t p_samples = 10;  // regularity
  std::uint64_t q = 10;
  std::uint64_t transfer_instances = 10000;

  /// Defaults of the named experiment.
  static ExperimentConfig defaults(const std::string& experiment);

  /// Applies one setting; key is a long flag name without dashes.
  void set(const std::string& key, const std::string& value);

  /// Checks cross-field constraints; throws InvalidArgument.
  void validate() const;

  /// (key, value) pairs in a fixed order, values in `set` syntax.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

namespace detail {

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) {
    throw InvalidArgument("config: bad value for " + key + ": '" + text + "'");
  }
  return value;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw InvalidArgument("config: bad boolean for " + key + ": '" + text + "'");
}

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace detail

inline ExperimentConfig ExperimentConfig::defaults(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  if (experiment == "separation" || experiment == "distinguish") {
    // Member defaults.
  } else if (experiment == "codec") {
    c.n = 8;
    c.trials = 100;
  } else if (experiment == "walk") {
    c.trials = 100000;
  } else if (experiment == "bounds") {
    c.n = 2;
    c.trials = 1;
  } else if (experiment == "regularity") {
    c.n = 8;
  } else {
    throw InvalidArgument("unknown experiment '" + experiment + "'");
  }
  return c;
}

inline void ExperimentConfig::set(const std::string& key, const std::string& value) {
  using detail::parse_bool;
  using detail::parse_number;
  if (key == "experiment") {
    if (value != experiment) throw InvalidArgument("config: experiment is fixed before settings are applied");
  } else if (key == "n") {
    n = parse_number<int>(key, value);
  } else if (key == "train-size") {
    train_size = parse_number<std::uint64_t>(key, value);
  } else if (key == "range-train-size") {
    range_train_size = parse_number<std::uint64_t>(key, value);
  } else if (key == "test-points") {
    test_points = parse_number<std::uint64_t>(key, value);
  } else if (key == "trials") {
    trials = parse_number<std::uint64_t>(key, value);
  } else if (key == "m") {
    m = parse_number<std::uint64_t>(key, value);
  } else if (key == "prg") {
    prg = parse_prg_kind(value);
  } else if (key == "seed") {
    seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "format") {
    format = value;
  } else if (key == "allow-insecure") {
    allow_insecure = parse_bool(key, value);
  } else if (key == "workers") {
    workers = parse_number<unsigned>(key, value);
  } else if (key == "timing") {
    timing = parse_bool(key, value);
  } else if (key == "votes") {
    votes = parse_number<std::uint64_t>(key, value);
  } else if (key == "amplify-mode") {
    if (value == "resample") {
      amplify_mode = AmplifyMode::resample;
    } else if (value == "fixed") {
      amplify_mode = AmplifyMode::fixed;
    } else {
      throw InvalidArgument("config: amplify-mode must be resample or fixed");
    }
  } else if (key == "learner") {
    learner = value;
  } else if (key == "payload") {
    payload = value;
  } else if (key == "payload-bits") {
    payload_bits = parse_number<std::uint64_t>(key, value);
  } else if (key == "samples") {
    samples = parse_number<std::uint64_t>(key, value);
  } else if (key == "walk-p") {
    walk_p = parse_number<double>(key, value);
  } else if (key == "walk-k") {
    walk_k = parse_number<std::uint64_t>(key, value);
  } else if (key == "p-samples") {
    p_samples = parse_number<std::uint64_t>(key, value);
  } else if (key == "q") {
    q = parse_number<std::uint64_t>(key, value);
  } else if (key == "transfer-instances") {
    transfer_instances = parse_number<std::uint64_t>(key, value);
  } else {
    throw InvalidArgument("config: unknown key '" + key + "'");
  }
}

inline void ExperimentConfig::validate() const {
  require(n >= 1 && n <= kMaxInputBits, "config: n must be in [1, 30]");
  require(trials >= 1 && test_points >= 1 && m >= 1, "config: counts must be positive");
  require(format == "csv" || format == "json", "config: format must be csv or json");
  require(workers >= 1, "config: workers must be positive");
  require(votes >= 1 && votes % 2 == 1, "config: votes must be odd");
  if (prg == PrgKind::test && !allow_insecure) {
    throw InvalidArgument("config: the test PRG is insecure and needs allow-insecure");
  }
  if (experiment == "separation") {
    require(n <= 24, "separation: n must be <= 24");
    require(train_size >= 1, "separation: train-size must be positive");
  } else if (experiment == "codec") {
    require(payload_bits >= 1, "codec: payload-bits must be positive");
    require(n <= 26 && payload_bits + 2 <= (std::uint64_t{1} << n), "codec: payload does not fit 2^n outcomes");
    require(samples >= 1, "codec: samples must be positive");
  } else if (experiment == "walk") {
    require(walk_p.has_value() == walk_k.has_value(), "walk: set both walk-p and walk-k, or neither");
  } else if (experiment == "bounds") {
    require(n <= 10, "bounds: n must be <= 10");
  } else if (experiment == "distinguish") {
    require(learner == "lookup" || learner == "majority" || learner == "constant0" || learner == "constant1",
            "distinguish: learner must be lookup, majority, constant0 or constant1");
  } else if (experiment == "regularity") {
    require(n >= 2 && n <= 21, "regularity: n must be in [2, 21]");
    require(p_samples >= 1 && q >= 1, "regularity: p-samples and q must be positive");
  }
}

inline std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> out = {
      {"experiment", experiment},
      {"n", std::to_string(n)},
      {"train-size", std::to_string(train_size)},
      {"range-train-size", std::to_string(range_train_size)},
      {"test-points", std::to_string(test_points)},
      {"trials", std::to_string(trials)},
      {"m", std::to_string(m)},
      {"prg", PrgSpec(prg, 1).name()},
      {"seed", std::to_string(seed)},
      {"format", format},
      {"allow-insecure", allow_insecure ? "true" : "false"},
      {"votes", std::to_string(votes)},
      {"amplify-mode", amplify_mode == AmplifyMode::resample ? "resample" : "fixed"},
      {"learner", learner},
      {"payload", payload},
      {"payload-bits", std::to_string(payload_bits)},
      {"samples", std::to_string(samples)},
      {"walk-p", walk_p ? detail::format_double(*walk_p) : ""},
      {"walk-k", walk_k ? std::to_string(*walk_k) : ""},
      {"p-samples", std::to_string(p_samples)},
      {"q", std::to_string(q)},
      {"transfer-instances", std::to_string(transfer_instances)},
  };
  return out;
}

/// Reads flat "key = value" lines. Blank lines and lines starting with '#'
/// are skipped; later keys override earlier ones.
inline std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string stripped = detail::trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("config line " + std::to_string(number) + ": expected key = value");
    }
    std::string key = detail::trim(std::string_view(stripped).substr(0, eq));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    out[key] = detail::trim(std::string_view(stripped).substr(eq + 1));
  }
  return out;
}

inline std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

/// Defaults of `experiment`, then `file` settings, then `flags`.
inline ExperimentConfig resolve_config(const std::string& experiment,
                                       const std::map<std::string, std::string>& file,
                                       const std::map<std::string, std::string>& flags) {
  ExperimentConfig c = ExperimentConfig::defaults(experiment);
  for (const auto* layer : {&file, &flags}) {
    for (const auto& [key, value] : *layer) {
      if (key == "experiment" || key == "out" || key == "config") continue;
      c.set(key, value);
    }
  }
  c.validate();
  return c;
}

}  // namespace pacshift::harness
