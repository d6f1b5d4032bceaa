// Command-line runner: one experiment per invocation.
//
//   pacshift separation --n 16 --trials 10000 --format json --out sep.json
//   pacshift --config run.cfg --seed 7
//
// Settings resolve as flags, then --config file keys, then the experiment's
// defaults. The effective configuration is echoed on stderr and embedded in
// the report.

#include <chrono>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pacshift/pacshift.hpp"

namespace {

struct FlagSpec {
  const char* name;
  const char* help;
};

constexpr FlagSpec kValueFlags[] = {
    {"n", "input width in bits"},
    {"train-size", "training samples per trial"},
    {"range-train-size", "separation: training samples of the uniform-range arm"},
    {"test-points", "test points per trial"},
    {"trials", "Monte-Carlo trials"},
    {"m", "precision parameter"},
    {"prg", "hash | test"},
    {"seed", "master seed (unsigned 64-bit)"},
    {"format", "csv | json"},
    {"workers", "worker threads; results do not depend on it"},
    {"votes", "odd vote count for majority amplification"},
    {"amplify-mode", "resample | fixed"},
    {"learner", "distinguish: lookup | majority | constant0 | constant1"},
    {"payload", "codec: payload as hex, first digit holds bits 0..3 MSB first"},
    {"payload-bits", "codec: payload length in bits"},
    {"samples", "codec: samples per trial"},
    {"walk-p", "walk: success probability (with --walk-k; default runs a grid)"},
    {"walk-k", "walk: target level"},
    {"p-samples", "regularity: samples from the tested distribution"},
    {"q", "regularity: inverse failure probability"},
    {"transfer-instances", "regularity: random expectation-transfer instances"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distribution-shift learning experiments"};
  std::string experiment;
  std::string out_path;
  std::string config_path;
  bool allow_insecure = false;
  bool timing = false;
  app.add_option("experiment_name", experiment, "separation | codec | walk | bounds | distinguish | regularity");
  app.add_option("--experiment", experiment, "same as the positional argument");
  app.add_option("--out", out_path, "write the report here instead of stdout");
  app.add_option("--config", config_path, "flat key = value file; keys are flag names");
  app.add_flag("--allow-insecure", allow_insecure, "permit the insecure test PRG");
  app.add_flag("--timing", timing, "add wall-clock seconds to the report");
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> options;
  for (const auto& f : kValueFlags) {
    options.emplace_back(f.name, app.add_option(std::string("--") + f.name, values[f.name], f.help));
  }
  CLI11_PARSE(app, argc, argv);

  try {
    std::map<std::string, std::string> file;
    if (!config_path.empty()) file = pacshift::harness::read_config_file(config_path);
    if (experiment.empty() && file.count("experiment")) experiment = file.at("experiment");
    if (experiment.empty()) throw pacshift::InvalidArgument("no experiment given");
    if (out_path.empty() && file.count("out")) out_path = file.at("out");

    std::map<std::string, std::string> flags;
    for (const auto& [name, option] : options) {
      if (option->count() > 0) flags[name] = values[name];
    }
    if (allow_insecure) flags["allow-insecure"] = "true";
    if (timing) flags["timing"] = "true";

    const auto cfg = pacshift::harness::resolve_config(experiment, file, flags);
    for (const auto& [k, v] : cfg.echo()) std::cerr << k << " = " << v << '\n';
    std::cerr << "workers = " << cfg.workers << '\n';

    const auto start = std::chrono::steady_clock::now();
    const auto report = pacshift::harness::run_experiment(cfg, pacshift::Execution{cfg.workers});
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    const std::string text = pacshift::harness::emit(report, cfg.format);

    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw pacshift::InvalidArgument("cannot write '" + out_path + "'");
      out << text;
    }
    std::cerr << "elapsed_seconds = " << elapsed.count() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
