// Scenario runner: executes seeded trials and writes one CSV row per trial.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include "ssbft/harness.hpp"

using namespace ssbft;

namespace {

struct Options {
  std::uint32_t n = 4;
  std::uint32_t t = 1;
  std::uint32_t log_size = 3;
  std::uint32_t index_num = 8;
  std::uint32_t kappa = 0;  // 0: derived
  std::uint64_t rounds = 500;
  std::uint64_t trials = 1;
  std::uint64_t seed = 1;
  std::uint32_t dmax = 3;
  std::string adversary = "silent";
  std::string inject = "none";
  std::string core = "stub";
  std::string out = "results.csv";
  bool trace = false;
  bool strict = false;
};

// Keys mirror the long flag names. Flags given on the command line win.
void apply_config(const std::string& path, CLI::App& run, Options& o) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  const auto j = nlohmann::json::parse(in);
  auto take = [&](const char* key, auto& field) {
    if (!j.contains(key)) return;
    if (run.get_option(std::string("--") + key)->count() > 0) return;
    j.at(key).get_to(field);
  };
  take("n", o.n);
  take("t", o.t);
  take("log-size", o.log_size);
  take("index-num", o.index_num);
  take("kappa", o.kappa);
  take("rounds", o.rounds);
  take("trials", o.trials);
  take("seed", o.seed);
  take("dmax", o.dmax);
  take("adversary", o.adversary);
  take("inject", o.inject);
  take("core", o.core);
  take("out", o.out);
  take("trace", o.trace);
  take("strict", o.strict);
}

int run_command(const Options& o) {
  TrialConfig cfg;
  cfg.params = Params::make(o.n, o.t, o.index_num, o.log_size, o.seed);
  if (o.kappa != 0) cfg.params.kappa = o.kappa;
  cfg.adversary = parse_policy(o.adversary);
  cfg.inject = parse_inject(o.inject);
  if (o.core == "stub") {
    cfg.core = CoreKind::kStub;
  } else if (o.core == "mmr-lite") {
    cfg.core = CoreKind::kMmrLite;
  } else {
    throw ParamError("unknown core: " + o.core);
  }
  cfg.dmax = o.dmax;
  cfg.rounds = o.rounds;

  const auto validation = params_validate(cfg.params);
  for (const auto& w : validation.warnings) std::cerr << "warning: " << w << "\n";
  check_config(cfg);

  std::ofstream csv(o.out);
  if (!csv) {
    std::cerr << "error: cannot write " << o.out << "\n";
    return 2;
  }
  std::ofstream trace_file;
  if (o.trace) {
    trace_file.open(o.out + ".trace");
    if (!trace_file) {
      std::cerr << "error: cannot write " << o.out << ".trace\n";
      return 2;
    }
  }

  csv << csv_header() << "\n";
  std::vector<Metrics> all;
  std::uint64_t violations = 0;
  for (std::uint64_t k = 0; k < o.trials; ++k) {
    TrialConfig trial = cfg;
    trial.params.seed = o.seed + k;
    const Trace trace = run_trial(trial);
    const Metrics m = compute_metrics(trace);
    csv << csv_row(trial, m) << "\n";
    if (o.trace) write_trace(trace_file, trace);
    violations += m.cor.total();
    all.push_back(m);
  }
  write_summary(std::cout, all);
  return (o.strict && violations > 0) ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-stabilizing Byzantine consensus-object recycling simulator"};
  app.require_subcommand(1);

  Options o;
  std::string config_path;
  auto* run = app.add_subcommand("run", "run seeded trials and write a CSV");
  run->add_option("--config", config_path, "JSON file with flag values");
  run->add_option("--n", o.n, "node count");
  run->add_option("--t", o.t, "Byzantine bound");
  run->add_option("--log-size", o.log_size, "retrieval window");
  run->add_option("--index-num", o.index_num, "object array length");
  run->add_option("--kappa", o.kappa, "cycle length (default: derived)");
  run->add_option("--rounds", o.rounds, "rounds per trial");
  run->add_option("--trials", o.trials, "number of trials");
  run->add_option("--seed", o.seed, "seed of the first trial");
  run->add_option("--dmax", o.dmax, "delay bound of the stub core");
  run->add_option("--adversary", o.adversary, "silent|random|equivocate|worst-sig|worst-eig");
  run->add_option("--inject", o.inject, "none|full|targeted");
  run->add_option("--core", o.core, "stub|mmr-lite");
  run->add_option("--out", o.out, "CSV output path");
  run->add_flag("--trace", o.trace, "also write <out>.trace");
  run->add_flag("--strict", o.strict, "exit 1 on post-stabilization violations");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) apply_config(config_path, *run, o);
    return run_command(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
