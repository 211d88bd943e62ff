// Experiment runner: sweeps seeds for one protocol/adversary configuration and
// writes a JSON or CSV report (plus optional JSONL traces).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "sqba/adversary.hpp"
#include "sqba/experiment.hpp"
#include "sqba/params.hpp"
#include "sqba/report.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitViolations = 1;
constexpr int kExitConfig = 2;

int config_error(const std::string& what) {
  std::cerr << "config error: " << what << "\n";
  return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subquadratic Byzantine agreement simulator"};
  std::string protocol = "multivalued";
  std::uint32_t n = 0;
  double epsilon = 0;
  double d = 0;
  std::uint64_t seed = 1;
  long long runs = 1;
  std::string adversary = "none";
  std::string mode = "conditioned";
  std::uint32_t round_cap = 200;
  std::string inputs;
  std::string out_dir;
  std::string format = "json";
  unsigned threads = 1;
  std::uint64_t staleness = 0;
  long long trace_runs = 0;

  app.add_option("--protocol", protocol, "approver | coin | binary | multivalued")->capture_default_str();
  app.add_option("--n", n, "process count")->required();
  app.add_option("--epsilon", epsilon, "resilience slack, 1/(2 ln n) < epsilon < 1/3")->required();
  app.add_option("--d", d, "sampling slack, max{1/lambda, 0.0362} < d < epsilon/3 - 1/(3 lambda)")->required();
  app.add_option("--seed", seed, "first seed")->capture_default_str();
  app.add_option("--runs", runs, "number of seeds")->capture_default_str();
  app.add_option("--adversary", adversary, "NAME[:opts], one of none crash equivocate qc_withhold coin_splitter alert_skew")
      ->capture_default_str();
  app.add_option("--mode", mode, "faithful | conditioned")->capture_default_str();
  app.add_option("--round-cap", round_cap, "highest binary round a process may start")->capture_default_str();
  app.add_option("--inputs", inputs, "unanimous:V | split:V1,V2,.. | list:V0,..,Vn-1 | random:V1,V2,.. (_ = bottom)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--format", format, "json | csv")->capture_default_str();
  app.add_option("--threads", threads, "worker threads")->capture_default_str();
  app.add_option("--staleness", staleness, "forced-delivery bound in steps (0 = 10 n lambda)")->capture_default_str();
  app.add_option("--trace", trace_runs, "write JSONL traces for the first K runs (needs --out)")->capture_default_str();
  app.set_config("--config", "", "key = value file with the same keys as the flags");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  sqba::ExperimentConfig cfg;
  try {
    cfg.protocol = sqba::parse_protocol(protocol);
    cfg.params = sqba::derive_params(n, epsilon, d);
  } catch (const std::exception& e) {
    return config_error(e.what());
  }
  if (runs <= 0) return config_error("--runs must be at least 1");
  if (round_cap < 1) return config_error("--round-cap must be at least 1");
  if (mode == "conditioned") {
    cfg.mode = sqba::SamplingMode::Conditioned;
  } else if (mode == "faithful") {
    cfg.mode = sqba::SamplingMode::Faithful;
  } else {
    return config_error("--mode must be faithful or conditioned");
  }
  if (format != "json" && format != "csv") return config_error("--format must be json or csv");
  if (trace_runs > 0 && out_dir.empty()) return config_error("--trace needs --out");
  try {
    (void)sqba::make_adversary(adversary);
    if (!inputs.empty()) (void)sqba::parse_inputs(inputs, n, seed);
  } catch (const std::exception& e) {
    return config_error(e.what());
  }
  cfg.adversary = adversary;
  cfg.inputs = inputs;
  cfg.seed = seed;
  cfg.runs = static_cast<std::uint32_t>(runs);
  cfg.round_cap = round_cap;
  cfg.staleness = staleness;

  std::vector<sqba::RunResult> results;
  try {
    results = sqba::run_batch(cfg, std::max(1u, threads));
  } catch (const sqba::BudgetExceeded& e) {
    return config_error(e.what());
  } catch (const sqba::GuardCapExceeded& e) {
    return config_error(e.what());
  } catch (const std::invalid_argument& e) {
    return config_error(e.what());
  }
  const auto report = sqba::aggregate(cfg, results);
  const std::string body = format == "json" ? sqba::report_json(report, results) : sqba::report_csv(results);

  if (out_dir.empty()) {
    std::cout << body;
  } else {
    fs::create_directories(out_dir);
    std::ofstream(fs::path(out_dir) / ("report." + format)) << body;
    auto traced = cfg;
    traced.record = true;
    for (long long i = 0; i < std::min<long long>(trace_runs, runs); ++i) {
      const auto r = sqba::run_experiment(traced, seed + static_cast<std::uint64_t>(i));
      std::ofstream(fs::path(out_dir) / ("trace-" + std::to_string(r.seed) + ".jsonl")) << r.trace_jsonl;
    }
    std::cerr << "runs=" << report.runs << " safety_violations=" << report.violations.safety()
              << " blocked=" << report.blocked << " report=" << (fs::path(out_dir) / ("report." + format)).string()
              << "\n";
  }
  return report.exit_ok() ? 0 : kExitViolations;
}
