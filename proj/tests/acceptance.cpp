// Acceptance run: one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "sqba/adversary.hpp"
#include "sqba/committee.hpp"
#include "sqba/crypto.hpp"
#include "sqba/experiment.hpp"
#include "sqba/params.hpp"
#include "sqba/report.hpp"

using namespace sqba;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

double scale = 1.0;
unsigned threads = 1;

std::uint32_t scaled(std::uint32_t runs) { return std::max<std::uint32_t>(1, std::lround(runs * scale)); }

// Seeds replayed by criterion 10, keyed by suite.
struct Sample {
  ExperimentConfig config;
  std::uint64_t seed;
  std::uint64_t digest;
};
std::map<std::string, std::vector<Sample>> replay_samples;

void keep_samples(const std::string& suite, const ExperimentConfig& cfg, const std::vector<RunResult>& rs) {
  auto& v = replay_samples[suite];
  for (const auto& r : rs) {
    const bool failing = r.violations.safety() != 0 || r.blocked;
    if (failing) {
      v.insert(v.begin(), {cfg, r.seed, r.digest});
    } else if (v.size() < 3) {
      v.push_back({cfg, r.seed, r.digest});
    }
  }
}

std::vector<RunResult> suite_batch(const std::string& suite, const ExperimentConfig& cfg) {
  auto rs = run_batch(cfg, threads);
  keep_samples(suite, cfg, rs);
  return rs;
}

SystemParams main_params() { return derive_params(256, 0.25, 0.05); }

// Independent long-double evaluation.
struct Ref {
  long double lambda;
  std::uint32_t W, B, f;
};

Ref reference(std::uint32_t n, double eps, double d) {
  const long double ld = d;
  const long double lambda = 8.0L * std::log(static_cast<long double>(n));
  return {lambda, static_cast<std::uint32_t>(std::ceil((2.0L / 3.0L + 3.0L * ld) * lambda)),
          static_cast<std::uint32_t>(std::floor((1.0L / 3.0L - ld) * lambda)),
          static_cast<std::uint32_t>(std::floor((1.0L / 3.0L - static_cast<long double>(eps)) * n))};
}

Outcome criterion1() {
  std::mt19937_64 gen(101);
  int checked = 0, mismatches = 0;
  while (checked < 50) {
    const std::uint32_t n = 16 + static_cast<std::uint32_t>(gen() % 200000);
    const double eps = std::uniform_real_distribution<double>(0.02, 0.33)(gen);
    const double d = std::uniform_real_distribution<double>(0.037, 0.12)(gen);
    SystemParams p;
    try {
      p = derive_params(n, eps, d);
    } catch (const ParamsError&) {
      continue;
    }
    const auto r = reference(n, eps, d);
    if (p.W != r.W || p.B != r.B || p.f != r.f || std::fabs(p.lambda - static_cast<double>(r.lambda)) > 1e-9) {
      ++mismatches;
    }
    ++checked;
  }
  return {mismatches == 0, std::to_string(checked) + " triples, " + std::to_string(mismatches) + " mismatches"};
}

Outcome criterion2() {
  const long double d = 0.05L;
  const long double rho = (18 * d * d + 27 * d - 1) / (3 * (5 + 6 * d) * (1 - d) * (1 + 9 * d));
  const double got = coin_success_rate(0.05);
  // Positive root of 18d^2 + 27d - 1 by bisection.
  long double lo = 0, hi = 1.0L / 3.0L;
  for (int i = 0; i < 200; ++i) {
    const long double mid = (lo + hi) / 2;
    (18 * mid * mid + 27 * mid - 1 < 0 ? lo : hi) = mid;
  }
  const bool ok = std::fabs(got - 0.018035) <= 1e-6 && std::fabs(got - static_cast<double>(rho)) <= 1e-12 &&
                  std::fabs(static_cast<double>(lo) - 0.036166) <= 1e-6 && lo < kMinSamplingSlack &&
                  coin_success_rate(kMinSamplingSlack) > 0 && coin_success_rate(static_cast<double>(lo) - 1e-6) < 0;
  char buf[160];
  std::snprintf(buf, sizeof buf, "rho(0.05)=%.9f reference=%.9Lf root=%.7Lf", got, rho, lo);
  return {ok, buf};
}

Outcome criterion3() {
  std::mt19937_64 gen(303);
  int checked = 0, exceptions = 0;
  double min5 = 1e18, min6 = 1e18;
  while (checked < 1000) {
    const std::uint32_t n = 16 + static_cast<std::uint32_t>(gen() % 1000000);
    const double eps = std::uniform_real_distribution<double>(0.01, 0.33)(gen);
    const double d = std::uniform_real_distribution<double>(0.0362, 0.2)(gen);
    SystemParams p;
    try {
      p = derive_params(n, eps, d);
    } catch (const ParamsError&) {
      continue;
    }
    const auto m = intersection_margins(p);
    min5 = std::min(min5, m.s5);
    min6 = std::min(min6, m.s6);
    if (m.s5 < 1 || m.s6 < 1) ++exceptions;
    ++checked;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d sets, %d exceptions, min s5=%.3f min s6=%.3f", checked, exceptions, min5, min6);
  return {exceptions == 0, buf};
}

Outcome criterion4() {
  std::uint32_t validity = 0, graded = 0, other = 0, unreturned = 0, runs = 0;
  for (const char* adv : {"none", "crash", "equivocate"}) {
    for (const char* in : {"unanimous:1", "split:0,1"}) {
      ExperimentConfig cfg;
      cfg.protocol = Protocol::Approver;
      cfg.params = main_params();
      cfg.adversary = adv;
      cfg.inputs = in;
      cfg.runs = scaled(500);
      cfg.seed = 1 + (in[0] == 's' ? 500 : 0);
      for (const auto& r : suite_batch("approver", cfg)) {
        ++runs;
        validity += r.violations.validity;
        graded += r.violations.graded_agreement;
        other += r.violations.safety() - r.violations.validity - r.violations.graded_agreement;
        if (r.blocked || r.violations.termination) ++unreturned;
        if (in[0] == 'u' && r.decided != "{1}") ++validity;
      }
    }
  }
  std::ostringstream s;
  s << runs << " runs, validity=" << validity << " graded=" << graded << " other=" << other
    << " unreturned=" << unreturned;
  return {validity + graded + other + unreturned == 0, s.str()};
}

Outcome criterion5() {
  const auto p = main_params();
  bool ok = true;
  std::ostringstream s;
  for (const char* adv : {"none", "coin_splitter"}) {
    ExperimentConfig cfg;
    cfg.protocol = Protocol::Coin;
    cfg.params = p;
    cfg.adversary = adv;
    cfg.runs = scaled(2000);
    const auto rs = suite_batch("coin", cfg);
    const auto rep = aggregate(cfg, rs);
    std::uint32_t exceptions = rep.violations.safety();
    for (const auto& r : rs) {
      if (r.coin.vmin_common && !(r.coin.all_agree && r.coin.bit == r.coin.vmin_lsb)) ++exceptions;
      if (r.blocked) ++exceptions;
    }
    const double m = rep.runs;
    for (std::uint32_t k : {rep.coin_all_zero, rep.coin_all_one}) {
      const double ph = k / m;
      if (ph < p.rho - 3 * std::sqrt(ph * (1 - ph) / m)) ok = false;
    }
    if (exceptions) ok = false;
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s: P0=%.4f P1=%.4f vmin_common=%u exceptions=%u; ", adv,
                  rep.coin_all_zero / m, rep.coin_all_one / m, rep.coin_vmin_common, exceptions);
    s << buf;
  }
  s << "rho=" << p.rho;
  return {ok, s.str()};
}

Outcome criterion6() {
  const auto p = main_params();
  std::uint32_t agreement = 0, other = 0, unanimous_runs = 0, unanimous_bad = 0, blocked = 0, runs = 0;
  double round_sum = 0;
  std::uint32_t decided_runs = 0;
  for (const auto& adv : adversary_names()) {
    std::uint64_t first_seed = 1;
    for (const char* in : {"unanimous:0", "unanimous:1", "split:0,1", "random:0,1"}) {
      ExperimentConfig cfg;
      cfg.protocol = Protocol::Binary;
      cfg.params = p;
      cfg.adversary = adv;
      cfg.inputs = in;
      cfg.runs = scaled(250);
      cfg.seed = first_seed;
      first_seed += cfg.runs;
      const bool unanimous = in[0] == 'u';
      for (const auto& r : suite_batch("binary", cfg)) {
        ++runs;
        agreement += r.violations.agreement;
        other += r.violations.safety() - r.violations.agreement;
        if (r.blocked) ++blocked;
        if (unanimous) {
          ++unanimous_runs;
          if (!r.all_round_one || r.decided != std::string(in).substr(10)) ++unanimous_bad;
        }
        if (r.max_decision_round) {
          round_sum += r.mean_decision_round;
          ++decided_runs;
        }
      }
    }
  }
  const double mean_round = decided_runs ? round_sum / decided_runs : 0;
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "%u runs, agreement=%u other_safety=%u blocked=%u unanimous_not_round1=%u/%u mean_round=%.3f "
                "bound=%.2f",
                runs, agreement, other, blocked, unanimous_bad, unanimous_runs, mean_round, 1 / p.rho);
  return {agreement + other + blocked + unanimous_bad == 0 && mean_round <= 1 / p.rho, buf};
}

Outcome criterion7() {
  const auto p = main_params();
  std::uint32_t agreement = 0, unique_qc = 0, other = 0, blocked = 0, runs = 0, unanimous_runs = 0, unanimous_bad = 0;
  for (const auto& adv : adversary_names()) {
    for (const char* in : {"unanimous:tx-block-A", "split:x,y", "split:x,y,z"}) {
      ExperimentConfig cfg;
      cfg.protocol = Protocol::Multivalued;
      cfg.params = p;
      cfg.adversary = adv;
      cfg.inputs = in;
      cfg.runs = scaled(1000);
      for (const auto& r : suite_batch("multivalued", cfg)) {
        ++runs;
        agreement += r.violations.agreement;
        unique_qc += r.violations.unique_qc + (r.qc_values > 1);
        other += r.violations.safety() - r.violations.agreement - r.violations.unique_qc;
        if (r.blocked) ++blocked;
        if (in[0] == 'u' && r.all_correct) {
          ++unanimous_runs;
          if (r.decided != "tx-block-A") ++unanimous_bad;
        }
      }
    }
  }
  std::ostringstream s;
  s << runs << " runs, agreement=" << agreement << " unique_qc=" << unique_qc << " other_safety=" << other
    << " blocked=" << blocked << " all-correct unanimous wrong=" << unanimous_bad << "/" << unanimous_runs;
  return {agreement + unique_qc + other + blocked + unanimous_bad == 0, s.str()};
}

Outcome criterion8() {
  std::vector<Report> reports;
  std::uint32_t bad = 0;
  for (std::uint32_t n : {64u, 128u, 256u, 512u}) {
    ExperimentConfig cfg;
    cfg.protocol = Protocol::Multivalued;
    cfg.params = derive_params(n, 0.25, 0.05);
    cfg.runs = scaled(200);
    const auto rs = suite_batch("scaling", cfg);
    for (const auto& r : rs) bad += r.violations.safety() + r.blocked;
    reports.push_back(aggregate(cfg, rs));
  }
  double lo = 1e300, hi = 0;
  std::ostringstream s;
  for (const auto& row : scaling_table(reports)) {
    lo = std::min(lo, row.ratio);
    hi = std::max(hi, row.ratio);
    s << "n=" << row.n << ":" << row.ratio << " ";
  }
  s << "band=" << hi / lo;
  return {hi / lo < 2 && bad == 0, s.str()};
}

Outcome criterion9() {
  const auto p = derive_params(200, 0.25, 0.05);
  const auto keys = KeyRegistry::generate(p.n, 909);
  const int samples = 5000;
  int failures = 0;
  for (int t = 0; t < samples; ++t) {
    const auto tag = "acceptance/s3/" + std::to_string(t);
    if (!realize_committee(keys, p, tag, tag, nullptr).events.s3) ++failures;
  }
  const double oracle = binomial_tail(p.n, p.sampling_probability(), p.W - 1, TailSide::Lower);
  const double rate = static_cast<double>(failures) / samples;
  const double se = std::sqrt(oracle * (1 - oracle) / samples);
  char buf[160];
  std::snprintf(buf, sizeof buf, "empirical=%.4f oracle=%.4f se=%.4f z=%.2f", rate, oracle, se, (rate - oracle) / se);
  return {std::fabs(rate - oracle) <= 3 * se, buf};
}

Outcome criterion10() {
  int replayed = 0, mismatches = 0;
  for (auto& [suite, samples] : replay_samples) {
    const std::size_t k = std::min<std::size_t>(3, samples.size());  // failing seeds sit in front
    for (auto s : std::vector<Sample>(samples.begin(), samples.begin() + k)) {
      s.config.record = true;
      const auto a = run_experiment(s.config, s.seed);
      const auto b = run_experiment(s.config, s.seed);
      if (a.trace_jsonl.empty() || a.trace_jsonl != b.trace_jsonl || a.digest != s.digest || b.digest != s.digest) {
        ++mismatches;
      }
      ++replayed;
    }
  }
  return {replayed > 0 && mismatches == 0,
          std::to_string(replayed) + " traces over " + std::to_string(replay_samples.size()) + " suites, " +
              std::to_string(mismatches) + " mismatches"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance run"};
  std::vector<int> only;
  app.add_option("--scale", scale, "multiplier on Monte Carlo run counts")->check(CLI::PositiveNumber);
  app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 256u));
  app.add_option("--only", only, "criteria to run")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  struct Criterion {
    int id;
    const char* name;
    double limit_s;  // runtime limit
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "parameter formulas", 1, criterion1},
      {2, "analytic constants", 1, criterion2},
      {3, "intersection margins", 5, criterion3},
      {4, "approver suite", 300, criterion4},
      {5, "coin suite", 600, criterion5},
      {6, "binary suite", 900, criterion6},
      {7, "multivalued suite", 900, criterion7},
      {8, "word complexity", 1200, criterion8},
      {9, "faithful committee statistics", 60, criterion9},
      {10, "deterministic replay", 600, criterion10},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_s * std::max(1.0, scale);
    const bool pass = o.ok && in_time;
    if (!pass) ++failed;
    std::printf("%s criterion %d: %s (%s; %.2fs, limit %.0fs%s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.limit_s, in_time ? "" : ", over time");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
