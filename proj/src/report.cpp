#include "sqba/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace sqba {

Quantiles quantiles(std::vector<double> xs) {
  Quantiles q;
  if (xs.empty()) return q;
  std::sort(xs.begin(), xs.end());
  double sum = 0;
  for (double x : xs) sum += x;
  q.mean = sum / xs.size();
  auto at = [&](double p) {
    const auto idx = static_cast<std::size_t>(std::ceil(p * xs.size())) - 1;
    return xs[std::min(idx, xs.size() - 1)];
  };
  q.p50 = at(0.5);
  q.p90 = at(0.9);
  q.max = xs.back();
  return q;
}

bool Report::exit_ok() const {
  if (violations.safety() != 0) return false;
  if (config.mode == SamplingMode::Conditioned && blocked != 0) return false;
  return true;
}

Report aggregate(const ExperimentConfig& config, const std::vector<RunResult>& results) {
  Report rep;
  rep.config = config;
  rep.runs = static_cast<std::uint32_t>(results.size());
  std::vector<double> words, mean_round, max_round, common;
  double ratio = 0, rejections = 0;
  const double denom = config.params.n * config.params.lambda * config.params.lambda;
  for (const auto& r : results) {
    rep.violations.add(r.violations);
    if (r.blocked) ++rep.blocked;
    if (r.safety_compromised) ++rep.safety_compromised;
    words.push_back(static_cast<double>(r.words));
    if (denom > 0) ratio += r.words / denom;
    rejections += static_cast<double>(r.committee_rejections);
    if (r.max_decision_round) {
      mean_round.push_back(r.mean_decision_round);
      max_round.push_back(*r.max_decision_round);
    }
    if (r.all_round_one) ++rep.round_one_runs;
    if (config.protocol == Protocol::Coin) {
      if (r.coin.all_agree && r.coin.bit == false) ++rep.coin_all_zero;
      if (r.coin.all_agree && r.coin.bit == true) ++rep.coin_all_one;
      if (r.coin.vmin_common) ++rep.coin_vmin_common;
      common.push_back(r.coin.common_values);
    }
    rep.qc_rejections += r.qc_rejections;
    if (r.waited_for_qc) ++rep.waited_for_qc;
  }
  rep.words = quantiles(words);
  rep.mean_decision_round = quantiles(mean_round);
  rep.max_decision_round = quantiles(max_round);
  rep.coin_common_values = quantiles(common);
  if (!results.empty()) {
    rep.words_per_n_lambda2 = ratio / results.size();
    rep.committee_rejections_mean = rejections / results.size();
  }
  return rep;
}

namespace {

nlohmann::ordered_json quantiles_json(const Quantiles& q) {
  return {{"mean", q.mean}, {"p50", q.p50}, {"p90", q.p90}, {"max", q.max}};
}

nlohmann::ordered_json violations_json(const Violations& v) {
  return {{"validity", v.validity},
          {"agreement", v.agreement},
          {"termination", v.termination},
          {"graded_agreement", v.graded_agreement},
          {"unique_qc", v.unique_qc},
          {"coin_common", v.coin_common},
          {"est_lock", v.est_lock},
          {"two_values", v.two_values},
          {"qc_evidence", v.qc_evidence},
          {"audit", v.audit},
          {"safety_total", v.safety()}};
}

}  // namespace

std::string report_json(const Report& rep, const std::vector<RunResult>& results) {
  const auto& c = rep.config;
  const auto& p = c.params;
  nlohmann::ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["config"] = {{"protocol", protocol_name(c.protocol)},
                 {"n", p.n},
                 {"f", p.f},
                 {"epsilon", p.epsilon},
                 {"d", p.d},
                 {"lambda", p.lambda},
                 {"W", p.W},
                 {"B", p.B},
                 {"rho", p.rho},
                 {"mode", mode_name(c.mode)},
                 {"adversary", c.adversary},
                 {"inputs", c.inputs.empty() ? default_inputs(c.protocol) : c.inputs},
                 {"seed", c.seed},
                 {"runs", c.runs},
                 {"round_cap", c.round_cap}};
  nlohmann::ordered_json s;
  s["runs"] = rep.runs;
  s["violations"] = violations_json(rep.violations);
  s["blocked"] = rep.blocked;
  s["safety_compromised"] = rep.safety_compromised;
  s["words"] = quantiles_json(rep.words);
  s["words_per_n_lambda2"] = rep.words_per_n_lambda2;
  if (c.protocol == Protocol::Binary || c.protocol == Protocol::Multivalued) {
    s["mean_decision_round"] = quantiles_json(rep.mean_decision_round);
    s["max_decision_round"] = quantiles_json(rep.max_decision_round);
    s["round_one_runs"] = rep.round_one_runs;
  }
  if (c.protocol == Protocol::Coin) {
    const double n = rep.runs ? rep.runs : 1;
    s["coin"] = {{"all_zero", rep.coin_all_zero},
                 {"all_one", rep.coin_all_one},
                 {"p_all_zero", rep.coin_all_zero / n},
                 {"p_all_one", rep.coin_all_one / n},
                 {"vmin_common_runs", rep.coin_vmin_common},
                 {"common_values", quantiles_json(rep.coin_common_values)},
                 {"common_value_bound", common_value_bound(p.d, p.lambda)}};
  }
  if (c.protocol == Protocol::Multivalued) {
    s["qc_rejections"] = rep.qc_rejections;
    s["runs_waiting_for_qc"] = rep.waited_for_qc;
  }
  s["committee_rejections_mean"] = rep.committee_rejections_mean;
  s["exit_ok"] = rep.exit_ok();
  j["summary"] = s;

  auto& runs = j["runs"] = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    nlohmann::ordered_json row;
    row["seed"] = r.seed;
    row["blocked"] = r.blocked;
    if (r.blocked) row["block_reason"] = r.block_reason;
    row["decided"] = r.decided;
    row["words"] = r.words;
    row["steps"] = r.steps;
    row["corrupted"] = r.corrupted;
    if (r.max_decision_round) row["max_decision_round"] = *r.max_decision_round;
    row["safety_violations"] = r.violations.safety();
    std::ostringstream d;
    d << std::hex << r.digest;
    row["trace_digest"] = d.str();
    runs.push_back(std::move(row));
  }
  return j.dump(2) + "\n";
}

std::string report_csv(const std::vector<RunResult>& results) {
  std::ostringstream out;
  out << "schema_version,seed,blocked,block_reason,decided,words,steps,deliveries,corrupted,max_decision_round,"
         "mean_decision_round,coin_all_agree,coin_bit,coin_common_values,qc_values,validity,agreement,termination,"
         "graded_agreement,unique_qc,coin_common,est_lock,two_values,qc_evidence,audit,trace_digest\n";
  for (const auto& r : results) {
    const auto& v = r.violations;
    out << kReportSchemaVersion << ',' << r.seed << ',' << (r.blocked ? 1 : 0) << ',' << r.block_reason << ','
        << '"' << r.decided << '"' << ',' << r.words << ',' << r.steps << ',' << r.deliveries << ',' << r.corrupted
        << ',' << (r.max_decision_round ? std::to_string(*r.max_decision_round) : "") << ','
        << r.mean_decision_round << ',' << (r.coin.all_agree ? 1 : 0) << ','
        << (r.coin.bit ? std::to_string(*r.coin.bit ? 1 : 0) : "") << ',' << r.coin.common_values << ','
        << r.qc_values << ',' << v.validity << ',' << v.agreement << ',' << v.termination << ','
        << v.graded_agreement << ',' << v.unique_qc << ',' << v.coin_common << ',' << v.est_lock << ','
        << v.two_values << ',' << v.qc_evidence << ',' << v.audit << ',' << std::hex << r.digest << std::dec << '\n';
  }
  return out.str();
}

std::vector<ScalingRow> scaling_table(const std::vector<Report>& reports) {
  std::vector<ScalingRow> rows;
  for (const auto& rep : reports) {
    const auto& p = rep.config.params;
    rows.push_back({p.n, p.lambda, rep.words.mean, rep.words_per_n_lambda2});
  }
  return rows;
}

}  // namespace sqba
