#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sqba/experiment.hpp"

namespace sqba {

inline constexpr int kReportSchemaVersion = 1;

struct Quantiles {
  double mean = 0, p50 = 0, p90 = 0, max = 0;
};

Quantiles quantiles(std::vector<double> xs);

struct Report {
  ExperimentConfig config;
  std::uint32_t runs = 0;
  Violations violations;
  std::uint32_t blocked = 0;
  std::uint32_t safety_compromised = 0;

  Quantiles words;
  double words_per_n_lambda2 = 0;  // mean of words / (n * lambda^2)
  Quantiles mean_decision_round;
  Quantiles max_decision_round;
  std::uint32_t round_one_runs = 0;

  std::uint32_t coin_all_zero = 0;
  std::uint32_t coin_all_one = 0;
  std::uint32_t coin_vmin_common = 0;
  Quantiles coin_common_values;

  std::uint32_t qc_rejections = 0;
  std::uint32_t waited_for_qc = 0;
  double committee_rejections_mean = 0;

  bool exit_ok() const;
};

Report aggregate(const ExperimentConfig& config, const std::vector<RunResult>& results);

std::string report_json(const Report& report, const std::vector<RunResult>& results);
std::string report_csv(const std::vector<RunResult>& results);

/// Scaling table: one row per configuration, words/(n*lambda^2).
struct ScalingRow {
  std::uint32_t n = 0;
  double lambda = 0;
  double mean_words = 0;
  double ratio = 0;
};

std::vector<ScalingRow> scaling_table(const std::vector<Report>& reports);

}  // namespace sqba
