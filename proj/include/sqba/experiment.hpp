#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sqba/protocols.hpp"

namespace sqba {

/// Input specs: unanimous:V | split:V1,V2,... | list:V0,...,Vn-1 | random:V1,V2,...
/// "_" denotes bottom. Throws std::invalid_argument on malformed specs.
std::vector<Value> parse_inputs(std::string_view spec, std::uint32_t n, std::uint64_t seed);

std::string default_inputs(Protocol protocol);

struct ExperimentConfig {
  Protocol protocol = Protocol::Binary;
  SystemParams params;
  SamplingMode mode = SamplingMode::Conditioned;
  std::uint32_t round_cap = 200;
  std::string adversary = "none";
  std::string inputs;  // empty selects default_inputs(protocol)
  std::uint64_t seed = 1;
  std::uint32_t runs = 1;
  std::uint64_t staleness = 0;
  bool record = false;
};

struct Violations {
  std::uint32_t validity = 0;
  std::uint32_t agreement = 0;
  std::uint32_t termination = 0;
  std::uint32_t graded_agreement = 0;
  std::uint32_t unique_qc = 0;
  std::uint32_t coin_common = 0;
  std::uint32_t est_lock = 0;
  std::uint32_t two_values = 0;
  std::uint32_t qc_evidence = 0;
  std::uint32_t audit = 0;

  std::uint32_t safety() const {
    return validity + agreement + graded_agreement + unique_qc + coin_common + est_lock + two_values + qc_evidence +
           audit;
  }
  void add(const Violations& o);
};

struct CoinObservation {
  bool all_agree = false;
  std::optional<bool> bit;     // common output when all agree
  bool vmin_common = false;    // v_min reached >= B+1 correct second members in phase 1
  bool vmin_lsb = false;
  std::uint32_t vmin_receivers = 0;
  std::uint32_t common_values = 0;  // c
};

struct RunResult {
  std::uint64_t seed = 0;
  bool blocked = false;
  std::string block_reason;
  bool safety_compromised = false;
  bool unanimous = false;  // all correct inputs equal
  bool all_correct = true;  // nobody corrupted
  Violations violations;

  std::vector<DecisionRecord> decisions;
  std::uint32_t correct = 0;
  std::uint32_t corrupted = 0;
  std::uint64_t words = 0;
  std::uint64_t steps = 0;
  std::uint64_t deliveries = 0;
  std::uint64_t forced = 0;
  std::uint64_t digest = 0;
  std::uint64_t committees = 0;
  std::uint64_t committee_rejections = 0;

  std::optional<std::uint32_t> max_decision_round;
  double mean_decision_round = 0.0;
  bool all_round_one = false;
  std::string decided;  // common decision display, empty if none or split

  CoinObservation coin;
  std::uint32_t qc_values = 0;
  std::uint32_t qc_rejections = 0;
  bool waited_for_qc = false;

  std::string trace_jsonl;  // only when recording
};

RunResult run_experiment(const ExperimentConfig& config, std::uint64_t seed);

/// Runs seeds config.seed .. config.seed + runs - 1; results in seed order.
std::vector<RunResult> run_batch(const ExperimentConfig& config, unsigned threads = 1);

}  // namespace sqba
