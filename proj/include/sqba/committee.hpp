#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sqba/crypto.hpp"
#include "sqba/params.hpp"

namespace sqba {

enum class SamplingMode { Faithful, Conditioned };

std::string_view mode_name(SamplingMode mode);

/// Which of the committee good events hold for one realized committee.
struct GoodEvents {
  bool s1 = false;  // |C| <= (1+d) lambda
  bool s2 = false;  // |C| >= (1-d) lambda
  bool s3 = false;  // correct members >= W
  bool s4 = false;  // Byzantine members <= B
  bool s5 = false;  // any two W-subsets share >= B+1 members: 2W - |C| >= B+1
  bool s6 = false;  // any (B+1)-subset meets any W-subset: W + B + 1 - |C| >= 1
  bool all() const { return s1 && s2 && s3 && s4 && s5 && s6; }
};

GoodEvents check_good_events(const SystemParams& p, std::uint32_t size, std::uint32_t correct,
                             std::uint32_t byzantine);

struct CommitteeRecord {
  Bytes base_tag;
  Bytes effective_tag;
  std::vector<std::uint8_t> members;  // indexed by process id
  std::uint32_t size = 0;
  std::uint32_t correct = 0;
  std::uint32_t byzantine = 0;
  std::uint32_t rejections = 0;  // conditioned resamples before acceptance
  GoodEvents events;
};

class GuardCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using ByzantineFn = std::function<bool(ProcessId)>;

/// Effective committee string for resample attempt `nonce` (nonce 0 is the base tag).
Bytes resampled_tag(std::string_view base_tag, std::uint64_t nonce);

/// Realizes C(tag, lambda) for every process and counts correct/Byzantine members.
CommitteeRecord realize_committee(const KeyRegistry& keys, const SystemParams& p, std::string_view base_tag,
                                  std::string_view effective_tag, const ByzantineFn& is_byzantine);

/// Test-mode conditioning: resamples (advancing the nonce sub-seed) until the
/// realized committee satisfies every good event. Committees with lambda >= n
/// are deterministic and returned as-is.
CommitteeRecord conditioned_sampling_guard(const KeyRegistry& keys, const SystemParams& p,
                                           std::string_view base_tag, const ByzantineFn& is_byzantine,
                                           std::uint32_t rejection_cap = 100000);

/// Per-run committee registry. Committees are fixed on first use; in
/// conditioned mode that is when the guard runs against the corruption set of
/// that moment.
class CommitteeOracle {
 public:
  CommitteeOracle(const KeyRegistry& keys, const SystemParams& params, SamplingMode mode, ByzantineFn is_byzantine,
                  std::uint32_t rejection_cap = 100000);

  const CommitteeRecord& resolve(std::string_view base_tag);
  bool is_member(ProcessId pid, std::string_view base_tag) { return resolve(base_tag).members[pid] != 0; }

  /// Election proof for pid on base_tag; no proof when pid is not elected.
  SampleResult sample(ProcessId pid, std::string_view base_tag);
  bool committee_val(std::string_view base_tag, ProcessId pid, const CommitteeProof& proof);

  SamplingMode mode() const { return mode_; }
  const SystemParams& params() const { return params_; }
  const std::vector<CommitteeRecord*>& fixed_in_order() const { return order_; }

  /// Moves pid from correct to Byzantine in every committee fixed so far.
  void note_corruption(ProcessId pid);
  /// Whether every fixed committee would still meet all good events with pid Byzantine.
  bool corruption_keeps_good_events(ProcessId pid) const;
  std::uint64_t total_rejections() const { return total_rejections_; }

 private:
  const KeyRegistry& keys_;
  SystemParams params_;
  SamplingMode mode_;
  ByzantineFn is_byzantine_;
  std::uint32_t rejection_cap_;
  std::unordered_map<Bytes, CommitteeRecord> records_;
  std::vector<CommitteeRecord*> order_;
  std::uint64_t total_rejections_ = 0;
};

}  // namespace sqba
