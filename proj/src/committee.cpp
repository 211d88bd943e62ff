#include "sqba/committee.hpp"

namespace sqba {

std::string_view mode_name(SamplingMode mode) {
  return mode == SamplingMode::Faithful ? "faithful" : "conditioned";
}

GoodEvents check_good_events(const SystemParams& p, std::uint32_t size, std::uint32_t correct,
                             std::uint32_t byzantine) {
  GoodEvents e;
  const double sz = size;
  e.s1 = sz <= (1.0 + p.d) * p.lambda;
  e.s2 = sz >= (1.0 - p.d) * p.lambda;
  e.s3 = correct >= p.W;
  e.s4 = byzantine <= p.B;
  e.s5 = 2.0 * p.W - sz >= p.B + 1.0;
  e.s6 = static_cast<double>(p.W) + p.B + 1.0 - sz >= 1.0;
  return e;
}

Bytes resampled_tag(std::string_view base_tag, std::uint64_t nonce) {
  Bytes out(base_tag);
  if (nonce == 0) return out;
  append_field(out, "resample");
  Bytes n;
  append_u64(n, nonce);
  append_field(out, n);
  return out;
}

CommitteeRecord realize_committee(const KeyRegistry& keys, const SystemParams& p, std::string_view base_tag,
                                  std::string_view effective_tag, const ByzantineFn& is_byzantine) {
  CommitteeRecord rec;
  rec.base_tag = Bytes(base_tag);
  rec.effective_tag = Bytes(effective_tag);
  rec.members.assign(keys.size(), 0);
  const SamplingThreshold threshold(p.sampling_probability());
  const Bytes input = committee_vrf_input(effective_tag);
  for (ProcessId pid = 0; pid < keys.size(); ++pid) {
    const bool in = threshold.all() || (!threshold.none() && threshold.admits(vrf_value(keys.key(pid), input)));
    if (!in) continue;
    rec.members[pid] = 1;
    ++rec.size;
    if (is_byzantine && is_byzantine(pid)) {
      ++rec.byzantine;
    } else {
      ++rec.correct;
    }
  }
  rec.events = check_good_events(p, rec.size, rec.correct, rec.byzantine);
  return rec;
}

CommitteeRecord conditioned_sampling_guard(const KeyRegistry& keys, const SystemParams& p,
                                           std::string_view base_tag, const ByzantineFn& is_byzantine,
                                           std::uint32_t rejection_cap) {
  const SamplingThreshold threshold(p.sampling_probability());
  if (threshold.all() || threshold.none()) {
    return realize_committee(keys, p, base_tag, base_tag, is_byzantine);
  }
  for (std::uint64_t nonce = 0;; ++nonce) {
    auto rec = realize_committee(keys, p, base_tag, resampled_tag(base_tag, nonce), is_byzantine);
    rec.rejections = static_cast<std::uint32_t>(nonce);
    if (rec.events.all()) return rec;
    if (nonce >= rejection_cap) {
      throw GuardCapExceeded("conditioned sampling exceeded " + std::to_string(rejection_cap) +
                             " rejections; parameters make the good events too unlikely");
    }
  }
}

CommitteeOracle::CommitteeOracle(const KeyRegistry& keys, const SystemParams& params, SamplingMode mode,
                                 ByzantineFn is_byzantine, std::uint32_t rejection_cap)
    : keys_(keys), params_(params), mode_(mode), is_byzantine_(std::move(is_byzantine)), rejection_cap_(rejection_cap) {}

const CommitteeRecord& CommitteeOracle::resolve(std::string_view base_tag) {
  auto it = records_.find(Bytes(base_tag));
  if (it != records_.end()) return it->second;
  CommitteeRecord rec = mode_ == SamplingMode::Conditioned
                            ? conditioned_sampling_guard(keys_, params_, base_tag, is_byzantine_, rejection_cap_)
                            : realize_committee(keys_, params_, base_tag, base_tag, is_byzantine_);
  total_rejections_ += rec.rejections;
  auto [pos, inserted] = records_.emplace(Bytes(base_tag), std::move(rec));
  order_.push_back(&pos->second);
  return pos->second;
}

SampleResult CommitteeOracle::sample(ProcessId pid, std::string_view base_tag) {
  const auto& rec = resolve(base_tag);
  if (!rec.members[pid]) return SampleResult{};
  return sqba::sample(keys_.key(pid), rec.effective_tag, params_.lambda, keys_.size());
}

bool CommitteeOracle::committee_val(std::string_view base_tag, ProcessId pid, const CommitteeProof& proof) {
  if (pid >= keys_.size()) return false;
  const auto& rec = resolve(base_tag);
  return sqba::committee_val(keys_, rec.effective_tag, params_.lambda, pid, proof);
}

void CommitteeOracle::note_corruption(ProcessId pid) {
  for (auto* rec : order_) {
    if (!rec->members[pid] || rec->correct == 0) continue;
    --rec->correct;
    ++rec->byzantine;
    rec->events = check_good_events(params_, rec->size, rec->correct, rec->byzantine);
  }
}

bool CommitteeOracle::corruption_keeps_good_events(ProcessId pid) const {
  if (mode_ != SamplingMode::Conditioned) return true;
  for (const auto* rec : order_) {
    if (!rec->members[pid]) continue;
    if (rec->correct == 0) return false;
    if (!check_good_events(params_, rec->size, rec->correct - 1, rec->byzantine + 1).all()) return false;
  }
  return true;
}

}  // namespace sqba
