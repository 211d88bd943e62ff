#include "sqba/binary_ba.hpp"

namespace sqba {

Classification classify_approver_output(const ValueSet& vals) {
  std::optional<bool> bit;
  bool bottom = false;
  for (const auto& v : vals) {
    if (v.is_bottom()) {
      bottom = true;
      continue;
    }
    const auto b = v.as_bit();
    if (!b || (bit && *bit != *b)) return {RoundCase::Conflict, std::nullopt};
    bit = b;
  }
  if (!bit) return {RoundCase::Coin, std::nullopt};
  return {bottom ? RoundCase::Adopt : RoundCase::Decide, bit};
}

BinaryBa::BinaryBa(Host& host, Bytes instance) : host_(host), instance_(std::move(instance)) {}

BinaryBa::RoundState& BinaryBa::state(std::uint32_t round) {
  if (rounds_.size() <= round) rounds_.resize(round + 1);
  auto& slot = rounds_[round];
  if (!slot) {
    slot = std::make_unique<RoundState>();
    slot->first = std::make_unique<Approver>(host_, instance_, round, 1);
    slot->second = std::make_unique<Approver>(host_, instance_, round, 2);
    slot->coin = std::make_unique<Coin>(host_, instance_, round);
    slot->first->set_callback([this, round](const ValueSet& v) { after_first(round, v); });
    slot->coin->set_callback([this, round](bool c) { after_coin(round, c); });
    slot->second->set_callback([this, round](const ValueSet& v) { after_second(round, v); });
  }
  return *slot;
}

const Coin* BinaryBa::coin(std::uint32_t round) const {
  if (round >= rounds_.size() || !rounds_[round]) return nullptr;
  return rounds_[round]->coin.get();
}

void BinaryBa::invoke(bool input) {
  if (invoked_) return;
  invoked_ = true;
  est_ = input;
  start_round(1);
}

void BinaryBa::start_round(std::uint32_t round) {
  if (round > host_.round_gate()) {
    halted_ = true;
    return;
  }
  current_ = round;
  RoundRecord rec;
  rec.round = round;
  rec.est_at_start = est_;
  history_.push_back(rec);
  state(round).first->invoke(Value::bit(est_));
}

void BinaryBa::after_first(std::uint32_t round, const ValueSet& vals) {
  auto& rec = history_[round - 1];
  rec.vals1 = vals;
  Value propose;
  if (vals.size() == 1 && !vals.front().is_bottom()) propose = vals.front();
  rec.propose = propose;
  state(round).coin->invoke();
}

void BinaryBa::after_coin(std::uint32_t round, bool c) {
  auto& rec = history_[round - 1];
  rec.coin = c;
  state(round).second->invoke(*rec.propose);
}

void BinaryBa::after_second(std::uint32_t round, const ValueSet& vals) {
  auto& rec = history_[round - 1];
  rec.vals2 = vals;
  const auto cls = classify_approver_output(vals);
  switch (cls.kind) {
    case RoundCase::Decide:
      est_ = *cls.bit;
      if (!decision_) {
        decision_ = est_;
        decision_round_ = round;
        host_.annotate("decide", instance_ + " r=" + std::to_string(round) + " v=" + (est_ ? "1" : "0"));
        host_.report_decision(round);
        if (callback_) callback_(est_, round);
      }
      break;
    case RoundCase::Adopt:
      est_ = *cls.bit;
      break;
    case RoundCase::Coin:
      est_ = *rec.coin;
      break;
    case RoundCase::Conflict:
      compromised_ = true;
      host_.annotate("safety.conflict", instance_ + " r=" + std::to_string(round) + " vals=" + display(vals));
      est_ = *rec.coin;
      break;
  }
  start_round(round + 1);
}

void BinaryBa::on_message(const MessagePtr& m) {
  if (m->round < 1 || m->round > host_.round_cap()) return;
  auto& st = state(static_cast<std::uint32_t>(m->round));
  switch (m->kind) {
    case MsgKind::ApproverInit:
    case MsgKind::ApproverEcho:
    case MsgKind::ApproverOk:
      if (m->slot == 1) {
        st.first->on_message(m);
      } else if (m->slot == 2) {
        st.second->on_message(m);
      }
      return;
    case MsgKind::CoinFirst:
    case MsgKind::CoinSecond:
      st.coin->on_message(m);
      return;
    default:
      return;
  }
}

}  // namespace sqba
