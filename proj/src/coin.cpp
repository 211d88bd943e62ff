#include "sqba/coin.hpp"

namespace sqba {

namespace {

bool key_less(const Digest& value, ProcessId origin, const CoinCandidate& b) {
  if (value != b.vrf.value) return value < b.vrf.value;
  return origin < b.origin;
}

}  // namespace

bool coin_less(const CoinCandidate& a, const CoinCandidate& b) { return key_less(a.vrf.value, a.origin, b); }

bool verify_second(const VerifyContext& ctx, const Message& m) {
  const auto* s = std::get_if<SecondBody>(&m.body);
  if (s == nullptr || s->origin >= ctx.keys().size()) return false;
  if (!vrf_verify(ctx.keys(), s->origin, coin_vrf_input(m.instance, m.round), s->vrf)) return false;
  return ctx.committees().committee_val(coin_tag(m.instance, m.round, "first"), s->origin, s->origin_proof);
}

Coin::Coin(Host& host, Bytes instance, std::uint64_t round)
    : host_(host), instance_(std::move(instance)), round_(round), W_(host.params().W) {}

void Coin::invoke() {
  if (invoked_) return;
  invoked_ = true;
  if (auto proof = host_.sample(coin_tag(instance_, round_, "first"))) {
    Message m;
    m.kind = MsgKind::CoinFirst;
    m.instance = instance_;
    m.round = round_;
    m.body = FirstBody{vrf_eval(host_.key(), coin_vrf_input(instance_, round_))};
    m.committee = *proof;
    host_.broadcast(seal(std::move(m), host_.key()));
  }
  second_proof_ = host_.sample(coin_tag(instance_, round_, "second"));
  second_member_ = second_proof_.has_value();
  try_second();
  try_output();
}

void Coin::try_second() {
  if (!invoked_ || !second_member_ || relayed_ || phase1_origins_.size() < W_) return;
  relayed_ = phase1_min_;
  Message m;
  m.kind = MsgKind::CoinSecond;
  m.instance = instance_;
  m.round = round_;
  m.body = SecondBody{relayed_->origin, relayed_->vrf, relayed_->origin_proof};
  m.committee = *second_proof_;
  host_.broadcast(seal(std::move(m), host_.key()));
}

void Coin::try_output() {
  if (!invoked_ || output_ || seconds_ < W_) return;
  output_ = final_min_->vrf.lsb();
  if (callback_) callback_(*output_);
}

void Coin::on_message(const MessagePtr& m) {
  const ProcessId s = m->sender;
  const auto n = host_.params().n;
  if (m->kind == MsgKind::CoinFirst) {
    if (phase1_origins_.size() >= W_) return;
    if (first_from_.empty()) first_from_.assign(n, 0);
    if (first_from_[s]) return;
    first_from_[s] = 1;
    phase1_origins_.push_back(s);
    const auto& vrf = std::get<FirstBody>(m->body).vrf;
    if (!phase1_min_ || key_less(vrf.value, s, *phase1_min_)) phase1_min_ = CoinCandidate{s, vrf, m->committee};
    try_second();
  } else if (m->kind == MsgKind::CoinSecond) {
    if (seconds_ >= W_) return;
    if (second_from_.empty()) second_from_.assign(n, 0);
    if (second_from_[s]) return;
    second_from_[s] = 1;
    ++seconds_;
    const auto& body = std::get<SecondBody>(m->body);
    if (!final_min_ || key_less(body.vrf.value, body.origin, *final_min_)) {
      final_min_ = CoinCandidate{body.origin, body.vrf, body.origin_proof};
    }
    try_output();
  }
}

}  // namespace sqba
