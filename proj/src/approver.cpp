#include "sqba/approver.hpp"

namespace sqba {

bool verify_ok_proof(const VerifyContext& ctx, const OkBody& ok, std::string_view instance, std::uint64_t round,
                     std::uint8_t slot) {
  const auto W = ctx.params().W;
  if (ok.echoes.size() != W) return false;
  std::vector<std::uint8_t> seen(ctx.keys().size(), 0);
  for (const auto& e : ok.echoes) {
    if (!e || e->kind != MsgKind::ApproverEcho) return false;
    if (e->instance != instance || e->round != round || e->slot != slot) return false;
    const auto* v = e->value();
    if (v == nullptr || *v != ok.value) return false;
    if (e->sender >= seen.size() || seen[e->sender]) return false;
    seen[e->sender] = 1;
    if (!ctx.valid(*e)) return false;
  }
  return true;
}

Approver::Approver(Host& host, Bytes instance, std::uint64_t round, std::uint8_t slot)
    : host_(host),
      instance_(std::move(instance)),
      round_(round),
      slot_(slot),
      n_(host.params().n),
      W_(host.params().W),
      B_(host.params().B) {}

Approver::PerValue& Approver::slot_for(const Value& v) {
  for (auto& pv : values_) {
    if (pv.value == v) return pv;
  }
  auto& pv = values_.emplace_back();
  pv.value = v;
  pv.init_from.assign(n_, 0);
  pv.echo_from.assign(n_, 0);
  return pv;
}

MessagePtr Approver::make(MsgKind kind, MessageBody body, const CommitteeProof& proof) const {
  Message m;
  m.kind = kind;
  m.instance = instance_;
  m.round = round_;
  m.slot = slot_;
  m.body = std::move(body);
  m.committee = proof;
  return seal(std::move(m), host_.key());
}

void Approver::invoke(const Value& input) {
  if (invoked_) return;
  invoked_ = true;
  input_ = input;
  if (auto proof = host_.sample(approver_tag(instance_, round_, slot_, "init"))) {
    host_.broadcast(make(MsgKind::ApproverInit, ValueBody{input_}, *proof));
  }
  // Thresholds may already have been met before the call.
  for (std::size_t i = 0; i < values_.size(); ++i) try_echo(values_[i]);
  for (std::size_t i = 0; i < values_.size(); ++i) try_ok(values_[i]);
  try_finish();
}

void Approver::try_echo(PerValue& pv) {
  if (!invoked_ || pv.echo_handled || pv.inits < B_ + 1) return;
  pv.echo_handled = true;
  if (auto proof = host_.sample(approver_tag(instance_, round_, slot_, "echo", &pv.value))) {
    host_.broadcast(make(MsgKind::ApproverEcho, ValueBody{pv.value}, *proof));
  }
}

void Approver::try_ok(PerValue& pv) {
  if (!invoked_ || ok_handled_ || pv.echoes.size() < W_) return;
  ok_handled_ = true;
  if (auto proof = host_.sample(approver_tag(instance_, round_, slot_, "ok"))) {
    OkBody body{pv.value, std::vector<MessagePtr>(pv.echoes.begin(), pv.echoes.begin() + W_)};
    ok_sent_ = pv.value;
    host_.broadcast(make(MsgKind::ApproverOk, std::move(body), *proof));
  }
}

void Approver::try_finish() {
  if (!invoked_ || done_ || first_oks_.size() < W_) return;
  done_ = true;
  for (const auto& v : first_oks_) insert_value(output_, v);
  if (callback_) callback_(output_);
}

void Approver::on_message(const MessagePtr& m) {
  const ProcessId s = m->sender;
  switch (m->kind) {
    case MsgKind::ApproverInit: {
      auto& pv = slot_for(*m->value());
      if (pv.init_from[s]) return;
      pv.init_from[s] = 1;
      ++pv.inits;
      try_echo(pv);
      return;
    }
    case MsgKind::ApproverEcho: {
      auto& pv = slot_for(*m->value());
      if (pv.echo_from[s]) return;
      pv.echo_from[s] = 1;
      if (pv.echoes.size() < W_) pv.echoes.push_back(m);
      try_ok(pv);
      return;
    }
    case MsgKind::ApproverOk: {
      if (first_oks_.size() >= W_) return;
      if (ok_from_.empty()) ok_from_.assign(n_, 0);
      if (ok_from_[s]) return;
      ok_from_[s] = 1;
      first_oks_.push_back(*m->value());
      try_finish();
      return;
    }
    default:
      return;
  }
}

}  // namespace sqba
