#include "sqba/mv_ba.hpp"

namespace sqba {

bool in_value_domain(const Value& v) {
  return !v.is_bottom() && !v.bytes().empty() && v.bytes().size() <= kMaxValueBytes;
}

bool verify_qc(const VerifyContext& ctx, const QuorumCertificate& qc, std::string_view instance) {
  if (qc.inits.size() != ctx.params().W || !in_value_domain(qc.value)) return false;
  std::vector<std::uint8_t> seen(ctx.keys().size(), 0);
  for (const auto& m : qc.inits) {
    if (!m || m->kind != MsgKind::MvInit || m->instance != instance) return false;
    const auto* v = m->value();
    if (v == nullptr || *v != qc.value) return false;
    if (m->sender >= seen.size() || seen[m->sender]) return false;
    seen[m->sender] = 1;
    if (!ctx.valid(*m)) return false;
  }
  return true;
}

Bytes alert_instance(std::string_view instance) {
  Bytes out(instance);
  out += "/alert";
  return out;
}

std::optional<Value> decide_path(bool binary_result, const std::optional<QuorumCertificate>& held) {
  if (binary_result) return Value::bottom();
  if (held) return held->value;
  return std::nullopt;
}

MvBa::MvBa(Host& host, Bytes instance)
    : host_(host),
      instance_(std::move(instance)),
      W_(host.params().W),
      B_(host.params().B),
      binary_(host, alert_instance(instance_)) {
  binary_.set_callback([this](bool b, std::uint32_t) {
    binary_result_ = b;
    try_decide();
  });
}

void MvBa::invoke(const Value& input) {
  if (invoked_) return;
  invoked_ = true;
  input_ = input;
  if (auto proof = host_.sample(mv_tag(instance_, "init"))) {
    Message m;
    m.kind = MsgKind::MvInit;
    m.instance = instance_;
    m.body = ValueBody{input_};
    m.committee = *proof;
    host_.broadcast(seal(std::move(m), host_.key()));
  }
  try_converge();
  if (converge_latched_ && !binary_.invoked()) binary_.invoke(*alert_);
}

void MvBa::try_converge() {
  if (!invoked_ || !init_latched_ || sent_content_) return;
  auto proof = host_.sample(mv_tag(instance_, "converge"));
  converge_member_ = proof.has_value();
  const bool content = init_values_.size() == 1 && init_values_.front() == input_;
  sent_content_ = content;
  if (!converge_member_) return;
  Message m;
  m.kind = MsgKind::MvConverge;
  m.instance = instance_;
  ConvergeBody body;
  body.is_content = content;
  if (content) body.qc = QuorumCertificate{input_, inits_};
  m.body = std::move(body);
  m.committee = *proof;
  host_.broadcast(seal(std::move(m), host_.key()));
}

void MvBa::try_decide() {
  if (decision_ || !binary_result_) return;
  auto d = decide_path(*binary_result_, held_qc_);
  if (!d) {
    if (!waited_for_qc_) host_.annotate("mvba.wait_qc", instance_);
    waited_for_qc_ = true;
    return;
  }
  decision_ = std::move(d);
  host_.annotate("decide", instance_ + " v=" + decision_->display());
  if (callback_) callback_(*decision_);
}

void MvBa::on_message(const MessagePtr& m) {
  const auto n = host_.params().n;
  const ProcessId s = m->sender;
  if (m->instance != instance_) {
    binary_.on_message(m);
    return;
  }
  if (m->kind == MsgKind::MvInit) {
    if (init_latched_) return;
    if (init_from_.empty()) init_from_.assign(n, 0);
    if (init_from_[s]) return;
    init_from_[s] = 1;
    inits_.push_back(m);
    insert_value(init_values_, *m->value());
    if (inits_.size() == W_) {
      init_latched_ = true;
      try_converge();
    }
  } else if (m->kind == MsgKind::MvConverge) {
    if (converge_from_.empty()) converge_from_.assign(n, 0);
    if (converge_from_[s]) return;
    converge_from_[s] = 1;
    const auto& body = std::get<ConvergeBody>(m->body);
    if (body.is_content && !held_qc_) held_qc_ = body.qc;
    if (converge_latched_) {
      try_decide();
      return;
    }
    ++converge_seen_;
    if (body.is_content) ++count_;
    if (converge_seen_ == W_) {
      converge_latched_ = true;
      alert_ = count_ < B_ + 1;
      if (invoked_) binary_.invoke(*alert_);
    }
  }
}

}  // namespace sqba
