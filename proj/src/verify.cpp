#include "sqba/verify.hpp"

#include "sqba/approver.hpp"
#include "sqba/coin.hpp"
#include "sqba/mv_ba.hpp"

namespace sqba {

bool VerifyContext::valid(const Message& m) const {
  if (m.checked_by == this) return m.check_result;
  const bool ok = check(m);
  m.checked_by = this;
  m.check_result = ok;
  return ok;
}

bool VerifyContext::check(const Message& m) const {
  if (m.sender >= keys_.size()) return false;
  switch (m.kind) {
    case MsgKind::ApproverInit:
    case MsgKind::ApproverEcho:
      if (!std::holds_alternative<ValueBody>(m.body)) return false;
      break;
    case MsgKind::MvInit: {
      const auto* b = std::get_if<ValueBody>(&m.body);
      if (b == nullptr || !in_value_domain(b->value)) return false;
      break;
    }
    case MsgKind::ApproverOk:
      if (!std::holds_alternative<OkBody>(m.body)) return false;
      break;
    case MsgKind::CoinFirst:
      if (!std::holds_alternative<FirstBody>(m.body)) return false;
      break;
    case MsgKind::CoinSecond:
      if (!std::holds_alternative<SecondBody>(m.body)) return false;
      break;
    case MsgKind::MvConverge: {
      const auto* c = std::get_if<ConvergeBody>(&m.body);
      if (c == nullptr || c->is_content != c->qc.has_value()) return false;
      break;
    }
    default:
      return false;
  }

  if (hash_bytes(encode_content(m)) != m.digest) return false;
  if (!verify_digest(keys_, m.sender, m.digest, m.signature)) return false;
  if (!committees_.committee_val(sender_committee_tag(m), m.sender, m.committee)) return false;

  switch (m.kind) {
    case MsgKind::ApproverOk:
      return verify_ok_proof(*this, std::get<OkBody>(m.body), m.instance, m.round, m.slot);
    case MsgKind::CoinFirst:
      return vrf_verify(keys_, m.sender, coin_vrf_input(m.instance, m.round), std::get<FirstBody>(m.body).vrf);
    case MsgKind::CoinSecond:
      return verify_second(*this, m);
    case MsgKind::MvConverge: {
      const auto& c = std::get<ConvergeBody>(m.body);
      return !c.is_content || verify_qc(*this, *c.qc, m.instance);
    }
    default:
      return true;
  }
}

}  // namespace sqba
