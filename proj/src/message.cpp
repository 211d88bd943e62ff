#include "sqba/message.hpp"

#include <stdexcept>

namespace sqba {

std::string_view kind_name(MsgKind kind) {
  switch (kind) {
    case MsgKind::ApproverInit: return "approver.init";
    case MsgKind::ApproverEcho: return "approver.echo";
    case MsgKind::ApproverOk: return "approver.ok";
    case MsgKind::CoinFirst: return "coin.first";
    case MsgKind::CoinSecond: return "coin.second";
    case MsgKind::MvInit: return "mvba.init";
    case MsgKind::MvConverge: return "mvba.converge";
  }
  return "unknown";
}

const Value* Message::value() const {
  if (auto* v = std::get_if<ValueBody>(&body)) return &v->value;
  if (auto* ok = std::get_if<OkBody>(&body)) return &ok->value;
  if (auto* c = std::get_if<ConvergeBody>(&body)) return c->qc ? &c->qc->value : nullptr;
  return nullptr;
}

namespace {

void append_digest(Bytes& out, const Digest& d) { out.append(reinterpret_cast<const char*>(d.data()), d.size()); }

void append_vrf(Bytes& out, const VrfOutput& v) {
  append_digest(out, v.value);
  append_digest(out, v.proof);
}

}  // namespace

Bytes encode_content(const Message& m) {
  Bytes out;
  out.reserve(96);
  out.push_back(static_cast<char>(m.kind));
  append_field(out, m.instance);
  append_u64(out, m.round);
  out.push_back(static_cast<char>(m.slot));
  append_u32(out, m.sender);
  std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, ValueBody>) {
          append_field(out, b.value.encode());
        } else if constexpr (std::is_same_v<T, OkBody>) {
          append_field(out, b.value.encode());
          append_u32(out, static_cast<std::uint32_t>(b.echoes.size()));
          for (const auto& e : b.echoes) append_digest(out, e ? e->digest : Digest{});
        } else if constexpr (std::is_same_v<T, FirstBody>) {
          append_vrf(out, b.vrf);
        } else if constexpr (std::is_same_v<T, SecondBody>) {
          append_u32(out, b.origin);
          append_vrf(out, b.vrf);
          append_field(out, b.origin_proof.tag);
          append_vrf(out, b.origin_proof.vrf);
        } else if constexpr (std::is_same_v<T, ConvergeBody>) {
          out.push_back(b.is_content ? '\x01' : '\x00');
          if (b.qc) {
            append_field(out, b.qc->value.encode());
            append_u32(out, static_cast<std::uint32_t>(b.qc->inits.size()));
            for (const auto& e : b.qc->inits) append_digest(out, e ? e->digest : Digest{});
          }
        }
      },
      m.body);
  return out;
}

Bytes approver_tag(std::string_view instance, std::uint64_t round, std::uint8_t slot, std::string_view step,
                   const Value* value) {
  std::string label = "a";
  label += std::to_string(slot);
  label += '.';
  label += step;
  if (value == nullptr) return committee_tag("approver", instance, round, label);
  const Bytes enc = value->encode();
  return committee_tag("approver", instance, round, label, &enc);
}

Bytes coin_tag(std::string_view instance, std::uint64_t round, std::string_view step) {
  return committee_tag("coin", instance, round, step);
}

Bytes coin_vrf_input(std::string_view instance, std::uint64_t round) {
  return committee_tag("coin", instance, round, "value");
}

Bytes mv_tag(std::string_view instance, std::string_view step) { return committee_tag("mvba", instance, 0, step); }

Bytes sender_committee_tag(const Message& m) {
  switch (m.kind) {
    case MsgKind::ApproverInit: return approver_tag(m.instance, m.round, m.slot, "init");
    case MsgKind::ApproverEcho: {
      const auto* v = m.value();
      return approver_tag(m.instance, m.round, m.slot, "echo", v);
    }
    case MsgKind::ApproverOk: return approver_tag(m.instance, m.round, m.slot, "ok");
    case MsgKind::CoinFirst: return coin_tag(m.instance, m.round, "first");
    case MsgKind::CoinSecond: return coin_tag(m.instance, m.round, "second");
    case MsgKind::MvInit: return mv_tag(m.instance, "init");
    case MsgKind::MvConverge: return mv_tag(m.instance, "converge");
  }
  throw std::logic_error("unknown message kind");
}

MessagePtr seal(Message m, const KeyPair& key) {
  m.sender = key.process_id;
  m.digest = hash_bytes(encode_content(m));
  m.signature = sign_digest(key, m.digest);
  return std::make_shared<const Message>(std::move(m));
}

std::uint32_t word_cost(const Message& m) {
  constexpr std::uint32_t kValueSigProof = 3;
  switch (m.kind) {
    case MsgKind::ApproverInit:
    case MsgKind::ApproverEcho:
    case MsgKind::MvInit: return kValueSigProof;
    case MsgKind::ApproverOk: {
      const auto* ok = std::get_if<OkBody>(&m.body);
      return kValueSigProof + (ok ? static_cast<std::uint32_t>(ok->echoes.size()) : 0u);
    }
    case MsgKind::CoinFirst: return kValueSigProof + 1;   // + VRF proof
    case MsgKind::CoinSecond: return kValueSigProof + 2;  // + VRF proof, origin committee proof
    case MsgKind::MvConverge: {
      const auto* c = std::get_if<ConvergeBody>(&m.body);
      return kValueSigProof + (c && c->qc ? static_cast<std::uint32_t>(c->qc->inits.size()) : 0u);
    }
  }
  return kValueSigProof;
}

}  // namespace sqba
