#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "sqba/crypto.hpp"
#include "sqba/value.hpp"

namespace sqba {

enum class MsgKind : std::uint8_t {
  ApproverInit = 1,
  ApproverEcho = 2,
  ApproverOk = 3,
  CoinFirst = 4,
  CoinSecond = 5,
  MvInit = 6,
  MvConverge = 7,
};

inline constexpr std::size_t kMsgKindCount = 8;

std::string_view kind_name(MsgKind kind);

struct Message;
using MessagePtr = std::shared_ptr<const Message>;

// INIT / ECHO of the approver and INIT of the multivalued protocol.
struct ValueBody {
  Value value;
};

// OK carries its proof: W signed echoes for the same value.
struct OkBody {
  Value value;
  std::vector<MessagePtr> echoes;
};

struct FirstBody {
  VrfOutput vrf;
};

// Relayed minimum with full provenance so receivers can validate it.
struct SecondBody {
  ProcessId origin = 0;
  VrfOutput vrf;
  CommitteeProof origin_proof;
};

struct QuorumCertificate {
  Value value;
  std::vector<MessagePtr> inits;
};

struct ConvergeBody {
  bool is_content = false;
  std::optional<QuorumCertificate> qc;
};

using MessageBody = std::variant<ValueBody, OkBody, FirstBody, SecondBody, ConvergeBody>;

/// An immutable signed protocol message. Every field except the memo is
/// covered either by the signature (content) or by the committee proof.
struct Message {
  MsgKind kind = MsgKind::ApproverInit;
  Bytes instance;
  std::uint64_t round = 0;
  std::uint8_t slot = 0;
  ProcessId sender = 0;
  MessageBody body;
  CommitteeProof committee;
  Signature signature;
  Digest digest{};

  // Validity memo; validity is a pure function of the message and the run's
  // public verification context.
  mutable const void* checked_by = nullptr;
  mutable bool check_result = false;

  const Value* value() const;  // value carried by INIT/ECHO/OK/MvInit, qc value for content CONVERGE
};

/// Canonical content encoding (signed bytes).
Bytes encode_content(const Message& m);

/// Base committee string the sender must be sampled to.
Bytes sender_committee_tag(const Message& m);

Bytes approver_tag(std::string_view instance, std::uint64_t round, std::uint8_t slot, std::string_view step,
                   const Value* value = nullptr);
Bytes coin_tag(std::string_view instance, std::uint64_t round, std::string_view step);
Bytes coin_vrf_input(std::string_view instance, std::uint64_t round);
Bytes mv_tag(std::string_view instance, std::string_view step);

/// Computes the digest and signs with `key`. `m.sender` is set from the key.
MessagePtr seal(Message m, const KeyPair& key);

/// Word cost table: one word per value, signature and proof; certificate-bearing
/// messages (OK proofs, QCs) add one word per embedded signed message.
std::uint32_t word_cost(const Message& m);

}  // namespace sqba
