#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "sqba/message.hpp"
#include "sqba/netsim.hpp"
#include "sqba/value.hpp"
#include "sqba/verify.hpp"

namespace sqba {

/// True iff `ok` holds exactly W valid ECHO messages for ok.value from
/// distinct echo-committee members of (instance, round, slot).
bool verify_ok_proof(const VerifyContext& ctx, const OkBody& ok, std::string_view instance, std::uint64_t round,
                     std::uint8_t slot);

/// One process's view of one approver instance (graded agreement on at most
/// two values). Messages are counted from the start; sending waits for invoke.
class Approver {
 public:
  using Callback = std::function<void(const ValueSet&)>;

  Approver(Host& host, Bytes instance, std::uint64_t round, std::uint8_t slot);

  void set_callback(Callback cb) { callback_ = std::move(cb); }
  void invoke(const Value& input);
  /// `m` must already be valid and addressed to this instance.
  void on_message(const MessagePtr& m);

  bool invoked() const { return invoked_; }
  bool done() const { return done_; }
  const ValueSet& output() const { return output_; }
  const Value& input() const { return input_; }
  const std::optional<Value>& ok_sent() const { return ok_sent_; }

 private:
  struct PerValue {
    Value value;
    std::vector<std::uint8_t> init_from;
    std::uint32_t inits = 0;
    std::vector<std::uint8_t> echo_from;
    std::vector<MessagePtr> echoes;
    bool echo_handled = false;
  };

  PerValue& slot_for(const Value& v);
  void try_echo(PerValue& pv);
  void try_ok(PerValue& pv);
  void try_finish();
  MessagePtr make(MsgKind kind, MessageBody body, const CommitteeProof& proof) const;

  Host& host_;
  Bytes instance_;
  std::uint64_t round_;
  std::uint8_t slot_;
  std::uint32_t n_;
  std::uint32_t W_;
  std::uint32_t B_;
  Callback callback_;

  bool invoked_ = false;
  bool done_ = false;
  Value input_;
  std::vector<PerValue> values_;
  std::vector<std::uint8_t> ok_from_;
  std::vector<Value> first_oks_;
  std::optional<Value> ok_sent_;
  bool ok_handled_ = false;
  ValueSet output_;
};

}  // namespace sqba
