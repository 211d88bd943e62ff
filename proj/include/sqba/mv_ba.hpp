#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "sqba/binary_ba.hpp"

namespace sqba {

inline constexpr std::size_t kMaxValueBytes = 64;

/// Input domain: byte strings of length 1..64. Bottom is outside it.
bool in_value_domain(const Value& v);

/// True iff W distinct valid init-committee INIT messages of `instance`, all on qc.value.
bool verify_qc(const VerifyContext& ctx, const QuorumCertificate& qc, std::string_view instance);

Bytes alert_instance(std::string_view instance);

/// Decision given the binary result: true yields bottom, false yields the held
/// QC value, or nothing yet when no valid QC has arrived.
std::optional<Value> decide_path(bool binary_result, const std::optional<QuorumCertificate>& held);

/// Multivalued weak agreement through init and converge committees, an
/// alert bit, and binary agreement on that bit.
class MvBa {
 public:
  using Callback = std::function<void(const Value&)>;

  MvBa(Host& host, Bytes instance);

  void set_callback(Callback cb) { callback_ = std::move(cb); }
  void invoke(const Value& input);
  void on_message(const MessagePtr& m);

  bool decided() const { return decision_.has_value(); }
  const std::optional<Value>& decision() const { return decision_; }
  std::optional<bool> alert() const { return alert_; }
  std::uint32_t count() const { return count_; }
  std::uint32_t converge_count() const { return converge_seen_; }
  bool converge_member() const { return converge_member_; }
  std::optional<bool> sent_content() const { return sent_content_; }
  const std::optional<QuorumCertificate>& held_qc() const { return held_qc_; }
  const BinaryBa& binary() const { return binary_; }
  bool waited_for_qc() const { return waited_for_qc_; }

 private:
  void try_converge();
  void try_decide();

  Host& host_;
  Bytes instance_;
  std::uint32_t W_;
  std::uint32_t B_;
  Callback callback_;
  BinaryBa binary_;

  bool invoked_ = false;
  Value input_;

  std::vector<std::uint8_t> init_from_;
  std::vector<MessagePtr> inits_;
  ValueSet init_values_;
  bool init_latched_ = false;
  bool converge_member_ = false;
  std::optional<bool> sent_content_;

  std::vector<std::uint8_t> converge_from_;
  std::uint32_t converge_seen_ = 0;
  std::uint32_t count_ = 0;
  bool converge_latched_ = false;
  std::optional<bool> alert_;
  std::optional<QuorumCertificate> held_qc_;

  std::optional<bool> binary_result_;
  bool waited_for_qc_ = false;
  std::optional<Value> decision_;
};

}  // namespace sqba
