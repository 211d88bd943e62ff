#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "sqba/message.hpp"
#include "sqba/netsim.hpp"
#include "sqba/verify.hpp"

namespace sqba {

/// A VRF value with the process it came from. Ordered by value, then origin.
struct CoinCandidate {
  ProcessId origin = 0;
  VrfOutput vrf;
  CommitteeProof origin_proof;
};

bool coin_less(const CoinCandidate& a, const CoinCandidate& b);

/// Valid iff the relayed VRF value verifies for the claimed origin and round
/// and the origin's first-committee proof verifies.
bool verify_second(const VerifyContext& ctx, const Message& m);

/// Two-phase VRF-minimum coin, one process, one round.
class Coin {
 public:
  using Callback = std::function<void(bool)>;

  Coin(Host& host, Bytes instance, std::uint64_t round);

  void set_callback(Callback cb) { callback_ = std::move(cb); }
  void invoke();
  void on_message(const MessagePtr& m);

  bool invoked() const { return invoked_; }
  bool second_member() const { return second_member_; }
  std::optional<bool> output() const { return output_; }
  /// Origins of the first W FIRST messages received.
  const std::vector<ProcessId>& phase1_origins() const { return phase1_origins_; }
  const std::optional<CoinCandidate>& relayed() const { return relayed_; }
  const std::optional<CoinCandidate>& final_min() const { return final_min_; }

 private:
  void try_second();
  void try_output();

  Host& host_;
  Bytes instance_;
  std::uint64_t round_;
  std::uint32_t W_;
  Callback callback_;

  bool invoked_ = false;
  bool second_member_ = false;
  std::optional<CommitteeProof> second_proof_;

  std::vector<std::uint8_t> first_from_;
  std::vector<ProcessId> phase1_origins_;
  std::optional<CoinCandidate> phase1_min_;
  std::optional<CoinCandidate> relayed_;

  std::vector<std::uint8_t> second_from_;
  std::uint32_t seconds_ = 0;
  std::optional<CoinCandidate> final_min_;
  std::optional<bool> output_;
};

}  // namespace sqba
