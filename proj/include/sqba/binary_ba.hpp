#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "sqba/approver.hpp"
#include "sqba/coin.hpp"

namespace sqba {

enum class RoundCase { Decide, Adopt, Coin, Conflict };

struct Classification {
  RoundCase kind = RoundCase::Coin;
  std::optional<bool> bit;
};

/// Maps the second approver's output to the round's action.
Classification classify_approver_output(const ValueSet& vals);

/// Per-round record kept for trace checks.
struct RoundRecord {
  std::uint32_t round = 0;
  bool est_at_start = false;
  std::optional<ValueSet> vals1;
  std::optional<Value> propose;
  std::optional<bool> coin;
  std::optional<ValueSet> vals2;
};

/// Binary agreement: per round two approver calls and one coin.
class BinaryBa {
 public:
  using Callback = std::function<void(bool, std::uint32_t)>;

  BinaryBa(Host& host, Bytes instance);

  void set_callback(Callback cb) { callback_ = std::move(cb); }
  void invoke(bool input);
  void on_message(const MessagePtr& m);

  const Bytes& instance() const { return instance_; }
  bool invoked() const { return invoked_; }
  bool decided() const { return decision_.has_value(); }
  std::optional<bool> decision() const { return decision_; }
  std::optional<std::uint32_t> decision_round() const { return decision_round_; }
  std::uint32_t rounds_started() const { return current_; }
  bool safety_compromised() const { return compromised_; }
  bool halted() const { return halted_; }
  const std::vector<RoundRecord>& history() const { return history_; }
  const Coin* coin(std::uint32_t round) const;

 private:
  struct RoundState {
    std::unique_ptr<Approver> first;
    std::unique_ptr<Approver> second;
    std::unique_ptr<Coin> coin;
  };

  RoundState& state(std::uint32_t round);
  void start_round(std::uint32_t round);
  void after_first(std::uint32_t round, const ValueSet& vals);
  void after_coin(std::uint32_t round, bool c);
  void after_second(std::uint32_t round, const ValueSet& vals);

  Host& host_;
  Bytes instance_;
  Callback callback_;
  std::vector<std::unique_ptr<RoundState>> rounds_;  // index = round
  std::vector<RoundRecord> history_;

  bool invoked_ = false;
  bool est_ = false;
  std::uint32_t current_ = 0;
  bool halted_ = false;
  bool compromised_ = false;
  std::optional<bool> decision_;
  std::optional<std::uint32_t> decision_round_;
};

}  // namespace sqba
