#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "sqba/approver.hpp"
#include "sqba/binary_ba.hpp"
#include "sqba/coin.hpp"
#include "sqba/mv_ba.hpp"
#include "sqba/netsim.hpp"

namespace sqba {

enum class Protocol { Approver, Coin, Binary, Multivalued };

std::string_view protocol_name(Protocol p);
Protocol parse_protocol(std::string_view name);  // throws std::invalid_argument

inline constexpr std::string_view kApproverInstance = "apv";
inline constexpr std::string_view kCoinInstance = "coin";
inline constexpr std::string_view kBinaryInstance = "bba";
inline constexpr std::string_view kMvInstance = "mv";

/// Common base: validity filtering and the audit note for rejected QCs.
class ProtocolProcess : public Process {
 public:
  explicit ProtocolProcess(Host& host) : host_(host) {}
  void on_message(ProcessId from, const MessagePtr& msg) final;

 protected:
  virtual void handle(const MessagePtr& msg) = 0;
  Host& host_;
};

class ApproverProcess : public ProtocolProcess {
 public:
  ApproverProcess(Host& host, Value input);
  void start() override { approver_.invoke(input_); }
  DecisionRecord record() const override;
  const Approver& approver() const { return approver_; }

 private:
  void handle(const MessagePtr& msg) override;
  Value input_;
  Approver approver_;
};

class CoinProcess : public ProtocolProcess {
 public:
  explicit CoinProcess(Host& host);
  void start() override { coin_.invoke(); }
  DecisionRecord record() const override;
  const Coin& coin() const { return coin_; }

 private:
  void handle(const MessagePtr& msg) override;
  Coin coin_;
};

class BinaryProcess : public ProtocolProcess {
 public:
  BinaryProcess(Host& host, bool input);
  void start() override { ba_.invoke(input_); }
  DecisionRecord record() const override;
  const BinaryBa& ba() const { return ba_; }

 private:
  void handle(const MessagePtr& msg) override;
  bool input_;
  BinaryBa ba_;
};

class MvProcess : public ProtocolProcess {
 public:
  MvProcess(Host& host, Value input);
  void start() override { mv_.invoke(input_); }
  DecisionRecord record() const override;
  const MvBa& mv() const { return mv_; }

 private:
  void handle(const MessagePtr& msg) override;
  Value input_;
  MvBa mv_;
};

/// Factory for n processes with the given per-process inputs (ignored by the coin).
ProcessFactory make_factory(Protocol protocol, const std::vector<Value>& inputs);

}  // namespace sqba
