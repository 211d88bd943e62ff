#include "sqba/protocols.hpp"

#include <stdexcept>

namespace sqba {

std::string_view protocol_name(Protocol p) {
  switch (p) {
    case Protocol::Approver: return "approver";
    case Protocol::Coin: return "coin";
    case Protocol::Binary: return "binary";
    case Protocol::Multivalued: return "multivalued";
  }
  return "unknown";
}

Protocol parse_protocol(std::string_view name) {
  if (name == "approver") return Protocol::Approver;
  if (name == "coin") return Protocol::Coin;
  if (name == "binary") return Protocol::Binary;
  if (name == "multivalued") return Protocol::Multivalued;
  throw std::invalid_argument("unknown protocol '" + std::string(name) +
                              "' (expected approver, coin, binary or multivalued)");
}

void ProtocolProcess::on_message(ProcessId, const MessagePtr& msg) {
  if (!host_.valid(*msg)) {
    const auto* c = std::get_if<ConvergeBody>(&msg->body);
    if (msg->kind == MsgKind::MvConverge && c != nullptr && c->is_content) {
      host_.annotate("audit.qc_rejected", "sender=" + std::to_string(msg->sender));
    }
    return;
  }
  handle(msg);
}

ApproverProcess::ApproverProcess(Host& host, Value input)
    : ProtocolProcess(host), input_(std::move(input)), approver_(host, Bytes(kApproverInstance), 1, 1) {}

void ApproverProcess::handle(const MessagePtr& msg) {
  if (msg->instance == kApproverInstance && msg->round == 1 && msg->slot == 1) approver_.on_message(msg);
}

DecisionRecord ApproverProcess::record() const {
  DecisionRecord r;
  r.done = approver_.done();
  if (r.done) r.output = display(approver_.output());
  return r;
}

CoinProcess::CoinProcess(Host& host) : ProtocolProcess(host), coin_(host, Bytes(kCoinInstance), 1) {}

void CoinProcess::handle(const MessagePtr& msg) {
  if (msg->instance == kCoinInstance && msg->round == 1) coin_.on_message(msg);
}

DecisionRecord CoinProcess::record() const {
  DecisionRecord r;
  r.done = coin_.output().has_value();
  if (r.done) r.output = *coin_.output() ? "1" : "0";
  return r;
}

BinaryProcess::BinaryProcess(Host& host, bool input)
    : ProtocolProcess(host), input_(input), ba_(host, Bytes(kBinaryInstance)) {}

void BinaryProcess::handle(const MessagePtr& msg) {
  if (msg->instance == kBinaryInstance) ba_.on_message(msg);
}

DecisionRecord BinaryProcess::record() const {
  DecisionRecord r;
  r.done = ba_.decided();
  if (r.done) r.output = *ba_.decision() ? "1" : "0";
  r.round = ba_.decision_round();
  r.rounds_started = ba_.rounds_started();
  return r;
}

MvProcess::MvProcess(Host& host, Value input)
    : ProtocolProcess(host), input_(std::move(input)), mv_(host, Bytes(kMvInstance)) {}

void MvProcess::handle(const MessagePtr& msg) {
  if (msg->instance == kMvInstance || msg->instance == mv_.binary().instance()) mv_.on_message(msg);
}

DecisionRecord MvProcess::record() const {
  DecisionRecord r;
  r.done = mv_.decided();
  if (r.done) r.output = mv_.decision()->display();
  r.round = mv_.binary().decision_round();
  r.rounds_started = mv_.binary().rounds_started();
  return r;
}

ProcessFactory make_factory(Protocol protocol, const std::vector<Value>& inputs) {
  return [protocol, inputs](Host& host) -> std::unique_ptr<Process> {
    const Value& in = inputs.at(host.self());
    switch (protocol) {
      case Protocol::Approver: return std::make_unique<ApproverProcess>(host, in);
      case Protocol::Coin: return std::make_unique<CoinProcess>(host);
      case Protocol::Binary: {
        const auto bit = in.as_bit();
        if (!bit) throw std::invalid_argument("binary protocol inputs must be 0 or 1");
        return std::make_unique<BinaryProcess>(host, *bit);
      }
      case Protocol::Multivalued:
        if (!in_value_domain(in)) throw std::invalid_argument("multivalued inputs must be 1..64 byte strings");
        return std::make_unique<MvProcess>(host, in);
    }
    throw std::logic_error("unknown protocol");
  };
}

}  // namespace sqba
