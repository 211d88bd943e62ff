#include "sqba/adversary.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "sqba/coin.hpp"
#include "sqba/rng.hpp"

namespace sqba {

std::vector<ProcessId> pick_processes(AdversaryControl& ctl, std::uint32_t k) {
  std::vector<ProcessId> all(ctl.n());
  std::iota(all.begin(), all.end(), 0u);
  k = std::min<std::uint32_t>(k, ctl.n());
  for (std::uint32_t i = 0; i < k; ++i) {
    const auto j = i + uniform_below(ctl.rng(), ctl.n() - i);
    std::swap(all[i], all[j]);
  }
  all.resize(k);
  std::sort(all.begin(), all.end());
  return all;
}

namespace {

std::vector<ProcessId> parity(std::uint32_t n, std::uint32_t bit) {
  std::vector<ProcessId> out;
  for (ProcessId p = bit; p < n; p += 2) out.push_back(p);
  return out;
}

MessagePtr forge(AdversaryControl& ctl, ProcessId pid, MsgKind kind, const Message& like, MessageBody body,
                 const CommitteeProof& proof) {
  Message m;
  m.kind = kind;
  m.instance = like.instance;
  m.round = like.round;
  m.slot = like.slot;
  m.body = std::move(body);
  m.committee = proof;
  return seal(std::move(m), ctl.key_of(pid));
}

class StaticCorruption : public Adversary {
 public:
  explicit StaticCorruption(std::optional<std::uint32_t> count = std::nullopt) : count_(count) {}
  void on_start(AdversaryControl& ctl) override {
    corrupted_ = pick_processes(ctl, count_.value_or(ctl.budget()));
    for (auto pid : corrupted_) ctl.corrupt(pid);
  }

 protected:
  std::optional<std::uint32_t> count_;
  std::vector<ProcessId> corrupted_;
};

class Crash : public StaticCorruption {
 public:
  using StaticCorruption::StaticCorruption;
  std::string name() const override { return "crash"; }
};

class Equivocate : public StaticCorruption {
 public:
  std::string name() const override { return "equivocate"; }

  void on_broadcast(AdversaryControl& ctl, ProcessId, const MessagePtr& msg, EnvelopeId, std::uint32_t) override {
    const auto& m = *msg;
    std::string key(1, static_cast<char>(m.kind));
    key += m.instance;
    key += '/' + std::to_string(m.round) + '/' + std::to_string(m.slot);
    if (!seen_.insert(key).second) return;
    const auto evens = parity(ctl.n(), 0);
    const auto odds = parity(ctl.n(), 1);
    switch (m.kind) {
      case MsgKind::ApproverInit:
      case MsgKind::ApproverEcho:
      case MsgKind::MvInit: {
        const auto [a, b] = pair_for(*m.value());
        for (auto pid : corrupted_) {
          for (int side = 0; side < 2; ++side) {
            const Value& v = side == 0 ? a : b;
            Bytes tag;
            if (m.kind == MsgKind::MvInit) {
              tag = mv_tag(m.instance, "init");
            } else if (m.kind == MsgKind::ApproverInit) {
              tag = approver_tag(m.instance, m.round, m.slot, "init");
            } else {
              tag = approver_tag(m.instance, m.round, m.slot, "echo", &v);
            }
            auto proof = ctl.sample_as(pid, tag);
            if (!proof) continue;
            ctl.inject_many(pid, side == 0 ? evens : odds, forge(ctl, pid, m.kind, m, ValueBody{v}, *proof));
          }
        }
        return;
      }
      case MsgKind::CoinFirst: {
        for (auto pid : corrupted_) {
          auto proof = ctl.sample_as(pid, coin_tag(m.instance, m.round, "first"));
          if (!proof) continue;
          FirstBody body{vrf_eval(ctl.key_of(pid), coin_vrf_input(m.instance, m.round))};
          ctl.inject_many(pid, evens, forge(ctl, pid, m.kind, m, body, *proof));
        }
        return;
      }
      default:
        return;
    }
  }

 private:
  static std::pair<Value, Value> pair_for(const Value& seen) {
    if (seen.is_bottom() || seen.as_bit()) return {Value::bit(false), Value::bit(true)};
    return {seen, Value::of(seen.bytes() + "~")};
  }

  std::set<std::string> seen_;
};

class QcWithhold : public Adversary {
 public:
  std::string name() const override { return "qc_withhold"; }

  void on_broadcast(AdversaryControl& ctl, ProcessId from, const MessagePtr& msg, EnvelopeId first,
                    std::uint32_t count) override {
    bool target = msg->kind == MsgKind::ApproverOk;
    if (const auto* c = std::get_if<ConvergeBody>(&msg->body)) target = c->is_content;
    if (!target || ctl.is_corrupt(from) || ctl.corrupted_count() >= ctl.budget()) return;
    if (!ctl.corruption_keeps_good_events(from)) return;
    ctl.corrupt(from);
    for (std::uint32_t i = 1; i < count; i += 2) ctl.hold(first + i);
  }
};

class CoinSplitter : public Adversary {
 public:
  std::string name() const override { return "coin_splitter"; }

  void on_broadcast(AdversaryControl& ctl, ProcessId from, const MessagePtr& msg, EnvelopeId first,
                    std::uint32_t count) override {
    const auto& m = *msg;
    if (m.kind != MsgKind::CoinFirst && m.kind != MsgKind::CoinSecond) return;
    auto& st = coins_[m.instance + '/' + std::to_string(m.round)];
    if (m.kind == MsgKind::CoinFirst) {
      CoinCandidate c{from, std::get<FirstBody>(m.body).vrf, m.committee};
      if (st.min && !coin_less(c, *st.min)) return;
      for (auto id : st.held) ctl.release(id);
      st.held.clear();
      st.min = std::move(c);
    } else {
      if (!st.min || std::get<SecondBody>(m.body).origin != st.min->origin) return;
    }
    // Only every fourth process sees the current minimum in time.
    for (std::uint32_t i = 0; i < count; ++i) {
      if (i % 4 == 0) continue;
      ctl.hold(first + i);
      st.held.push_back(first + i);
    }
  }

 private:
  struct State {
    std::optional<CoinCandidate> min;
    std::vector<EnvelopeId> held;
  };
  std::map<std::string, State> coins_;
};

class AlertSkew : public StaticCorruption {
 public:
  std::string name() const override { return "alert_skew"; }

  void on_broadcast(AdversaryControl& ctl, ProcessId, const MessagePtr& msg, EnvelopeId, std::uint32_t) override {
    const auto& m = *msg;
    if (m.kind != MsgKind::MvInit || !done_.insert(m.instance).second || corrupted_.empty()) return;
    const auto W = ctl.params().W;
    const Value forged = Value::of("forged");
    const Bytes init_tag = mv_tag(m.instance, "init");
    QuorumCertificate qc;
    qc.value = forged;
    for (std::uint32_t i = 0; i < W; ++i) {
      const auto pid = corrupted_[i % corrupted_.size()];
      auto proof = ctl.sample_as(pid, init_tag);
      CommitteeProof p = proof ? *proof : CommitteeProof{pid, init_tag, ctl.params().lambda, {}};
      qc.inits.push_back(forge(ctl, pid, MsgKind::MvInit, m, ValueBody{forged}, p));
    }
    for (auto pid : corrupted_) {
      auto proof = ctl.sample_as(pid, mv_tag(m.instance, "converge"));
      if (!proof) continue;
      ConvergeBody body{true, qc};
      ctl.inject_all(pid, forge(ctl, pid, MsgKind::MvConverge, m, body, *proof));
    }
  }

 private:
  std::set<std::string> done_;
};

}  // namespace

const std::vector<std::string>& adversary_names() {
  static const std::vector<std::string> names{"none", "crash", "equivocate", "qc_withhold", "coin_splitter",
                                              "alert_skew"};
  return names;
}

std::unique_ptr<Adversary> make_adversary(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string name(spec.substr(0, colon));
  const std::string opts = colon == std::string_view::npos ? "" : std::string(spec.substr(colon + 1));
  auto no_opts = [&] {
    if (!opts.empty()) throw std::invalid_argument("adversary '" + name + "' takes no options");
  };
  if (name == "none") {
    if (opts.empty() || opts == "random") return std::make_unique<PassiveAdversary>(DeliveryOrder::Random);
    if (opts == "fifo") return std::make_unique<PassiveAdversary>(DeliveryOrder::Fifo);
    throw std::invalid_argument("adversary 'none' accepts random or fifo");
  }
  if (name == "crash") {
    if (opts.empty()) return std::make_unique<Crash>();
    std::size_t used = 0;
    unsigned long k = 0;
    try {
      k = std::stoul(opts, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != opts.size()) throw std::invalid_argument("adversary 'crash' expects a corruption count");
    return std::make_unique<Crash>(static_cast<std::uint32_t>(k));
  }
  if (name == "equivocate") {
    no_opts();
    return std::make_unique<Equivocate>();
  }
  if (name == "qc_withhold") {
    no_opts();
    return std::make_unique<QcWithhold>();
  }
  if (name == "coin_splitter") {
    no_opts();
    return std::make_unique<CoinSplitter>();
  }
  if (name == "alert_skew") {
    no_opts();
    return std::make_unique<AlertSkew>();
  }
  throw std::invalid_argument("unknown adversary '" + name + "'");
}

}  // namespace sqba
