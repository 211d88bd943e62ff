#include <gtest/gtest.h>

#include "sqba/adversary.hpp"
#include "sqba/binary_ba.hpp"
#include "sqba/experiment.hpp"
#include "sqba/protocols.hpp"

using namespace sqba;

namespace {

ValueSet set_of(std::initializer_list<Value> vs) {
  ValueSet s;
  for (const auto& v : vs) insert_value(s, v);
  return s;
}

ExperimentConfig small(const std::string& inputs, const std::string& adversary = "none") {
  ExperimentConfig cfg;
  cfg.protocol = Protocol::Binary;
  cfg.params = derive_params(64, 0.2, 0.04);
  cfg.inputs = inputs;
  cfg.adversary = adversary;
  cfg.runs = 6;
  return cfg;
}

}  // namespace

TEST(BinaryBa, Classification) {
  auto c = classify_approver_output(set_of({Value::bit(true)}));
  EXPECT_EQ(c.kind, RoundCase::Decide);
  EXPECT_EQ(c.bit, true);
  c = classify_approver_output(set_of({Value::bit(false), Value::bottom()}));
  EXPECT_EQ(c.kind, RoundCase::Adopt);
  EXPECT_EQ(c.bit, false);
  c = classify_approver_output(set_of({Value::bottom()}));
  EXPECT_EQ(c.kind, RoundCase::Coin);
  EXPECT_FALSE(c.bit.has_value());
  c = classify_approver_output(set_of({Value::bit(false), Value::bit(true)}));
  EXPECT_EQ(c.kind, RoundCase::Conflict);
}

TEST(BinaryBa, UnanimousDecidesInRoundOne) {
  for (const char* in : {"unanimous:0", "unanimous:1"}) {
    for (const auto& r : run_batch(small(in))) {
      EXPECT_EQ(r.violations.safety(), 0u);
      EXPECT_TRUE(r.all_round_one);
      EXPECT_EQ(r.decided, std::string(in).substr(10));
    }
  }
}

TEST(BinaryBa, SplitInputsAgree) {
  for (const char* adv : {"none", "crash", "equivocate", "coin_splitter"}) {
    for (const auto& r : run_batch(small("split:0,1", adv))) {
      EXPECT_EQ(r.violations.safety(), 0u) << adv << " seed " << r.seed;
      EXPECT_FALSE(r.blocked) << adv << " seed " << r.seed;
      EXPECT_FALSE(r.decided.empty());
    }
  }
}

TEST(BinaryBa, RoundStructureAndPostDecisionRounds) {
  RunConfig cfg;
  cfg.params = derive_params(64, 0.2, 0.04);
  cfg.seed = 9;
  PassiveAdversary adv;
  Simulation sim(cfg, adv);
  std::vector<Value> inputs;
  for (ProcessId p = 0; p < 64; ++p) inputs.push_back(Value::bit(p % 2 == 0));
  sim.populate(make_factory(Protocol::Binary, inputs));
  const auto trace = sim.run();
  ASSERT_FALSE(trace.blocked);
  std::uint32_t max_round = 0;
  for (ProcessId p = 0; p < 64; ++p) max_round = std::max(max_round, *trace.decisions[p].round);
  for (ProcessId p = 0; p < 64; ++p) {
    const auto& ba = dynamic_cast<BinaryProcess&>(sim.process(p)).ba();
    ASSERT_TRUE(ba.decided());
    EXPECT_LE(ba.rounds_started(), max_round + cfg.post_decision_rounds);
    EXPECT_TRUE(ba.halted() || ba.rounds_started() == max_round + cfg.post_decision_rounds);
    for (const auto& rec : ba.history()) {
      if (!rec.vals2) continue;
      ASSERT_TRUE(rec.vals1 && rec.propose && rec.coin);
      // The second approver is fed what the first one produced.
      if (rec.vals1->size() == 1 && !rec.vals1->front().is_bottom()) {
        EXPECT_EQ(*rec.propose, rec.vals1->front());
      } else {
        EXPECT_TRUE(rec.propose->is_bottom());
      }
    }
    // Participation continues with est equal to the decision.
    const auto dr = *ba.decision_round();
    for (const auto& rec : ba.history()) {
      if (rec.round > dr) EXPECT_EQ(rec.est_at_start, *ba.decision());
    }
  }
}

TEST(BinaryBa, RoundCapStopsUndecidedRuns) {
  ExperimentConfig cfg = small("split:0,1");
  cfg.round_cap = 1;
  cfg.runs = 20;
  int capped = 0;
  for (const auto& r : run_batch(cfg)) {
    EXPECT_EQ(r.violations.safety(), 0u);
    if (r.blocked) {
      EXPECT_EQ(r.block_reason, "RoundCapExceeded");
      ++capped;
    }
  }
  EXPECT_GT(capped, 0);
}
