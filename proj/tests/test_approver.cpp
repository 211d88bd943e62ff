#include <gtest/gtest.h>

#include "sqba/adversary.hpp"
#include "sqba/approver.hpp"
#include "sqba/experiment.hpp"
#include "sqba/protocols.hpp"

using namespace sqba;

namespace {

RunConfig tiny(SamplingMode mode = SamplingMode::Faithful) {
  RunConfig c;
  c.params = custom_params(4, 0, 4.0, 3, 0);  // everyone sits on every committee
  c.sampling = mode;
  c.seed = 21;
  return c;
}

const Approver& approver_of(Simulation& sim, ProcessId pid) {
  return dynamic_cast<ApproverProcess&>(sim.process(pid)).approver();
}

MessagePtr find_ok(const Simulation& sim) {
  for (const auto& m : sim.messages()) {
    if (m->kind == MsgKind::ApproverOk) return m;
  }
  return nullptr;
}

MessagePtr forged_echo(Simulation& sim, ProcessId pid, const Value& v) {
  Message m;
  m.kind = MsgKind::ApproverEcho;
  m.instance = Bytes(kApproverInstance);
  m.round = 1;
  m.slot = 1;
  m.body = ValueBody{v};
  m.committee = sim.committees().sample(pid, approver_tag(kApproverInstance, 1, 1, "echo", &v)).proof;
  return seal(std::move(m), sim.keys().key(pid));
}

}  // namespace

TEST(Approver, HandTraceUnanimous) {
  PassiveAdversary adv(DeliveryOrder::Fifo);
  Simulation sim(tiny(), adv);
  const std::vector<Value> inputs(4, Value::of("a"));
  sim.populate(make_factory(Protocol::Approver, inputs));
  const auto trace = sim.run();
  EXPECT_FALSE(trace.blocked);
  for (ProcessId p = 0; p < 4; ++p) {
    const auto& a = approver_of(sim, p);
    ASSERT_TRUE(a.done());
    EXPECT_EQ(a.output(), ValueSet{Value::of("a")});
    EXPECT_EQ(a.ok_sent(), Value::of("a"));
  }
  // 4 INIT, 4 ECHO, 4 OK broadcasts.
  EXPECT_EQ(trace.metrics.broadcasts_by_kind[static_cast<int>(MsgKind::ApproverInit)], 4u);
  EXPECT_EQ(trace.metrics.broadcasts_by_kind[static_cast<int>(MsgKind::ApproverEcho)], 4u);
  EXPECT_EQ(trace.metrics.broadcasts_by_kind[static_cast<int>(MsgKind::ApproverOk)], 4u);
}

TEST(Approver, AtMostOneOkPerProcess) {
  PassiveAdversary adv;
  Simulation sim(tiny(), adv);
  const std::vector<Value> inputs{Value::of("a"), Value::of("b"), Value::of("a"), Value::of("b")};
  sim.populate(make_factory(Protocol::Approver, inputs));
  sim.run();
  std::vector<int> oks(4, 0);
  for (const auto& m : sim.messages()) {
    if (m->kind == MsgKind::ApproverOk) ++oks[m->sender];
  }
  for (int c : oks) EXPECT_LE(c, 1);
}

TEST(Approver, OkProofChecks) {
  PassiveAdversary adv;
  Simulation sim(tiny(), adv);
  const std::vector<Value> inputs(4, Value::of("a"));
  sim.populate(make_factory(Protocol::Approver, inputs));
  sim.run();
  const auto ok = find_ok(sim);
  ASSERT_NE(ok, nullptr);
  const auto& body = std::get<OkBody>(ok->body);
  const auto& ctx = sim.verifier();
  EXPECT_TRUE(verify_ok_proof(ctx, body, kApproverInstance, 1, 1));
  EXPECT_TRUE(ctx.valid(*ok));

  auto short_body = body;
  short_body.echoes.pop_back();
  EXPECT_FALSE(verify_ok_proof(ctx, short_body, kApproverInstance, 1, 1));

  auto dup = body;
  dup.echoes[1] = dup.echoes[0];
  EXPECT_FALSE(verify_ok_proof(ctx, dup, kApproverInstance, 1, 1));

  auto mixed = body;
  ProcessId other = mixed.echoes[2]->sender;
  mixed.echoes[2] = forged_echo(sim, other, Value::of("b"));
  EXPECT_TRUE(ctx.valid(*mixed.echoes[2]));
  EXPECT_FALSE(verify_ok_proof(ctx, mixed, kApproverInstance, 1, 1));

  EXPECT_FALSE(verify_ok_proof(ctx, body, kApproverInstance, 2, 1));
  EXPECT_FALSE(verify_ok_proof(ctx, body, "other", 1, 1));
}

TEST(Approver, TamperedEchoIsInvalid) {
  PassiveAdversary adv;
  Simulation sim(tiny(), adv);
  const std::vector<Value> inputs(4, Value::of("a"));
  sim.populate(make_factory(Protocol::Approver, inputs));
  sim.run();
  const auto ok = find_ok(sim);
  ASSERT_NE(ok, nullptr);
  auto echo = *std::get<OkBody>(ok->body).echoes[0];
  echo.checked_by = nullptr;
  echo.body = ValueBody{Value::of("z")};  // content no longer matches the digest
  EXPECT_FALSE(sim.verifier().valid(echo));
}

TEST(Approver, SplitInputsKeepGradedAgreement) {
  ExperimentConfig cfg;
  cfg.protocol = Protocol::Approver;
  cfg.params = derive_params(64, 0.2, 0.04);
  cfg.inputs = "split:a,b";
  cfg.runs = 10;
  for (const auto& r : run_batch(cfg)) {
    EXPECT_EQ(r.violations.safety(), 0u) << r.seed;
    EXPECT_FALSE(r.blocked);
  }
}

TEST(Approver, EquivocationCannotBreakValidity) {
  ExperimentConfig cfg;
  cfg.protocol = Protocol::Approver;
  cfg.params = derive_params(64, 0.2, 0.04);
  cfg.inputs = "unanimous:1";
  cfg.adversary = "equivocate";
  cfg.runs = 10;
  for (const auto& r : run_batch(cfg)) {
    EXPECT_EQ(r.violations.validity, 0u) << r.seed;
    EXPECT_EQ(r.decided, "{1}");
    EXPECT_FALSE(r.blocked);
  }
}
