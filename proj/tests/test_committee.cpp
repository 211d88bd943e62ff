#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "sqba/committee.hpp"

using namespace sqba;

namespace {

// P[all good events] for a committee with no Byzantine members, summed from
// the exact binomial distribution of its size.
double acceptance_probability(const SystemParams& p) {
  double total = 0;
  for (std::uint32_t s = 0; s <= p.n; ++s) {
    if (!check_good_events(p, s, s, 0).all()) continue;
    const double at_most = binomial_tail(p.n, p.sampling_probability(), s, TailSide::Lower);
    const double below = s == 0 ? 0.0 : binomial_tail(p.n, p.sampling_probability(), s - 1, TailSide::Lower);
    total += at_most - below;
  }
  return total;
}

}  // namespace

TEST(Committee, GoodEventDefinitions) {
  const auto p = derive_params(256, 0.25, 0.05);  // lambda 44.36, W 37, B 12
  auto e = check_good_events(p, 45, 40, 5);
  EXPECT_TRUE(e.all());
  e = check_good_events(p, 45, 32, 13);
  EXPECT_FALSE(e.s3);
  EXPECT_FALSE(e.s4);
  e = check_good_events(p, 47, 47, 0);
  EXPECT_FALSE(e.s1);
  EXPECT_TRUE(e.s6);
  e = check_good_events(p, 42, 42, 0);
  EXPECT_FALSE(e.s2);
  e = check_good_events(p, 50, 50, 0);
  EXPECT_FALSE(e.s6);
  EXPECT_TRUE(e.s5);
}

TEST(Committee, ResampledTag) {
  EXPECT_EQ(resampled_tag("T", 0), "T");
  EXPECT_NE(resampled_tag("T", 1), resampled_tag("T", 2));
  EXPECT_EQ(resampled_tag("T", 1).substr(0, 1), "T");
}

TEST(Committee, GuardEnforcesGoodEvents) {
  const auto p = derive_params(256, 0.25, 0.05);
  const auto keys = KeyRegistry::generate(p.n, 11);
  const ByzantineFn byz = [](ProcessId pid) { return pid % 16 == 0; };  // 16 Byzantine
  for (int t = 0; t < 50; ++t) {
    const auto rec = conditioned_sampling_guard(keys, p, "guard/" + std::to_string(t), byz);
    EXPECT_TRUE(rec.events.all());
    EXPECT_GE(rec.correct, p.W);
    EXPECT_LE(rec.byzantine, p.B);
    std::uint32_t size = 0;
    for (auto m : rec.members) size += m;
    EXPECT_EQ(size, rec.size);
    EXPECT_EQ(rec.effective_tag, resampled_tag(rec.base_tag, rec.rejections));
  }
}

TEST(Committee, GuardCapIsAConfigError) {
  const auto p = custom_params(64, 0, 10.0, 60, 0);  // W above any plausible size
  const auto keys = KeyRegistry::generate(p.n, 12);
  EXPECT_THROW(conditioned_sampling_guard(keys, p, "cap", nullptr, 20), GuardCapExceeded);
}

TEST(Committee, RejectionCountMatchesOracle) {
  const auto p = derive_params(256, 0.25, 0.05);
  const auto keys = KeyRegistry::generate(p.n, 13);
  const double accept = acceptance_probability(p);
  const double expected = 1.0 / accept - 1.0;
  const double sd = std::sqrt((1.0 - accept) / (accept * accept));
  const int samples = 1000;
  double total = 0;
  for (int t = 0; t < samples; ++t) total += conditioned_sampling_guard(keys, p, "rej/" + std::to_string(t), nullptr).rejections;
  EXPECT_NEAR(total / samples, expected, 3 * sd / std::sqrt(samples));
}

TEST(Committee, FaithfulS3FailureMatchesOracle) {
  const auto p = derive_params(200, 0.25, 0.05);
  const auto keys = KeyRegistry::generate(p.n, 14);
  const double oracle = binomial_tail(p.n, p.sampling_probability(), p.W - 1, TailSide::Lower);
  const int samples = 2000;
  int failures = 0;
  for (int t = 0; t < samples; ++t) {
    const auto tag = "s3/" + std::to_string(t);
    const auto rec = realize_committee(keys, p, tag, tag, nullptr);
    if (!rec.events.s3) ++failures;
  }
  const double se = std::sqrt(oracle * (1 - oracle) / samples);
  EXPECT_NEAR(static_cast<double>(failures) / samples, oracle, 3 * se);
  EXPECT_NEAR(oracle, 0.09, 0.02);
}

TEST(Committee, OracleFixesCommitteesOnce) {
  const auto p = derive_params(256, 0.25, 0.05);
  const auto keys = KeyRegistry::generate(p.n, 15);
  CommitteeOracle oracle(keys, p, SamplingMode::Conditioned, nullptr);
  const auto& a = oracle.resolve("x");
  const auto& b = oracle.resolve("x");
  EXPECT_EQ(&a, &b);
  EXPECT_EQ(oracle.fixed_in_order().size(), 1u);
  for (ProcessId pid = 0; pid < p.n; ++pid) {
    const auto s = oracle.sample(pid, "x");
    EXPECT_EQ(s.elected, a.members[pid] != 0);
    if (s.elected) {
      EXPECT_TRUE(oracle.committee_val("x", pid, s.proof));
      EXPECT_EQ(s.proof.tag, a.effective_tag);
    }
  }
}

TEST(Committee, NoteCorruptionUpdatesRecords) {
  const auto p = derive_params(256, 0.25, 0.05);
  const auto keys = KeyRegistry::generate(p.n, 16);
  CommitteeOracle oracle(keys, p, SamplingMode::Conditioned, nullptr);
  const auto& rec = oracle.resolve("y");
  ProcessId member = 0;
  while (!rec.members[member]) ++member;
  const auto correct = rec.correct;
  EXPECT_TRUE(oracle.corruption_keeps_good_events(member));
  oracle.note_corruption(member);
  EXPECT_EQ(rec.correct, correct - 1);
  EXPECT_EQ(rec.byzantine, 1u);

  // Push the committee to its limits: corrupt members until one more breaks an event.
  for (ProcessId pid = 0; pid < p.n; ++pid) {
    if (pid == member || !rec.members[pid]) continue;
    if (!oracle.corruption_keeps_good_events(pid)) break;
    oracle.note_corruption(pid);
  }
  EXPECT_TRUE(rec.events.all());
  EXPECT_TRUE(rec.byzantine == p.B || rec.correct == p.W);

  CommitteeOracle faithful(keys, p, SamplingMode::Faithful, nullptr);
  faithful.resolve("y");
  EXPECT_TRUE(faithful.corruption_keeps_good_events(member));
}

TEST(Committee, ModeNames) {
  EXPECT_EQ(mode_name(SamplingMode::Faithful), "faithful");
  EXPECT_EQ(mode_name(SamplingMode::Conditioned), "conditioned");
}
