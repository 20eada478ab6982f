#include <gtest/gtest.h>

#include "coact/session.hpp"
#include "coact/wire.hpp"
#include "support/fixtures.hpp"

namespace coact {
namespace {

RunReport run(const std::string& name, SessionOptions options = {}) {
  Session s(fixtures::load(name), options);
  return s.run();
}

TEST(Session, PreSatisfiedGoalEndsWithoutTicks) {
  const auto r = run("pre_satisfied");
  EXPECT_EQ(r.outcome, "achieved");
  EXPECT_TRUE(r.goal_achieved);
  EXPECT_EQ(r.ticks, 0);
  EXPECT_TRUE(r.comm_counts.empty());
}

TEST(Session, HandoverCompletesWithinThirtyTicks) {
  Session s(fixtures::load("handover"));
  const auto r = s.run();
  EXPECT_EQ(r.outcome, "achieved");
  EXPECT_LE(r.ticks, 30);
  EXPECT_TRUE(s.world().agent("BOB").holding.has_value());
}

TEST(Session, WalkawayAbortsTheHandover) {
  const auto r = run("handover_walkaway");
  EXPECT_EQ(r.outcome, "aborted");
  ASSERT_TRUE(r.abort_reason);
  EXPECT_NE(r.abort_reason->find("disengaged"), std::string::npos) << *r.abort_reason;
  EXPECT_FALSE(r.goal_achieved);
}

TEST(Session, TickBudgetEndsInTimeout) {
  SessionOptions opts;
  opts.max_ticks = 3;
  const auto r = run("kitchen_cooperative", opts);
  EXPECT_EQ(r.outcome, "timeout");
  EXPECT_EQ(r.abort_reason, "TIMEOUT");
  EXPECT_EQ(r.ticks, 3);
}

TEST(Session, ReluctantPartnerGetsAPlanWithoutTheRefusedTasks) {
  Session s(fixtures::load("reluctant"));
  const auto r = s.run();
  EXPECT_EQ(r.outcome, "achieved");
  EXPECT_EQ(r.comm_counts.at("RejectPlan"), 1);
  EXPECT_EQ(r.replans, 1);
  ASSERT_GE(r.plan_ids.size(), 2u);
  for (const auto& rec : s.records())
    for (const auto& e : rec.events)
      if (e.actor == "BOB") EXPECT_NE(e.action.kind, ActionKind::PickUp) << rec.tick;
}

TEST(Session, DistractedPartnerTriggersAnInformThatRepairsTheBelief) {
  const auto coop = run("kitchen_cooperative");
  const auto dist = run("kitchen_distracted");
  EXPECT_EQ(coop.divergences_detected, 0);
  EXPECT_FALSE(coop.comm_counts.contains("Inform"));
  EXPECT_GE(dist.divergences_detected, 1);
  EXPECT_EQ(dist.divergences_resolved, dist.divergences_detected);
  EXPECT_EQ(dist.comm_counts.at("Inform"), dist.divergences_detected);
  EXPECT_EQ(dist.outcome, "achieved");
}

TEST(Session, SameSeedGivesIdenticalRecords) {
  for (const auto* name : {"kitchen_distracted", "two_humans", "shared_shelf"}) {
    Session a(fixtures::load(name)), b(fixtures::load(name));
    a.run();
    b.run();
    ASSERT_EQ(a.records().size(), b.records().size()) << name;
    for (std::size_t i = 0; i < a.records().size(); ++i)
      EXPECT_EQ(to_json(a.records()[i]), to_json(b.records()[i])) << name << " tick " << i;
  }
}

TEST(Session, NoTickHasRobotAndHumanManipulatingOneWorkspace) {
  int runs = 0;
  for (const auto* name : {"handover", "handover_walkaway", "kitchen_cooperative", "kitchen_distracted", "reluctant",
                           "shared_shelf", "table_setting_efficient", "table_setting_teach", "two_humans",
                           "disengaged_solo", "intention_demo"}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto sc = fixtures::load(name);
      Session s(sc, SessionOptions{seed, std::nullopt});
      s.run();
      ++runs;
      for (const auto& rec : s.records())
        EXPECT_TRUE(safety_violations(rec, sc.world).empty()) << name << " seed " << seed << " tick " << rec.tick;
    }
  }
  EXPECT_GE(runs, 30);
}

TEST(Session, SharedShelfExercisesTheSafetyHold) {
  Session s(fixtures::load("shared_shelf"));
  const auto r = s.run();
  EXPECT_GE(r.safety_holds, 1);
  int flagged = 0;
  for (const auto& rec : s.records()) flagged += rec.safety_hold;
  EXPECT_EQ(flagged, r.safety_holds);
}

TEST(Session, ReportCountsMatchTheRecords) {
  Session s(fixtures::load("two_humans"));
  const auto r = s.run();
  std::map<std::string, int> comm;
  std::map<EntityId, int> actions;
  int idle = 0;
  for (const auto& rec : s.records()) {
    for (const auto& c : rec.comm) ++comm[std::string(to_string(c.kind))];
    for (const auto& e : rec.events) {
      const bool wait = e.action.kind == ActionKind::Wait;
      if (e.succeeded() && !wait) ++actions[e.actor];
      if (wait && e.actor != s.scenario().robot) ++idle;
    }
  }
  EXPECT_EQ(r.comm_counts, comm);
  EXPECT_EQ(r.actions, actions);
  EXPECT_EQ(r.human_idle_ticks, idle);
  EXPECT_EQ(r.ticks, static_cast<Tick>(s.records().size()) - 1);
}

TEST(Session, FinishedSessionRefusesToStep) {
  Session s(fixtures::load("pre_satisfied"));
  EXPECT_TRUE(s.finished());
  EXPECT_THROW(s.step(), std::logic_error);
}

}  // namespace
}  // namespace coact
