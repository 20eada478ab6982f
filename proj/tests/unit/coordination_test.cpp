#include <gtest/gtest.h>

#include <random>

#include "coact/coordination.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace coact {
namespace {

using fixtures::add_object;
using fixtures::make_agent;
using fixtures::make_grid;

constexpr auto kEngaged = static_cast<std::size_t>(Engagement::engaged);
constexpr auto kDisengaged = static_cast<std::size_t>(Engagement::disengaged);

double sum(const EngagementBelief& b) { return b[0] + b[1] + b[2]; }

TEST(EngagementFilter, MatchesMatrixArithmeticOnRandomCases) {
  std::mt19937_64 rng(1000);
  std::uniform_real_distribution<double> u(0.01, 1.0), stick(0.34, 0.99);
  std::uniform_int_distribution<int> cue(0, 3);
  for (int trial = 0; trial < 1000; ++trial) {
    EngagementParams p;
    p.stickiness = stick(rng);
    for (auto& row : p.likelihood) {
      double z = 0.0;
      for (auto& v : row) z += v = u(rng);
      for (auto& v : row) v /= z;
    }
    EngagementBelief b{u(rng), u(rng), u(rng)};
    const double z = sum(b);
    for (auto& v : b) v /= z;
    for (int k = 0; k < 10; ++k) {
      const auto c = static_cast<EngagementCue>(cue(rng));
      const auto ours = engagement_update(p, b, c);
      const auto theirs = oracle::engagement_matrix(p, b, c);
      for (std::size_t s = 0; s < 3; ++s) EXPECT_NEAR(ours[s], theirs[s], 1e-12);
      EXPECT_NEAR(sum(ours), 1.0, 1e-9);
      for (double v : ours) EXPECT_GE(v, 0.0);
      b = ours;
    }
  }
}

TEST(EngagementFilter, UniformLikelihoodKeepsUniformBelief) {
  EngagementParams p;
  for (auto& row : p.likelihood) row = {0.25, 0.25, 0.25, 0.25};
  const auto b = engagement_update(p, kUniformEngagement, EngagementCue::idle);
  for (double v : b) EXPECT_NEAR(v, 1.0 / 3, 1e-15);
}

TEST(EngagementFilter, ThreeLooksMakeThePartnerEngaged) {
  const EngagementParams p;
  auto b = kUniformEngagement, o = kUniformEngagement;
  for (int i = 0; i < 3; ++i) {
    b = engagement_update(p, b, EngagementCue::lookingAt);
    o = oracle::engagement_matrix(p, o, EngagementCue::lookingAt);
  }
  EXPECT_NEAR(b[kEngaged], o[kEngaged], 1e-12);
  EXPECT_GT(b[kEngaged], 0.6);
}

TEST(EngagementFilter, FiveStepsAwayMakeThePartnerDisengaged) {
  const EngagementParams p;
  auto b = kUniformEngagement;
  for (int i = 0; i < 5; ++i) b = engagement_update(p, b, EngagementCue::movingAway);
  EXPECT_GT(b[kDisengaged], b[kEngaged]);
  EXPECT_GT(b[kDisengaged], b[static_cast<std::size_t>(Engagement::distracted)]);
}

TEST(ObserveCue, GazeBeatsMotionAndDistanceDecidesDirection) {
  GridWorld w = make_grid({"......."});
  w.add_agent(make_agent("BOB", AgentKind::human, {3, 0}, Heading::W));
  w.add_agent(make_agent("ROBOT", AgentKind::robot, {0, 0}, Heading::E));
  const GridWorld still = step(w, {}).world;
  EXPECT_EQ(observe_cue(w, still, assess(still), "BOB", "ROBOT"), EngagementCue::lookingAt);
  const GridWorld away = step(w, {{"BOB", PrimitiveAction::move(Heading::E)}}).world;
  EXPECT_EQ(observe_cue(w, away, assess(away), "BOB", "ROBOT"), EngagementCue::movingAway);
  GridWorld facing_off = w;
  facing_off.agent_mut("BOB").heading = Heading::E;
  const GridWorld idle = step(facing_off, {}).world;
  EXPECT_EQ(observe_cue(facing_off, idle, assess(idle), "BOB", "ROBOT"), EngagementCue::idle);
}

/// ROBOT holding CUP, BOB two cells east.
GridWorld handover_world(int gap) {
  GridWorld w = make_grid({"........"});
  w.add_agent(make_agent("ROBOT", AgentKind::robot, {1, 0}, Heading::E));
  w.add_agent(make_agent("BOB", AgentKind::human, {1 + gap, 0}, Heading::W));
  add_object(w, "CUP", "cup", {0, 0});
  return step(w, {{"ROBOT", PrimitiveAction::pick_up("CUP")}}).world;
}

TEST(Handover, AdjacentEngagedPartnerGetsTheOffer) {
  const auto w = handover_world(1);
  HandoverState s;
  const auto d = handover_step(s, EngagementParams{}, w, "ROBOT", "BOB", "CUP", {0.9, 0.05, 0.05}, 1);
  EXPECT_EQ(s.phase, HandoverState::Phase::extend);
  EXPECT_EQ(d.action, PrimitiveAction::give("CUP", "BOB"));
  EXPECT_FALSE(d.signal);
}

TEST(Handover, FarPartnerIsApproached) {
  const auto w = handover_world(4);
  HandoverState s;
  const auto d = handover_step(s, EngagementParams{}, w, "ROBOT", "BOB", "CUP", kUniformEngagement, 1);
  EXPECT_EQ(s.phase, HandoverState::Phase::approach);
  EXPECT_EQ(d.action, PrimitiveAction::move(Heading::E));
}

TEST(Handover, WaitingRobotLooksAtThePartnerEveryFifthTick) {
  const auto w = handover_world(1);
  HandoverState s;
  const EngagementBelief distracted{0.2, 0.7, 0.1};
  std::vector<int> signalled;
  for (int t = 1; t <= 10; ++t) {
    const auto d = handover_step(s, EngagementParams{}, w, "ROBOT", "BOB", "CUP", distracted, t);
    EXPECT_EQ(s.phase, HandoverState::Phase::waiting);
    if (d.signal) {
      signalled.push_back(t);
      EXPECT_EQ(d.signal->kind, CommKind::Signal);
      EXPECT_EQ(d.signal->signal_target, "BOB");
      EXPECT_EQ(d.action, PrimitiveAction::look_at("BOB"));
    } else {
      EXPECT_EQ(d.action, PrimitiveAction::wait());
    }
  }
  EXPECT_EQ(signalled, (std::vector<int>{5, 10}));
}

TEST(Handover, FiveDisengagedTicksAbort) {
  const auto w = handover_world(1);
  HandoverState s;
  const EngagementBelief gone{0.1, 0.1, 0.8};
  for (int t = 1; t <= 4; ++t) {
    handover_step(s, EngagementParams{}, w, "ROBOT", "BOB", "CUP", gone, t);
    EXPECT_FALSE(s.finished());
  }
  handover_step(s, EngagementParams{}, w, "ROBOT", "BOB", "CUP", gone, 5);
  EXPECT_EQ(s.phase, HandoverState::Phase::aborted);
  EXPECT_EQ(s.abort_reason, "PARTNER_DISENGAGED");
}

TEST(Handover, StreakResetsWhenThePartnerReturns) {
  const auto w = handover_world(1);
  HandoverState s;
  for (int t = 1; t <= 4; ++t) handover_step(s, EngagementParams{}, w, "ROBOT", "BOB", "CUP", {0.1, 0.1, 0.8}, t);
  handover_step(s, EngagementParams{}, w, "ROBOT", "BOB", "CUP", {0.3, 0.4, 0.3}, 5);
  EXPECT_EQ(s.disengaged_streak, 0);
  EXPECT_FALSE(s.finished());
}

TEST(Handover, LostObjectAborts) {
  auto w = handover_world(1);
  w = step(w, {{"ROBOT", PrimitiveAction::place("CUP", {0, 0})}}).world;
  HandoverState s;
  s.phase = HandoverState::Phase::extend;
  handover_step(s, EngagementParams{}, w, "ROBOT", "BOB", "CUP", kUniformEngagement, 2);
  EXPECT_EQ(s.phase, HandoverState::Phase::aborted);
  EXPECT_EQ(s.abort_reason, "OBJECT_LOST");
}

TEST(Handover, CompletesOnceThePartnerHoldsTheObject) {
  auto w = handover_world(1);
  HandoverState s;
  auto d = handover_step(s, EngagementParams{}, w, "ROBOT", "BOB", "CUP", {0.9, 0.05, 0.05}, 1);
  w = step(w, {{"ROBOT", d.action}}).world;
  handover_step(s, EngagementParams{}, w, "ROBOT", "BOB", "CUP", {0.9, 0.05, 0.05}, 2);
  EXPECT_EQ(s.phase, HandoverState::Phase::done);
}

/// Two tables with their own workspaces; ROBOT holds a CUP next to TABLE1.
GridWorld two_tables() {
  GridWorld w = make_grid({"AA.BB", "....."}, {{'A', {false, "ROOM", "TABLE1_WS", "TABLE1"}},
                                                {'B', {false, "ROOM", "TABLE2_WS", "TABLE2"}}});
  w.add_agent(make_agent("ROBOT", AgentKind::robot, {1, 1}));
  w.add_agent(make_agent("BOB", AgentKind::human, {4, 1}));
  w.add_agent(make_agent("ANN", AgentKind::human, {0, 1}));
  add_object(w, "CUP", "cup", {2, 1});
  add_object(w, "PLATE", "plate", {3, 1});
  return step(w, {{"ROBOT", PrimitiveAction::pick_up("CUP")}, {"BOB", PrimitiveAction::pick_up("PLATE")}}).world;
}

TEST(SafetyGate, HumanPlacingInTheSameWorkspaceHoldsTheRobot) {
  const auto w = two_tables();
  const auto place = PrimitiveAction::place("CUP", {1, 0});
  EXPECT_TRUE(safety_gate(w, "ROBOT", place, {"TABLE1_WS"}).hold);
  GridWorld ann_busy = w;
  add_object(ann_busy, "FORK", "fork", {0, 0});
  const std::map<EntityId, PrimitiveAction> ann_takes{{"ANN", PrimitiveAction::pick_up("FORK")}};
  EXPECT_TRUE(safety_gate(ann_busy, "ROBOT", place, {}, &ann_takes).hold);
}

TEST(SafetyGate, OtherWorkspacesAndNavigationAreAllowed) {
  const auto w = two_tables();
  EXPECT_FALSE(safety_gate(w, "ROBOT", PrimitiveAction::place("CUP", {1, 0}), {"TABLE2_WS"}).hold);
  const std::map<EntityId, PrimitiveAction> bob_places{{"BOB", PrimitiveAction::place("PLATE", {4, 0})}};
  EXPECT_FALSE(safety_gate(w, "ROBOT", PrimitiveAction::place("CUP", {1, 0}), {}, &bob_places).hold);
  for (const auto& a : {PrimitiveAction::move(Heading::N), PrimitiveAction::look_at("BOB"),
                        PrimitiveAction::point_at("PLATE"), PrimitiveAction::wait()})
    EXPECT_FALSE(safety_gate(w, "ROBOT", a, {"TABLE1_WS", "TABLE2_WS"}).hold) << a.to_string();
}

TEST(SafetyGate, TargetsOutsideWorkspacesAreNeverHeld) {
  const auto w = two_tables();
  EXPECT_FALSE(safety_gate(w, "ROBOT", PrimitiveAction::place("CUP", {2, 1}), {"TABLE1_WS", "TABLE2_WS"}).hold);
  EXPECT_EQ(workspace_key(w, {2, 1}), "");
  EXPECT_EQ(workspace_key(w, {0, 0}), "TABLE1_WS");
  EXPECT_EQ(workspace_key(w, {-1, 0}), "");
}

TEST(Express, SignalsBecomeKernelActions) {
  const auto look = CommAct::signal_act("ROBOT", "BOB", ActionKind::LookAt, "MUG", 1);
  const auto point = CommAct::signal_act("ROBOT", "BOB", ActionKind::PointAt, "MUG", 1);
  EXPECT_EQ(express(look), PrimitiveAction::look_at("MUG"));
  EXPECT_EQ(express(point), PrimitiveAction::point_at("MUG"));
}

TEST(Express, LookingAtAFarTargetStillTurnsTheHead) {
  GridWorld w = make_grid({"...................."});
  w.add_agent(make_agent("ROBOT", AgentKind::robot, {19, 0}, Heading::E));
  add_object(w, "MUG", "mug", {0, 0});
  const auto look = CommAct::signal_act("ROBOT", "BOB", ActionKind::LookAt, "MUG", 0);
  const auto r = step(w, {{"ROBOT", express(look)}});
  EXPECT_TRUE(r.events[0].succeeded());
  EXPECT_EQ(r.world.agent("ROBOT").heading, Heading::W);
  EXPECT_FALSE(assess(r.world).contains("ROBOT canSee MUG"));
}

}  // namespace
}  // namespace coact
