#include <gtest/gtest.h>

#include <functional>
#include <map>
#include <random>
#include <set>

#include "coact/facts.hpp"
#include "support/fixtures.hpp"

namespace coact {
namespace {

using fixtures::add_object;
using fixtures::make_agent;
using fixtures::make_grid;

std::set<std::string> as_set(const std::vector<Fact>& facts) {
  std::set<std::string> out;
  for (const auto& f : facts) out.insert(f.to_string());
  return out;
}

TEST(Assess, EmptyWorldHasNoFacts) {
  EXPECT_TRUE(assess(make_grid({"...", "..."})).empty());
}

TEST(Assess, AdjacentObjectsOnATableAreNextToEachOther) {
  GridWorld w = make_grid({"....", "TT..", "...."}, {{'T', {false, "KITCHEN", "", "TABLE"}}});
  add_object(w, "MUG", "mug", {0, 1});
  add_object(w, "BOTTLE", "bottle", {1, 1}, {{"isFull", "TRUE"}});
  const auto f = assess(w);
  EXPECT_TRUE(f.contains("MUG isNextTo BOTTLE"));
  EXPECT_TRUE(f.contains("BOTTLE isNextTo MUG"));
  EXPECT_TRUE(f.contains("MUG isOn TABLE"));
  EXPECT_TRUE(f.contains("MUG isIn KITCHEN"));
  EXPECT_TRUE(f.contains("BOTTLE isFull TRUE"));
}

GridWorld walled_room(bool wall) {
  GridWorld w = make_grid({".....", "..#..", "..#..", "..#..", "....."});
  if (!wall) w = make_grid({".....", ".....", ".....", ".....", "....."});
  w.add_agent(make_agent("BOB", AgentKind::human, {0, 2}, Heading::E));
  add_object(w, "MUG", "mug", {4, 2});
  return w;
}

TEST(Assess, WallBlocksLineOfSight) {
  EXPECT_FALSE(assess(walled_room(true)).contains("BOB canSee MUG"));
  EXPECT_TRUE(assess(walled_room(false)).contains("BOB canSee MUG"));
}

TEST(Assess, VisibilityIsNotSymmetric) {
  GridWorld w = make_grid({"....."});
  w.add_agent(make_agent("BOB", AgentKind::human, {0, 0}, Heading::E));
  w.add_agent(make_agent("ROBOT", AgentKind::robot, {3, 0}, Heading::E));
  const auto f = assess(w);
  EXPECT_TRUE(f.contains("BOB canSee ROBOT"));
  EXPECT_TRUE(f.contains("BOB isLookingAt ROBOT"));
  EXPECT_FALSE(f.contains("ROBOT canSee BOB"));
}

TEST(Assess, VisibilityRespectsRangeAndCone) {
  GridWorld w = make_grid({"........"});
  Agent bob = make_agent("BOB", AgentKind::human, {0, 0}, Heading::E);
  bob.view_range = 3;
  w.add_agent(bob);
  add_object(w, "NEAR", "thing", {3, 0});
  add_object(w, "FAR", "thing", {4, 0});
  const auto f = assess(w);
  EXPECT_TRUE(f.contains("BOB canSee NEAR"));
  EXPECT_FALSE(f.contains("BOB canSee FAR"));
  w.agent_mut("BOB").heading = Heading::N;
  EXPECT_FALSE(assess(w).contains("BOB canSee NEAR"));
}

TEST(Assess, ReachIgnoresVisibilityButNotRooms) {
  GridWorld w = make_grid({"..k"}, {{'k', {false, "KITCHEN", "", ""}}});
  w.add_agent(make_agent("BOB", AgentKind::human, {1, 0}, Heading::E));
  add_object(w, "BEHIND", "thing", {0, 0});
  add_object(w, "OTHER_ROOM", "thing", {2, 0});
  const auto f = assess(w);
  EXPECT_TRUE(f.contains("BOB canReach BEHIND"));
  EXPECT_FALSE(f.contains("BOB canSee BEHIND"));
  EXPECT_FALSE(f.contains("BOB canReach OTHER_ROOM"));
  EXPECT_TRUE(f.contains("BOB canSee OTHER_ROOM"));
}

TEST(Assess, LookingAtPicksTheNearestEntityInTheNarrowCone) {
  GridWorld w = make_grid({"......", "......"});
  w.add_agent(make_agent("BOB", AgentKind::human, {0, 0}, Heading::E));
  add_object(w, "FAR", "thing", {4, 0});
  add_object(w, "NEAR", "thing", {2, 0});
  add_object(w, "SIDE", "thing", {1, 1});
  EXPECT_EQ(assess(w).value_of("BOB", Predicate::builtin(PredKind::isLookingAt)), "NEAR");
}

TEST(Assess, PointingPersistsForThreeTicks) {
  GridWorld w = make_grid({"....."});
  w.add_agent(make_agent("BOB", AgentKind::human, {0, 0}));
  add_object(w, "MUG", "mug", {4, 0});
  w = step(w, {{"BOB", PrimitiveAction::point_at("MUG")}}).world;
  std::vector<bool> seen;
  for (int t = 0; t < 6; ++t) {
    seen.push_back(assess(w).contains("BOB isPointingAt MUG"));
    w = step(w, {}).world;
  }
  EXPECT_EQ(seen, (std::vector<bool>{true, true, true, true, false, false}));
}

TEST(Assess, MovingTowardNeedsThreeWorldsAndAClosingDistance) {
  GridWorld w = make_grid({"......"});
  w.add_agent(make_agent("BOB", AgentKind::human, {0, 0}));
  add_object(w, "MUG", "mug", {5, 0});
  std::vector<GridWorld> history{w};
  w = step(w, {{"BOB", PrimitiveAction::move(Heading::E)}}).world;
  EXPECT_FALSE(assess(w, history).contains("BOB isMovingToward MUG"));
  history.push_back(w);
  w = step(w, {{"BOB", PrimitiveAction::move(Heading::E)}}).world;
  EXPECT_TRUE(assess(w, history).contains("BOB isMovingToward MUG"));
  history.push_back(w);
  w = step(w, {{"BOB", PrimitiveAction::move(Heading::W)}}).world;
  EXPECT_FALSE(assess(w, history).contains("BOB isMovingToward MUG"));
}

TEST(Diff, IdenticalBasesGiveNothing) {
  const auto f = assess(walled_room(false));
  EXPECT_TRUE(diff(f, f).empty());
}

TEST(Diff, ObjectMovedBetweenRooms) {
  GridWorld w = make_grid({"kkll"}, {{'k', {false, "KITCHEN", "", ""}}, {'l', {false, "LIVINGROOM", "", ""}}});
  add_object(w, "MUG", "mug", {0, 0});
  const auto before = assess(w);
  w.object_mut("MUG").placement.cell = {3, 0};
  const auto d = diff(before, assess(w));
  EXPECT_EQ(as_set(d.removed), (std::set<std::string>{"MUG isIn KITCHEN"}));
  EXPECT_EQ(as_set(d.added), (std::set<std::string>{"MUG isIn LIVINGROOM"}));
}

TEST(Diff, TurningTheHeadOnlySwapsGaze) {
  GridWorld w = make_grid({".....", ".....", "....."});
  w.add_agent(make_agent("BOB", AgentKind::human, {2, 1}, Heading::E));
  add_object(w, "EAST", "thing", {4, 1});
  add_object(w, "WEST", "thing", {0, 1});
  const auto before = assess(w);
  w = step(w, {{"BOB", PrimitiveAction::look_at("WEST")}}).world;
  const auto d = diff(before, assess(w));
  EXPECT_EQ(as_set(d.removed), (std::set<std::string>{"BOB canSee EAST", "BOB isLookingAt EAST"}));
  EXPECT_EQ(as_set(d.added), (std::set<std::string>{"BOB canSee WEST", "BOB isLookingAt WEST"}));
}

TEST(Diff, IgnoresTickStamps) {
  GridWorld w = walled_room(false);
  const auto a = assess(w);
  w.set_tick(9);
  const auto b = assess(w);
  EXPECT_NE(a.tick(), b.tick());
  EXPECT_TRUE(diff(a, b).empty());
}

class RandomWorldFacts : public ::testing::Test {
 protected:
  void for_each_world(int count, const std::function<void(const GridWorld&, const FactBase&)>& check) {
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<std::size_t> idx(0, 1000);
    for (int trial = 0; trial < count; ++trial) {
      GridWorld w = fixtures::random_world(rng);
      std::vector<GridWorld> history;
      for (int t = 0; t < 8; ++t) {
        check(w, assess(w, history));
        ActionMap acts;
        for (const auto& [id, a] : w.agents()) {
          const auto legal = legal_actions(w, id);
          acts[id] = legal[idx(rng) % legal.size()];
        }
        history.push_back(w);
        w = step(w, acts).world;
      }
    }
  }
};

TEST_F(RandomWorldFacts, FunctionalPredicatesAreSingleValued) {
  for_each_world(60, [](const GridWorld&, const FactBase& f) {
    std::map<std::pair<EntityId, Predicate>, int> count;
    for (const auto& fact : f.facts())
      if (fact.predicate.functional()) ++count[{fact.subject, fact.predicate}];
    for (const auto& [key, n] : count) EXPECT_EQ(n, 1) << key.first << " " << key.second.to_string();
  });
}

TEST_F(RandomWorldFacts, HeldObjectsHaveNoPlacementFacts) {
  for_each_world(60, [](const GridWorld& w, const FactBase& f) {
    for (const auto& [id, a] : w.agents()) {
      if (!a.holding) continue;
      EXPECT_TRUE(f.contains(id, Predicate::builtin(PredKind::isHolding), *a.holding));
      EXPECT_TRUE(f.objects_of(*a.holding, Predicate::builtin(PredKind::isOn)).empty());
      EXPECT_TRUE(f.objects_of(*a.holding, Predicate::builtin(PredKind::isIn)).empty());
    }
  });
}

TEST_F(RandomWorldFacts, NextToIsSymmetricAndFactsNameExistingEntities) {
  for_each_world(60, [](const GridWorld& w, const FactBase& f) {
    for (const auto& fact : f.facts()) {
      EXPECT_TRUE(w.has_entity(fact.subject)) << fact.to_string();
      if (fact.predicate.kind == PredKind::isNextTo)
        EXPECT_TRUE(f.contains(fact.object, fact.predicate, fact.subject)) << fact.to_string();
      if (fact.predicate.kind != PredKind::prop && fact.predicate.kind != PredKind::isIn)
        EXPECT_TRUE(w.has_entity(fact.object)) << fact.to_string();
      if (fact.predicate.kind == PredKind::isIn) EXPECT_TRUE(w.is_room(fact.object)) << fact.to_string();
    }
  });
}

TEST_F(RandomWorldFacts, AssessIsDeterministic) {
  for_each_world(20, [](const GridWorld& w, const FactBase& f) {
    const auto again = assess(w);
    // Motion facts depend on history; everything else must agree.
    FactBase a, b;
    for (const auto& x : f.facts())
      if (x.predicate.kind != PredKind::isMovingToward) a.insert(x.subject, x.predicate, x.object);
    for (const auto& x : again.facts()) b.insert(x.subject, x.predicate, x.object);
    EXPECT_EQ(a, b);
  });
}

TEST(FactWire, ParsesAndPrints) {
  const auto f = Fact::parse("MUG isFull TRUE");
  EXPECT_EQ(f.predicate, Predicate::prop("isFull"));
  EXPECT_EQ(f.to_string(), "MUG isFull TRUE");
  EXPECT_EQ(Fact::parse("BOB canReach MUG").predicate, Predicate::builtin(PredKind::canReach));
  EXPECT_THROW(Fact::parse("BOB canReach"), std::invalid_argument);
  EXPECT_THROW(Fact::parse("BOB canReach MUG NOW"), std::invalid_argument);
}

}  // namespace
}  // namespace coact
