#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "coact/executive.hpp"
#include "coact/facts.hpp"
#include "coact/htn.hpp"
#include "coact/mdp.hpp"
#include "coact/scenario.hpp"
#include "coact/session.hpp"

namespace {

using namespace coact;

Scenario load(const std::string& name) {
  return load_scenario_file(std::string(COACT_SCENARIO_DIR) + "/" + name + ".json");
}

/// Corridor of n states with moves left, right and stay; the last state is the goal.
Mdp corridor(std::size_t n) {
  std::vector<std::string> states;
  for (std::size_t i = 0; i < n; ++i) states.push_back("s" + std::to_string(i));
  Mdp m = Mdp::with_states(states, {"left", "stay", "right"});
  for (std::size_t s = 0; s + 1 < n; ++s) {
    m.transitions[s][0] = {Transition{s == 0 ? 0 : s - 1, 0.9}, Transition{s, 0.1}};
    m.set_deterministic(s, 1, s);
    m.transitions[s][2] = {Transition{s + 1, 0.9}, Transition{s, 0.1}};
  }
  m.mark_goal(n - 1);
  return m;
}

void BM_ValueIteration(benchmark::State& state) {
  const Mdp m = corridor(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(value_iteration(m));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ValueIteration)->RangeMultiplier(4)->Range(8, 512)->Complexity();

PlanRequest request_for(const Scenario& sc) {
  PlanRequest r;
  r.domain = &sc.htn;
  r.initial = planning_state(assess(sc.world), sc.static_facts);
  const auto& goal = sc.goals.front();
  r.goal = goal.task;
  r.goal_condition = goal.condition;
  for (const auto& [id, a] : sc.world.agents()) r.agents.push_back({id, a.kind});
  r.knowledge = sc.knowledge;
  r.policy = sc.policy;
  return r;
}

void BM_PlanTableSetting(benchmark::State& state) {
  const auto sc = load("table_setting_teach");
  const auto req = request_for(sc);
  for (auto _ : state) benchmark::DoNotOptimize(plan(req));
}
BENCHMARK(BM_PlanTableSetting);

void BM_PlanTwoHumans(benchmark::State& state) {
  const auto sc = load("two_humans");
  const auto req = request_for(sc);
  for (auto _ : state) benchmark::DoNotOptimize(plan(req));
}
BENCHMARK(BM_PlanTwoHumans);

void BM_AssessKitchen(benchmark::State& state) {
  const auto sc = load("kitchen_cooperative");
  for (auto _ : state) benchmark::DoNotOptimize(assess(sc.world));
}
BENCHMARK(BM_AssessKitchen);

void BM_SessionKitchenDistracted(benchmark::State& state) {
  const auto sc = load("kitchen_distracted");
  for (auto _ : state) {
    Session s(sc);
    benchmark::DoNotOptimize(s.run());
  }
}
BENCHMARK(BM_SessionKitchenDistracted)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
