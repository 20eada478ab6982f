#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "coact/comm_act.hpp"
#include "coact/coordination.hpp"
#include "coact/facts.hpp"
#include "coact/htn.hpp"
#include "coact/intention.hpp"
#include "coact/mental_state.hpp"
#include "coact/scenario.hpp"
#include "coact/world.hpp"

namespace coact {

enum class Phase { observing, proposing, executing, replanning, achieved, aborted };
enum class StepStatus { pending, active, done, failed };

std::string_view to_string(Phase p) noexcept;
std::string_view to_string(StepStatus s) noexcept;

struct ExecutionState {
  Phase phase{Phase::proposing};
  std::string goal_id;
  std::optional<SharedPlan> plan;
  std::map<std::string, StepStatus> status;
  std::map<std::string, int> wait_timers;  // requested human steps
  std::map<EntityId, int> request_counts;  // ignored requests per human
  std::set<std::string> requested;
  std::set<std::pair<EntityId, std::string>> explained;  // (agent, task label)
  std::set<EntityId> awaiting;  // humans yet to answer the current proposal
  int proposal_wait{0};
  std::set<EntityId> disengaged;
  std::optional<Negotiation> negotiation;
  std::optional<HandoverState> handover;
  std::string handover_step;
  IntentionPosterior posterior;
  std::string reason;  // reason of the last phase transition
  int replans{0};
  int safety_holds{0};
  std::vector<std::string> plan_ids;

  bool terminal() const noexcept { return phase == Phase::achieved || phase == Phase::aborted; }
};

/// Per-tick inputs, all describing the world after this tick's kernel step.
struct ExecutiveInput {
  Tick tick{0};
  const GridWorld* world{nullptr};
  const FactBase* facts{nullptr};
  const std::map<EntityId, AgentMentalState>* mentals{nullptr};
  const std::vector<Event>* events{nullptr};
  const std::vector<StepUpdate>* step_updates{nullptr};
  const std::vector<CommAct>* inbox{nullptr};  // acts addressed to the robot
  const std::map<EntityId, EngagementBelief>* engagement{nullptr};
  const std::set<std::string>* human_workspaces{nullptr};  // manipulated this tick
};

struct MonitorVerdict {
  PrimitiveAction robot_command;
  std::vector<CommAct> comm;
  std::optional<std::string> transition;
  /// Humans whose plan awareness carries over to a replanned, unchanged assignment.
  std::vector<EntityId> keep_awareness;
  std::optional<SharedPlan> previous_plan;
  bool safety_hold{false};
};

/// Planner view of robot facts: observable predicates plus static facts.
AtomSet planning_state(const FactBase& facts, const AtomSet& static_facts);

PlanDigest make_digest(const SharedPlan& plan, const std::map<std::string, StepStatus>& status);

/// Steps completed by this tick's successful events.
std::vector<StepUpdate> match_step_events(const SharedPlan& plan,
                                          const std::map<std::string, StepStatus>& status,
                                          const std::vector<Event>& events, const GridWorld& after);

/// Pending steps whose ordering predecessors are all done, by index.
std::vector<std::size_t> eligible_steps(const SharedPlan& plan, const std::map<std::string, StepStatus>& status);

std::vector<StepBrief> step_briefs(const SharedPlan& plan);

/// Carries plan awareness from `old_plan` to `new_plan`, matching steps by
/// task and assignee.
AgentMentalState remap_plan_awareness(AgentMentalState mental, const SharedPlan& old_plan,
                                      const SharedPlan& new_plan);

/// Creates the goal episode and its first proposal round.
MonitorVerdict start_goal(ExecutionState& state, const Scenario& scenario, const std::string& goal_id,
                          const ExecutiveInput& in);

MonitorVerdict tick_executive(ExecutionState& state, const Scenario& scenario, const ExecutiveInput& in);

/// Installs a planner result after a replan request.
MonitorVerdict handle_replan(ExecutionState& state, const Scenario& scenario, const ExecutiveInput& in,
                             const PlanResult& result);

struct Commitment {
  bool committed{true};
  EntityId agent;
};

Commitment commitment_check(const ExecutionState& state, const Scenario& scenario);

}  // namespace coact
