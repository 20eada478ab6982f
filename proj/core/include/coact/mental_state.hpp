#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "coact/comm_act.hpp"
#include "coact/facts.hpp"
#include "coact/world.hpp"

namespace coact {

/// Facts one agent believes, each stamped with the tick it was last updated.
/// Functional keys are single-valued; the newest write wins.
class BeliefBase {
 public:
  BeliefBase() = default;
  explicit BeliefBase(EntityId agent) : agent_(std::move(agent)) {}

  const EntityId& agent() const noexcept { return agent_; }
  const std::set<Fact>& facts() const noexcept { return facts_; }

  /// Inserts `f`, replacing any contradicting functional fact. Re-asserting a
  /// believed fact only refreshes its timestamp.
  void assert_fact(Fact f);
  void retract(const Fact& f);

  bool contains(const Fact& f) const { return facts_.contains(f); }
  std::optional<Fact> find_key(const EntityId& subject, const Predicate& pred) const;
  std::vector<std::string> strings() const;
  /// Belief facts as a fact base stamped with `tick`.
  FactBase as_fact_base(Tick tick) const;

  bool operator==(const BeliefBase&) const = default;

 private:
  EntityId agent_;
  std::set<Fact> facts_;
};

enum class KnowHow { known, unknown };
enum class StepBelief { pending, done, failed };

std::string_view to_string(StepBelief s) noexcept;

struct AgentMentalState {
  BeliefBase beliefs;
  std::map<std::string, KnowHow> know_how;  // undeclared tasks are known
  bool goal_aware{false};
  std::optional<std::string> plan_aware;
  std::map<std::string, StepBrief> plan_steps;  // steps of plan_aware
  std::map<std::string, StepBelief> step_beliefs;
  std::vector<std::string> requested;  // RequestAction history, oldest first
  std::map<EntityId, Cell> believed_cells;  // last perceived cell per entity

  const EntityId& agent() const noexcept { return beliefs.agent(); }
  bool operator==(const AgentMentalState&) const = default;
};

/// Initial mental state: the agent knows every observable fact of `facts`.
AgentMentalState make_mental_state(const EntityId& agent, const GridWorld& world,
                                   const FactBase& facts,
                                   std::map<std::string, KnowHow> know_how = {});

/// Step completion the executive matched to an observed event.
struct StepUpdate {
  std::string step_id;
  StepBelief status{StepBelief::done};
  EntityId actor;
  EntityId object;  // manipulated object, may be empty
};

/// Entities (agents, objects) the agent perceives this tick, itself included.
std::set<EntityId> visible_entities(const EntityId& agent, const FactBase& robot_facts);

/// Perspective-taking update: copies every fact whose mentioned movable
/// entities are all visible (or whose subject is the agent), drops visibly
/// false beliefs, leaves everything else stale.
AgentMentalState perceive_update(AgentMentalState mental, const GridWorld& world,
                                 const FactBase& robot_facts,
                                 const std::vector<StepUpdate>& step_updates = {});

class CommError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

AgentMentalState apply_comm(AgentMentalState mental, const CommAct& act);

/// Plan information needed to rate divergences, decoupled from the planner.
struct PlanDigest {
  struct Step {
    std::string id;
    EntityId agent;
    std::vector<std::pair<Fact, bool>> preconditions;  // (literal, negated)
    StepBelief actual{StepBelief::pending};
  };
  std::string plan_id;
  std::vector<Step> steps;
};

struct Divergence {
  EntityId agent;
  std::optional<Fact> believed;
  std::optional<Fact> actual;
  bool relevant{false};

  /// (subject, predicate) key shared by the believed and actual facts.
  std::pair<EntityId, std::string> key() const;
  bool operator==(const Divergence&) const = default;
};

std::vector<Divergence> divergences(const FactBase& robot_facts, const PlanDigest* plan,
                                    const AgentMentalState& mental);

KnowHow knows_task(const AgentMentalState& mental, const std::string& task_label);

}  // namespace coact
