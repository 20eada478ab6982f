#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "coact/coordination.hpp"
#include "coact/executive.hpp"
#include "coact/facts.hpp"
#include "coact/human_models.hpp"
#include "coact/mental_state.hpp"
#include "coact/scenario.hpp"
#include "coact/world.hpp"

namespace coact {

struct SessionOptions {
  std::optional<std::uint64_t> seed;  // defaults to the scenario seed
  std::optional<int> max_ticks;       // defaults to the scenario limit
};

struct TickRecord {
  Tick tick{0};
  std::vector<Event> events;
  std::vector<std::string> event_workspaces;  // per event; empty unless a manipulation
  std::vector<std::string> facts_added;
  std::vector<std::string> facts_removed;
  std::vector<CommAct> comm;
  std::map<EntityId, std::vector<std::string>> beliefs;
  IntentionPosterior posterior;
  Phase phase{Phase::proposing};
  std::optional<std::string> transition;
  std::map<EntityId, EngagementBelief> engagement;
  bool safety_hold{false};  // a robot manipulation was held this tick
  std::string goal;     // goal being pursued, empty while observing
  std::string plan_id;  // current shared plan, empty if none
  std::map<EntityId, HumanDecision> inputs;  // decisions of interactive humans
};

struct RunReport {
  std::string scenario;
  std::string goal;
  bool goal_achieved{false};
  std::string outcome;  // achieved | aborted | timeout | running
  std::optional<std::string> abort_reason;  // TIMEOUT when the tick budget ran out
  Tick ticks{0};
  std::map<std::string, int> comm_counts;
  int replans{0};
  int divergences_detected{0};  // relevant divergences the robot informed about
  int divergences_resolved{0};  // of those, informs the addressee now believes
  int human_idle_ticks{0};      // human Wait events
  int safety_holds{0};
  std::vector<std::string> plan_ids;
  std::vector<std::string> final_facts;  // fact base of the final tick
  std::map<EntityId, int> actions;       // successful non-Wait actions per agent
};

using DriverMap = std::map<EntityId, std::shared_ptr<HumanDriver>>;

/// One simulated episode: kernel, perception, mental states, intention
/// recognition and the executive, advanced one tick at a time.
class Session {
 public:
  Session(Scenario scenario, SessionOptions options = {}, DriverMap drivers = {});

  bool finished() const noexcept;
  /// Advances one tick and returns its record.
  const TickRecord& step();
  RunReport run();
  RunReport report() const;

  const Scenario& scenario() const noexcept { return scenario_; }
  const GridWorld& world() const noexcept { return world_; }
  const FactBase& facts() const noexcept { return facts_; }
  const std::map<EntityId, AgentMentalState>& mentals() const noexcept { return mentals_; }
  const ExecutionState& execution() const noexcept { return exec_; }
  const std::vector<TickRecord>& records() const noexcept { return records_; }
  const std::map<EntityId, EngagementBelief>& engagement() const noexcept { return engagement_; }
  std::uint64_t seed() const noexcept { return seed_; }
  int max_ticks() const noexcept { return max_ticks_; }
  const PrimitiveAction& next_robot_action() const noexcept { return robot_next_; }

 private:
  void deliver(const MonitorVerdict& verdict, TickRecord& rec);

  Scenario scenario_;
  std::uint64_t seed_;
  int max_ticks_;
  GridWorld world_;
  std::deque<GridWorld> history_;
  std::set<std::string> last_human_ws_;  // workspaces humans manipulated in last tick
  FactBase facts_;
  std::map<EntityId, AgentMentalState> mentals_;
  std::map<EntityId, std::unique_ptr<HumanPolicy>> policies_;
  std::map<EntityId, std::vector<CommAct>> inboxes_;
  std::map<EntityId, EngagementBelief> engagement_;
  ExecutionState exec_;
  PrimitiveAction robot_next_;
  std::vector<TickRecord> records_;
  std::map<EntityId, int> action_counts_;
  int divergences_detected_{0};
  int divergences_resolved_{0};
  int human_idle_ticks_{0};
};

/// Successful robot and human manipulation events of one record that share a
/// workspace label.
std::vector<std::string> safety_violations(const TickRecord& record, const GridWorld& initial);

}  // namespace coact
