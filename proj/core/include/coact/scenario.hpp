#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coact/htn.hpp"
#include "coact/intention.hpp"
#include "coact/world.hpp"

namespace coact {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GoalSpec {
  std::string id;
  TaskCall task;
  std::vector<Atom> condition;
};

struct HumanSpec {
  EntityId id;
  std::string policy{"Cooperative"};
  std::uint64_t seed{0};
  double p{0.3};                  // Distracted: chance of idling per tick
  std::vector<std::string> refuse;  // Reluctant: patterns rejected on first proposal
  std::vector<PrimitiveAction> script;  // Scripted
};

struct ExecutiveParams {
  int wait_timeout{20};
  int max_ignored{2};
  bool safety{true};
};

struct EngagementParams {
  double stickiness{0.8};
  // rows: engaged, distracted, disengaged; cols: lookingAt, movingToward, idle, movingAway
  std::array<std::array<double, 4>, 3> likelihood{{
      {0.6, 0.3, 0.05, 0.05},
      {0.4 / 3, 0.4 / 3, 0.6, 0.4 / 3},
      {0.4 / 3, 0.4 / 3, 0.4 / 3, 0.6},
  }};
  double engaged_threshold{0.6};
  double disengaged_threshold{0.7};
  int abort_ticks{5};
  int signal_period{5};
};

/// Declared intentions the robot infers before choosing a goal to help with.
struct IntentionSpec {
  IntentionModel model;
  std::map<std::string, bool> capability;  // intention -> robot can help
};

struct Scenario {
  std::string name;
  GridWorld world;
  EntityId robot;
  std::vector<GoalSpec> goals;
  HtnDomain htn;
  AtomSet static_facts;
  KnowledgeMap knowledge;
  SocialPolicy policy;
  std::optional<IntentionSpec> intentions;
  ExecutiveParams executive;
  EngagementParams engagement;
  std::map<EntityId, HumanSpec> humans;
  std::uint64_t seed{1};
  int max_ticks{400};
  nlohmann::json source;  // document the scenario was built from

  const GoalSpec& goal(const std::string& id) const;
  std::vector<EntityId> human_ids() const;
};

/// Builds and validates a scenario; errors name the offending field path.
Scenario load_scenario(const nlohmann::json& doc);
/// Parses JSON text first; syntax errors report line and column.
Scenario load_scenario_text(const std::string& text);
Scenario load_scenario_file(const std::filesystem::path& path);
nlohmann::json parse_json_text(const std::string& text);

/// Applies "a/b/c=value" overrides (JSON pointer paths) to a scenario document.
/// Values parse as JSON when possible, otherwise as strings.
nlohmann::json apply_overrides(nlohmann::json doc, const std::vector<std::string>& overrides);

/// Parses "subtask(arg1,arg2)".
TaskCall parse_task_call(const std::string& text);

}  // namespace coact
