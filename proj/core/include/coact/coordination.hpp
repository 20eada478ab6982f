#pragma once

#include <array>
#include <optional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "coact/comm_act.hpp"
#include "coact/facts.hpp"
#include "coact/scenario.hpp"
#include "coact/world.hpp"

namespace coact {

enum class Engagement { engaged = 0, distracted = 1, disengaged = 2 };
enum class EngagementCue { lookingAt = 0, movingToward = 1, idle = 2, movingAway = 3 };

std::string_view to_string(Engagement e) noexcept;
std::string_view to_string(EngagementCue c) noexcept;

using EngagementBelief = std::array<double, 3>;

inline constexpr EngagementBelief kUniformEngagement{1.0 / 3, 1.0 / 3, 1.0 / 3};

/// Cue shown by `human` toward `robot` between two consecutive worlds.
/// Gaze wins over motion; a human that did not move is idle.
EngagementCue observe_cue(const GridWorld& before, const GridWorld& after, const FactBase& facts,
                          const EntityId& human, const EntityId& robot);

/// One predict + update step of the engagement filter.
EngagementBelief engagement_update(const EngagementParams& params, const EngagementBelief& belief,
                                   EngagementCue cue);

struct HandoverState {
  enum class Phase { approach, extend, waiting, done, aborted };
  Phase phase{Phase::approach};
  int disengaged_streak{0};
  int waiting_ticks{0};
  std::string abort_reason;

  bool finished() const noexcept { return phase == Phase::done || phase == Phase::aborted; }
  bool operator==(const HandoverState&) const = default;
};

std::string_view to_string(HandoverState::Phase p) noexcept;

struct HandoverDecision {
  PrimitiveAction action;
  std::optional<CommAct> signal;
};

/// Advances the robot's side of a handover of `object` to `partner`, using the
/// engagement belief already updated for this tick.
HandoverDecision handover_step(HandoverState& state, const EngagementParams& params,
                               const GridWorld& world, const EntityId& robot,
                               const EntityId& partner, const EntityId& object,
                               const EngagementBelief& engagement, Tick tick);

/// Workspace label of a manipulation target; empty when the cell has none.
std::string workspace_key(const GridWorld& world, Cell c);

struct SafetyVerdict {
  bool hold{false};
  std::string reason;
};

/// Holds a robot manipulation whose target workspace a human manipulated in
/// during the previous tick, or in which a human is manipulating this tick.
/// Targets outside any labelled workspace are never held.
SafetyVerdict safety_gate(const GridWorld& world, const EntityId& robot, const PrimitiveAction& action,
                          const std::set<std::string>& human_workspaces_last_tick,
                          const std::map<EntityId, PrimitiveAction>* human_actions_this_tick = nullptr);

/// Physical expression of a signal.
PrimitiveAction express(const CommAct& signal);

}  // namespace coact
