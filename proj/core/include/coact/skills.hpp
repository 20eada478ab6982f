#pragma once

#include <functional>
#include <optional>

#include "coact/htn.hpp"
#include "coact/mental_state.hpp"
#include "coact/world.hpp"

namespace coact {

/// First move of a shortest 8-connected path to any cell satisfying `goal`.
/// Cells held by other agents are obstacles; ties follow heading order.
/// nullopt when already at a goal cell or when no path exists.
std::optional<Heading> next_move(const GridWorld& world, const EntityId& agent,
                                 const std::function<bool(Cell)>& goal);

/// Whether some goal cell is reachable (or the agent already stands on one).
bool path_exists(const GridWorld& world, const EntityId& agent, const std::function<bool(Cell)>& goal);

/// Moves toward a cell from which `target` lies within reach.
std::optional<Heading> approach(const GridWorld& world, const EntityId& agent, Cell target);

/// Next primitive action of a ground skill for `agent`; Wait when the skill
/// has nothing to do or cannot make progress.
PrimitiveAction skill_action(const GridWorld& world, const EntityId& agent, const SkillSpec& skill);

/// Skill of a plan step described by its operator label and arguments.
std::optional<SkillSpec> ground_skill(const HtnDomain& domain, const std::string& label,
                                      const std::vector<std::string>& args, const EntityId& agent);

/// The world as `mental` believes it: objects sit where they were last
/// perceived. Agents stay at their true cells.
GridWorld believed_world(const GridWorld& world, const AgentMentalState& mental);

}  // namespace coact
