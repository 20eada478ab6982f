#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "coact/geometry.hpp"

namespace coact {

using EntityId = std::string;
using Tick = std::int64_t;

enum class AgentKind { robot, human };

std::string_view to_string(AgentKind k) noexcept;

struct PointingRecord {
  EntityId target;
  Tick tick{0};  // world tick at which the gesture was performed

  bool operator==(const PointingRecord&) const = default;
};

struct Agent {
  EntityId id;
  AgentKind kind{AgentKind::human};
  Cell position;
  Heading heading{Heading::N};
  std::optional<EntityId> holding;
  int reach_radius{1};
  int view_range{6};
  double view_half_angle{60.0};
  std::optional<PointingRecord> pointing;

  bool operator==(const Agent&) const = default;
};

struct Placement {
  enum class Kind { cell, held_by, on_surface };
  Kind kind{Kind::cell};
  Cell cell;       // cell or on_surface
  EntityId holder;  // held_by

  bool operator==(const Placement&) const = default;
};

struct Obj {
  EntityId id;
  std::string type_label;
  Placement placement;
  std::map<std::string, std::string> props;

  bool operator==(const Obj&) const = default;
};

struct CellInfo {
  bool blocking{false};
  std::string room;
  std::string workspace;  // empty = none
  std::string surface;    // surface id; empty = not a surface

  bool is_surface() const noexcept { return !surface.empty(); }
  bool operator==(const CellInfo&) const = default;
};

enum class ActionKind { Wait, Move, PickUp, Place, Give, Take, LookAt, PointAt, StateOp };

std::string_view to_string(ActionKind k) noexcept;

/// Tagged primitive action. Only the fields relevant to `kind` are meaningful.
struct PrimitiveAction {
  ActionKind kind{ActionKind::Wait};
  Heading direction{Heading::N};
  EntityId object;
  EntityId target;
  Cell cell;
  std::string prop;
  std::string value;

  static PrimitiveAction wait() { return {}; }
  static PrimitiveAction move(Heading h);
  static PrimitiveAction pick_up(EntityId obj);
  static PrimitiveAction place(EntityId obj, Cell c);
  static PrimitiveAction give(EntityId obj, EntityId to);
  static PrimitiveAction take(EntityId obj, EntityId from);
  static PrimitiveAction look_at(EntityId target);
  static PrimitiveAction point_at(EntityId target);
  static PrimitiveAction state_op(EntityId obj, std::string prop, std::string value);

  bool is_manipulation() const noexcept;

  /// Wire form, e.g. "Move NE", "Place MUG 3 4", "StateOp MUG isFull TRUE".
  std::string to_string() const;
  static PrimitiveAction parse(std::string_view text);

  bool operator==(const PrimitiveAction& o) const { return to_string() == o.to_string(); }
  bool operator<(const PrimitiveAction& o) const { return to_string() < o.to_string(); }
};

enum class FailReason {
  UNKNOWN_ENTITY,
  NOT_AN_OBJECT,
  NOT_AN_AGENT,
  SELF_TARGET,
  OUT_OF_BOUNDS,
  CELL_BLOCKED,
  CELL_OCCUPIED,
  HANDS_FULL,
  NOT_HOLDING,
  NOT_REACHABLE,
  HELD_BY_OTHER,
  NOT_ADJACENT,
  TARGET_HANDS_FULL,
  UNKNOWN_PROP,
  INVALID_VALUE,
  TAKEN,
};

std::string_view to_string(FailReason r) noexcept;

struct Event {
  Tick tick{0};  // tick of the world produced by the step
  EntityId actor;
  PrimitiveAction action;
  std::optional<FailReason> failure;

  bool succeeded() const noexcept { return !failure.has_value(); }
  bool operator==(const Event&) const = default;
};

class WorldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Deterministic tick-based grid world.
class GridWorld {
 public:
  GridWorld() = default;
  GridWorld(int width, int height, std::vector<CellInfo> cells);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  Tick tick() const noexcept { return tick_; }
  void set_tick(Tick t) noexcept { tick_ = t; }

  bool in_bounds(Cell c) const noexcept;
  const CellInfo& cell(Cell c) const;
  /// In bounds, not blocking and not a surface.
  bool walkable(Cell c) const noexcept;

  const std::map<EntityId, Agent>& agents() const noexcept { return agents_; }
  const std::map<EntityId, Obj>& objects() const noexcept { return objects_; }
  const Agent& agent(const EntityId& id) const;
  const Obj& object(const EntityId& id) const;
  Agent& agent_mut(const EntityId& id);
  Obj& object_mut(const EntityId& id);
  bool is_agent(const EntityId& id) const noexcept { return agents_.contains(id); }
  bool is_object(const EntityId& id) const noexcept { return objects_.contains(id); }
  bool is_surface(const EntityId& id) const noexcept { return surfaces_.contains(id); }
  bool is_room(const EntityId& id) const noexcept { return rooms_.contains(id); }
  bool has_entity(const EntityId& id) const noexcept;

  /// Cells of the named surface, row-major sorted.
  const std::vector<Cell>& surface_cells(const EntityId& surface) const;
  const std::map<EntityId, std::vector<Cell>>& surfaces() const noexcept { return surfaces_; }
  const std::set<std::string>& rooms() const noexcept { return rooms_; }
  std::vector<Cell> workspace_cells(const std::string& workspace) const;

  /// Cell of an agent or object (held objects report the holder's cell).
  std::optional<Cell> entity_cell(const EntityId& id) const;
  std::optional<EntityId> agent_at(Cell c) const;
  const std::string& room_of(Cell c) const { return cell(c).room; }

  /// Same room and Chebyshev distance within the agent's reach radius.
  bool within_reach(const Agent& a, Cell c) const;

  const std::map<std::string, std::vector<std::string>>& prop_domains() const noexcept {
    return prop_domains_;
  }
  void declare_prop(std::string name, std::vector<std::string> values);

  void add_agent(Agent a);
  void add_object(Obj o);

  /// Throws WorldError when an invariant is broken.
  void check_invariants() const;

  bool operator==(const GridWorld&) const = default;

 private:
  int width_{0};
  int height_{0};
  std::vector<CellInfo> cells_;
  std::map<EntityId, Agent> agents_;
  std::map<EntityId, Obj> objects_;
  std::map<EntityId, std::vector<Cell>> surfaces_;
  std::set<std::string> rooms_;
  std::map<std::string, std::vector<std::string>> prop_domains_;
  Tick tick_{0};
};

using ActionMap = std::map<EntityId, PrimitiveAction>;

struct StepResult {
  GridWorld world;
  std::vector<Event> events;  // one per agent, sorted by agent id
};

/// Applies all agents' actions for one tick. Agents are processed in
/// lexicographic id order against the evolving state; an object already
/// manipulated this tick yields TAKEN for later agents. Missing agents Wait.
StepResult step(const GridWorld& world, const ActionMap& actions);

/// Failure an action would meet if applied now with all other agents waiting.
std::optional<FailReason> check_action(const GridWorld& world, const EntityId& agent,
                                       const PrimitiveAction& action);

/// Exactly the actions that would succeed if every other agent waited.
std::vector<PrimitiveAction> legal_actions(const GridWorld& world, const EntityId& agent);

/// Cell a manipulation acts on, evaluated in the pre-step world.
std::optional<Cell> manipulation_target(const GridWorld& world, const EntityId& actor,
                                        const PrimitiveAction& action);

}  // namespace coact
