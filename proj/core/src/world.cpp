#include "coact/world.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace coact {

std::string_view to_string(AgentKind k) noexcept {
  return k == AgentKind::robot ? "robot" : "human";
}

std::string_view to_string(ActionKind k) noexcept {
  switch (k) {
    case ActionKind::Wait: return "Wait";
    case ActionKind::Move: return "Move";
    case ActionKind::PickUp: return "PickUp";
    case ActionKind::Place: return "Place";
    case ActionKind::Give: return "Give";
    case ActionKind::Take: return "Take";
    case ActionKind::LookAt: return "LookAt";
    case ActionKind::PointAt: return "PointAt";
    case ActionKind::StateOp: return "StateOp";
  }
  return "?";
}

std::string_view to_string(FailReason r) noexcept {
  switch (r) {
    case FailReason::UNKNOWN_ENTITY: return "UNKNOWN_ENTITY";
    case FailReason::NOT_AN_OBJECT: return "NOT_AN_OBJECT";
    case FailReason::NOT_AN_AGENT: return "NOT_AN_AGENT";
    case FailReason::SELF_TARGET: return "SELF_TARGET";
    case FailReason::OUT_OF_BOUNDS: return "OUT_OF_BOUNDS";
    case FailReason::CELL_BLOCKED: return "CELL_BLOCKED";
    case FailReason::CELL_OCCUPIED: return "CELL_OCCUPIED";
    case FailReason::HANDS_FULL: return "HANDS_FULL";
    case FailReason::NOT_HOLDING: return "NOT_HOLDING";
    case FailReason::NOT_REACHABLE: return "NOT_REACHABLE";
    case FailReason::HELD_BY_OTHER: return "HELD_BY_OTHER";
    case FailReason::NOT_ADJACENT: return "NOT_ADJACENT";
    case FailReason::TARGET_HANDS_FULL: return "TARGET_HANDS_FULL";
    case FailReason::UNKNOWN_PROP: return "UNKNOWN_PROP";
    case FailReason::INVALID_VALUE: return "INVALID_VALUE";
    case FailReason::TAKEN: return "TAKEN";
  }
  return "?";
}

PrimitiveAction PrimitiveAction::move(Heading h) {
  PrimitiveAction a;
  a.kind = ActionKind::Move;
  a.direction = h;
  return a;
}

PrimitiveAction PrimitiveAction::pick_up(EntityId obj) {
  PrimitiveAction a;
  a.kind = ActionKind::PickUp;
  a.object = std::move(obj);
  return a;
}

PrimitiveAction PrimitiveAction::place(EntityId obj, Cell c) {
  PrimitiveAction a;
  a.kind = ActionKind::Place;
  a.object = std::move(obj);
  a.cell = c;
  return a;
}

PrimitiveAction PrimitiveAction::give(EntityId obj, EntityId to) {
  PrimitiveAction a;
  a.kind = ActionKind::Give;
  a.object = std::move(obj);
  a.target = std::move(to);
  return a;
}

PrimitiveAction PrimitiveAction::take(EntityId obj, EntityId from) {
  PrimitiveAction a;
  a.kind = ActionKind::Take;
  a.object = std::move(obj);
  a.target = std::move(from);
  return a;
}

PrimitiveAction PrimitiveAction::look_at(EntityId target) {
  PrimitiveAction a;
  a.kind = ActionKind::LookAt;
  a.target = std::move(target);
  return a;
}

PrimitiveAction PrimitiveAction::point_at(EntityId target) {
  PrimitiveAction a;
  a.kind = ActionKind::PointAt;
  a.target = std::move(target);
  return a;
}

PrimitiveAction PrimitiveAction::state_op(EntityId obj, std::string prop, std::string value) {
  PrimitiveAction a;
  a.kind = ActionKind::StateOp;
  a.object = std::move(obj);
  a.prop = std::move(prop);
  a.value = std::move(value);
  return a;
}

bool PrimitiveAction::is_manipulation() const noexcept {
  switch (kind) {
    case ActionKind::PickUp:
    case ActionKind::Place:
    case ActionKind::Give:
    case ActionKind::Take:
    case ActionKind::StateOp: return true;
    default: return false;
  }
}

std::string PrimitiveAction::to_string() const {
  std::string out{coact::to_string(kind)};
  switch (kind) {
    case ActionKind::Wait: break;
    case ActionKind::Move: out += ' '; out += coact::to_string(direction); break;
    case ActionKind::PickUp: out += ' ' + object; break;
    case ActionKind::Place:
      out += ' ' + object + ' ' + std::to_string(cell.x) + ' ' + std::to_string(cell.y);
      break;
    case ActionKind::Give:
    case ActionKind::Take: out += ' ' + object + ' ' + target; break;
    case ActionKind::LookAt:
    case ActionKind::PointAt: out += ' ' + target; break;
    case ActionKind::StateOp: out += ' ' + object + ' ' + prop + ' ' + value; break;
  }
  return out;
}

namespace {

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::istringstream in{std::string(text)};
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

int parse_int(const std::string& s) {
  int v = 0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || p != end) throw WorldError("bad integer '" + s + "' in action");
  return v;
}

}  // namespace

PrimitiveAction PrimitiveAction::parse(std::string_view text) {
  const auto w = split_words(text);
  if (w.empty()) throw WorldError("empty action");
  auto need = [&](std::size_t n) {
    if (w.size() != n) throw WorldError("malformed action '" + std::string(text) + "'");
  };
  const std::string& k = w[0];
  if (k == "Wait") {
    need(1);
    return wait();
  }
  if (k == "Move") {
    need(2);
    auto h = parse_heading(w[1]);
    if (!h) throw WorldError("bad direction '" + w[1] + "'");
    return move(*h);
  }
  if (k == "PickUp") {
    need(2);
    return pick_up(w[1]);
  }
  if (k == "Place") {
    need(4);
    return place(w[1], Cell{parse_int(w[2]), parse_int(w[3])});
  }
  if (k == "Give") {
    need(3);
    return give(w[1], w[2]);
  }
  if (k == "Take") {
    need(3);
    return take(w[1], w[2]);
  }
  if (k == "LookAt") {
    need(2);
    return look_at(w[1]);
  }
  if (k == "PointAt") {
    need(2);
    return point_at(w[1]);
  }
  if (k == "StateOp") {
    need(4);
    return state_op(w[1], w[2], w[3]);
  }
  throw WorldError("unknown action kind '" + k + "'");
}

// ---------------------------------------------------------------------------

GridWorld::GridWorld(int width, int height, std::vector<CellInfo> cells)
    : width_(width), height_(height), cells_(std::move(cells)) {
  if (width_ <= 0 || height_ <= 0 ||
      cells_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_))
    throw WorldError("grid dimensions do not match cell count");
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      const auto& ci = cells_[static_cast<std::size_t>(y * width_ + x)];
      if (ci.blocking) continue;
      if (ci.room.empty()) throw WorldError("non-blocking cell without a room");
      rooms_.insert(ci.room);
      if (ci.is_surface()) surfaces_[ci.surface].push_back(Cell{x, y});
    }
  }
  for (auto& [id, cells_of] : surfaces_) std::sort(cells_of.begin(), cells_of.end(),
                                                   [](Cell a, Cell b) {
                                                     return std::pair(a.y, a.x) <
                                                            std::pair(b.y, b.x);
                                                   });
}

bool GridWorld::in_bounds(Cell c) const noexcept {
  return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_;
}

const CellInfo& GridWorld::cell(Cell c) const {
  if (!in_bounds(c)) throw WorldError("cell out of bounds");
  return cells_[static_cast<std::size_t>(c.y * width_ + c.x)];
}

bool GridWorld::walkable(Cell c) const noexcept {
  if (!in_bounds(c)) return false;
  const auto& ci = cells_[static_cast<std::size_t>(c.y * width_ + c.x)];
  return !ci.blocking && !ci.is_surface();
}

const Agent& GridWorld::agent(const EntityId& id) const {
  auto it = agents_.find(id);
  if (it == agents_.end()) throw WorldError("unknown agent '" + id + "'");
  return it->second;
}

const Obj& GridWorld::object(const EntityId& id) const {
  auto it = objects_.find(id);
  if (it == objects_.end()) throw WorldError("unknown object '" + id + "'");
  return it->second;
}

Agent& GridWorld::agent_mut(const EntityId& id) {
  auto it = agents_.find(id);
  if (it == agents_.end()) throw WorldError("unknown agent '" + id + "'");
  return it->second;
}

Obj& GridWorld::object_mut(const EntityId& id) {
  auto it = objects_.find(id);
  if (it == objects_.end()) throw WorldError("unknown object '" + id + "'");
  return it->second;
}

bool GridWorld::has_entity(const EntityId& id) const noexcept {
  return is_agent(id) || is_object(id) || is_surface(id) || is_room(id);
}

const std::vector<Cell>& GridWorld::surface_cells(const EntityId& surface) const {
  auto it = surfaces_.find(surface);
  if (it == surfaces_.end()) throw WorldError("unknown surface '" + surface + "'");
  return it->second;
}

std::vector<Cell> GridWorld::workspace_cells(const std::string& workspace) const {
  std::vector<Cell> out;
  if (workspace.empty()) return out;
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x)
      if (cells_[static_cast<std::size_t>(y * width_ + x)].workspace == workspace)
        out.push_back(Cell{x, y});
  return out;
}

std::optional<Cell> GridWorld::entity_cell(const EntityId& id) const {
  if (auto a = agents_.find(id); a != agents_.end()) return a->second.position;
  if (auto o = objects_.find(id); o != objects_.end()) {
    const auto& p = o->second.placement;
    if (p.kind == Placement::Kind::held_by) {
      auto h = agents_.find(p.holder);
      if (h == agents_.end()) return std::nullopt;
      return h->second.position;
    }
    return p.cell;
  }
  if (auto s = surfaces_.find(id); s != surfaces_.end() && !s->second.empty())
    return s->second.front();
  return std::nullopt;
}

std::optional<EntityId> GridWorld::agent_at(Cell c) const {
  for (const auto& [id, a] : agents_)
    if (a.position == c) return id;
  return std::nullopt;
}

bool GridWorld::within_reach(const Agent& a, Cell c) const {
  if (!in_bounds(c)) return false;
  if (chebyshev(a.position, c) > a.reach_radius) return false;
  const auto& target = cell(c);
  if (target.blocking) return false;
  return target.room == cell(a.position).room;
}

void GridWorld::declare_prop(std::string name, std::vector<std::string> values) {
  prop_domains_[std::move(name)] = std::move(values);
}

void GridWorld::add_agent(Agent a) {
  if (has_entity(a.id)) throw WorldError("duplicate id '" + a.id + "'");
  const auto id = a.id;
  agents_.emplace(id, std::move(a));
}

void GridWorld::add_object(Obj o) {
  if (has_entity(o.id)) throw WorldError("duplicate id '" + o.id + "'");
  const auto id = o.id;
  objects_.emplace(id, std::move(o));
}

void GridWorld::check_invariants() const {
  std::set<Cell> agent_cells;
  for (const auto& [id, a] : agents_) {
    if (!walkable(a.position))
      throw WorldError("agent '" + id + "' is not on a free in-bounds cell");
    if (!agent_cells.insert(a.position).second)
      throw WorldError("agent '" + id + "' shares a cell with another agent");
    if (a.holding) {
      auto it = objects_.find(*a.holding);
      if (it == objects_.end())
        throw WorldError("agent '" + id + "' holds unknown object '" + *a.holding + "'");
      const auto& p = it->second.placement;
      if (p.kind != Placement::Kind::held_by || p.holder != id)
        throw WorldError("holding of '" + id + "' disagrees with object placement");
    }
  }
  for (const auto& [id, o] : objects_) {
    const auto& p = o.placement;
    switch (p.kind) {
      case Placement::Kind::held_by: {
        auto h = agents_.find(p.holder);
        if (h == agents_.end() || h->second.holding != id)
          throw WorldError("object '" + id + "' held by an agent that does not hold it");
        break;
      }
      case Placement::Kind::cell:
        if (!in_bounds(p.cell) || cell(p.cell).blocking || cell(p.cell).is_surface())
          throw WorldError("object '" + id + "' is not on a free in-bounds cell");
        break;
      case Placement::Kind::on_surface:
        if (!in_bounds(p.cell) || !cell(p.cell).is_surface())
          throw WorldError("object '" + id + "' is not on a surface cell");
        break;
    }
    for (const auto& [name, value] : o.props) {
      auto d = prop_domains_.find(name);
      if (d == prop_domains_.end())
        throw WorldError("object '" + id + "' uses undeclared prop '" + name + "'");
      if (std::find(d->second.begin(), d->second.end(), value) == d->second.end())
        throw WorldError("object '" + id + "' prop '" + name + "' has invalid value");
    }
  }
}

// ---------------------------------------------------------------------------

namespace {

std::optional<FailReason> check_entity_object(const GridWorld& w, const EntityId& id) {
  if (w.is_object(id)) return std::nullopt;
  if (w.has_entity(id)) return FailReason::NOT_AN_OBJECT;
  return FailReason::UNKNOWN_ENTITY;
}

std::optional<FailReason> check_entity_agent(const GridWorld& w, const EntityId& self,
                                             const EntityId& id) {
  if (id == self) return FailReason::SELF_TARGET;
  if (w.is_agent(id)) return std::nullopt;
  if (w.has_entity(id)) return FailReason::NOT_AN_AGENT;
  return FailReason::UNKNOWN_ENTITY;
}

void turn_toward(GridWorld& w, Agent& a, const EntityId& target) {
  if (auto c = w.entity_cell(target))
    if (auto h = heading_toward(a.position, *c)) a.heading = *h;
}

void apply_action(GridWorld& w, const EntityId& actor, const PrimitiveAction& act) {
  Agent& a = w.agent_mut(actor);
  switch (act.kind) {
    case ActionKind::Wait: break;
    case ActionKind::Move:
      a.position = neighbor(a.position, act.direction);
      a.heading = act.direction;
      break;
    case ActionKind::PickUp: {
      Obj& o = w.object_mut(act.object);
      o.placement = Placement{Placement::Kind::held_by, Cell{}, actor};
      a.holding = act.object;
      break;
    }
    case ActionKind::Place: {
      Obj& o = w.object_mut(act.object);
      const bool surface = w.cell(act.cell).is_surface();
      o.placement = Placement{surface ? Placement::Kind::on_surface : Placement::Kind::cell,
                              act.cell, {}};
      a.holding.reset();
      break;
    }
    case ActionKind::Give: {
      Obj& o = w.object_mut(act.object);
      o.placement = Placement{Placement::Kind::held_by, Cell{}, act.target};
      a.holding.reset();
      w.agent_mut(act.target).holding = act.object;
      break;
    }
    case ActionKind::Take: {
      Obj& o = w.object_mut(act.object);
      o.placement = Placement{Placement::Kind::held_by, Cell{}, actor};
      w.agent_mut(act.target).holding.reset();
      w.agent_mut(actor).holding = act.object;
      break;
    }
    case ActionKind::LookAt: turn_toward(w, a, act.target); break;
    case ActionKind::PointAt:
      turn_toward(w, w.agent_mut(actor), act.target);
      w.agent_mut(actor).pointing = PointingRecord{act.target, w.tick() + 1};
      break;
    case ActionKind::StateOp: w.object_mut(act.object).props[act.prop] = act.value; break;
  }
}

}  // namespace

std::optional<FailReason> check_action(const GridWorld& w, const EntityId& actor,
                                       const PrimitiveAction& act) {
  const Agent& a = w.agent(actor);
  switch (act.kind) {
    case ActionKind::Wait: return std::nullopt;
    case ActionKind::Move: {
      const Cell to = neighbor(a.position, act.direction);
      if (!w.in_bounds(to)) return FailReason::OUT_OF_BOUNDS;
      if (!w.walkable(to)) return FailReason::CELL_BLOCKED;
      if (w.agent_at(to)) return FailReason::CELL_OCCUPIED;
      return std::nullopt;
    }
    case ActionKind::PickUp: {
      if (auto r = check_entity_object(w, act.object)) return r;
      if (a.holding) return FailReason::HANDS_FULL;
      const Obj& o = w.object(act.object);
      if (o.placement.kind == Placement::Kind::held_by) return FailReason::HELD_BY_OTHER;
      if (!w.within_reach(a, o.placement.cell)) return FailReason::NOT_REACHABLE;
      return std::nullopt;
    }
    case ActionKind::Place: {
      if (auto r = check_entity_object(w, act.object)) return r;
      if (a.holding != act.object) return FailReason::NOT_HOLDING;
      if (!w.in_bounds(act.cell)) return FailReason::OUT_OF_BOUNDS;
      const auto& ci = w.cell(act.cell);
      if (ci.blocking) return FailReason::CELL_BLOCKED;
      if (!w.within_reach(a, act.cell)) return FailReason::NOT_REACHABLE;
      if (!ci.is_surface()) {
        auto occ = w.agent_at(act.cell);
        if (occ && *occ != actor) return FailReason::CELL_OCCUPIED;
      }
      return std::nullopt;
    }
    case ActionKind::Give: {
      if (auto r = check_entity_object(w, act.object)) return r;
      if (auto r = check_entity_agent(w, actor, act.target)) return r;
      if (a.holding != act.object) return FailReason::NOT_HOLDING;
      const Agent& to = w.agent(act.target);
      if (chebyshev(a.position, to.position) > 1) return FailReason::NOT_ADJACENT;
      if (to.holding) return FailReason::TARGET_HANDS_FULL;
      return std::nullopt;
    }
    case ActionKind::Take: {
      if (auto r = check_entity_object(w, act.object)) return r;
      if (auto r = check_entity_agent(w, actor, act.target)) return r;
      if (a.holding) return FailReason::HANDS_FULL;
      const Agent& from = w.agent(act.target);
      if (from.holding != act.object) return FailReason::NOT_HOLDING;
      if (chebyshev(a.position, from.position) > 1) return FailReason::NOT_ADJACENT;
      return std::nullopt;
    }
    case ActionKind::LookAt:
    case ActionKind::PointAt: {
      if (act.target == actor) return FailReason::SELF_TARGET;
      if (!w.is_agent(act.target) && !w.is_object(act.target) && !w.is_surface(act.target))
        return FailReason::UNKNOWN_ENTITY;
      return std::nullopt;
    }
    case ActionKind::StateOp: {
      if (auto r = check_entity_object(w, act.object)) return r;
      auto d = w.prop_domains().find(act.prop);
      if (d == w.prop_domains().end()) return FailReason::UNKNOWN_PROP;
      if (std::find(d->second.begin(), d->second.end(), act.value) == d->second.end())
        return FailReason::INVALID_VALUE;
      const Obj& o = w.object(act.object);
      if (o.placement.kind == Placement::Kind::held_by) {
        if (o.placement.holder != actor) return FailReason::HELD_BY_OTHER;
        return std::nullopt;
      }
      if (!w.within_reach(a, o.placement.cell)) return FailReason::NOT_REACHABLE;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

StepResult step(const GridWorld& world, const ActionMap& actions) {
  StepResult out{world, {}};
  GridWorld& w = out.world;
  const Tick next = world.tick() + 1;
  std::set<EntityId> claimed;
  for (const auto& [id, agent] : world.agents()) {
    (void)agent;
    auto it = actions.find(id);
    const PrimitiveAction act = it == actions.end() ? PrimitiveAction::wait() : it->second;
    Event ev{next, id, act, std::nullopt};
    const bool touches_object = act.is_manipulation();
    if (touches_object && claimed.contains(act.object)) {
      ev.failure = FailReason::TAKEN;
    } else {
      ev.failure = check_action(w, id, act);
    }
    if (ev.succeeded()) {
      apply_action(w, id, act);
      if (touches_object) claimed.insert(act.object);
    }
    out.events.push_back(std::move(ev));
  }
  w.set_tick(next);
  return out;
}

std::vector<PrimitiveAction> legal_actions(const GridWorld& world, const EntityId& agent) {
  const Agent& a = world.agent(agent);
  std::vector<PrimitiveAction> candidates;
  candidates.push_back(PrimitiveAction::wait());
  for (auto h : kAllHeadings) candidates.push_back(PrimitiveAction::move(h));
  for (const auto& [oid, o] : world.objects()) {
    (void)o;
    candidates.push_back(PrimitiveAction::pick_up(oid));
    for (const auto& [prop, values] : world.prop_domains())
      for (const auto& v : values) candidates.push_back(PrimitiveAction::state_op(oid, prop, v));
    for (const auto& [other, ag] : world.agents()) {
      (void)ag;
      candidates.push_back(PrimitiveAction::give(oid, other));
      candidates.push_back(PrimitiveAction::take(oid, other));
    }
  }
  if (a.holding) {
    for (int dy = -a.reach_radius; dy <= a.reach_radius; ++dy)
      for (int dx = -a.reach_radius; dx <= a.reach_radius; ++dx)
        candidates.push_back(
            PrimitiveAction::place(*a.holding, Cell{a.position.x + dx, a.position.y + dy}));
  }
  auto add_signals = [&](const EntityId& id) {
    candidates.push_back(PrimitiveAction::look_at(id));
    candidates.push_back(PrimitiveAction::point_at(id));
  };
  for (const auto& [id, ag] : world.agents()) { (void)ag; add_signals(id); }
  for (const auto& [id, o] : world.objects()) { (void)o; add_signals(id); }
  for (const auto& [id, cells] : world.surfaces()) { (void)cells; add_signals(id); }

  std::vector<PrimitiveAction> legal;
  for (auto& c : candidates)
    if (!check_action(world, agent, c)) legal.push_back(std::move(c));
  std::sort(legal.begin(), legal.end());
  legal.erase(std::unique(legal.begin(), legal.end()), legal.end());
  return legal;
}

std::optional<Cell> manipulation_target(const GridWorld& world, const EntityId& actor,
                                        const PrimitiveAction& action) {
  (void)actor;
  switch (action.kind) {
    case ActionKind::PickUp:
    case ActionKind::StateOp: return world.entity_cell(action.object);
    case ActionKind::Place: return action.cell;
    case ActionKind::Give:
    case ActionKind::Take: return world.entity_cell(action.target);
    default: return std::nullopt;
  }
}

}  // namespace coact
