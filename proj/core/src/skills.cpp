#include "coact/skills.hpp"

#include <deque>
#include <map>

namespace coact {

namespace {

struct Search {
  bool at_goal{false};
  std::optional<Heading> first;
};

Search bfs(const GridWorld& world, const EntityId& agent, const std::function<bool(Cell)>& goal) {
  const Cell start = world.agent(agent).position;
  if (goal(start)) return {true, std::nullopt};
  std::map<Cell, Heading> first;
  std::deque<Cell> frontier{start};
  std::set<Cell> seen{start};
  while (!frontier.empty()) {
    const Cell c = frontier.front();
    frontier.pop_front();
    for (auto h : kAllHeadings) {
      const Cell n = neighbor(c, h);
      if (seen.contains(n) || !world.walkable(n)) continue;
      if (auto occ = world.agent_at(n); occ && *occ != agent) continue;
      seen.insert(n);
      first[n] = c == start ? h : first[c];
      if (goal(n)) return {false, first[n]};
      frontier.push_back(n);
    }
  }
  return {};
}

bool reachable_from(const GridWorld& world, const Agent& a, Cell from, Cell target) {
  Agent probe = a;
  probe.position = from;
  return world.within_reach(probe, target);
}

PrimitiveAction toward(const GridWorld& world, const EntityId& agent, Cell target) {
  if (auto h = approach(world, agent, target)) return PrimitiveAction::move(*h);
  return PrimitiveAction::wait();
}

PrimitiveAction pick(const GridWorld& world, const Agent& a, const EntityId& object) {
  if (!world.is_object(object)) return PrimitiveAction::wait();
  if (a.holding == object || a.holding) return PrimitiveAction::wait();
  const Obj& o = world.object(object);
  if (o.placement.kind == Placement::Kind::held_by) return PrimitiveAction::wait();
  if (world.within_reach(a, o.placement.cell)) return PrimitiveAction::pick_up(object);
  return toward(world, a.id, o.placement.cell);
}

std::string arg(const SkillSpec& s, const std::string& key) {
  auto it = s.args.find(key);
  return it == s.args.end() ? std::string{} : it->second;
}

}  // namespace

std::optional<Heading> next_move(const GridWorld& world, const EntityId& agent,
                                 const std::function<bool(Cell)>& goal) {
  return bfs(world, agent, goal).first;
}

bool path_exists(const GridWorld& world, const EntityId& agent, const std::function<bool(Cell)>& goal) {
  const auto s = bfs(world, agent, goal);
  return s.at_goal || s.first.has_value();
}

std::optional<Heading> approach(const GridWorld& world, const EntityId& agent, Cell target) {
  const Agent& a = world.agent(agent);
  return next_move(world, agent, [&](Cell c) { return reachable_from(world, a, c, target); });
}

PrimitiveAction skill_action(const GridWorld& world, const EntityId& agent, const SkillSpec& skill) {
  const Agent& a = world.agent(agent);
  if (skill.kind == "pick") return pick(world, a, arg(skill, "object"));
  if (skill.kind == "place") {
    const auto object = arg(skill, "object");
    const auto surface = arg(skill, "surface");
    if (a.holding != object) return pick(world, a, object);
    if (!world.is_surface(surface)) return PrimitiveAction::wait();
    const auto& cells = world.surface_cells(surface);
    for (const auto& c : cells)
      if (world.within_reach(a, c)) return PrimitiveAction::place(object, c);
    auto h = next_move(world, agent, [&](Cell p) {
      for (const auto& c : cells)
        if (reachable_from(world, a, p, c)) return true;
      return false;
    });
    return h ? PrimitiveAction::move(*h) : PrimitiveAction::wait();
  }
  if (skill.kind == "set") {
    const auto object = arg(skill, "object");
    const auto prop = arg(skill, "prop");
    const auto value = arg(skill, "value");
    if (!world.is_object(object)) return PrimitiveAction::wait();
    const Obj& o = world.object(object);
    if (auto it = o.props.find(prop); it != o.props.end() && it->second == value) return PrimitiveAction::wait();
    if (o.placement.kind == Placement::Kind::held_by) {
      return o.placement.holder == agent ? PrimitiveAction::state_op(object, prop, value)
                                         : PrimitiveAction::wait();
    }
    if (world.within_reach(a, o.placement.cell)) return PrimitiveAction::state_op(object, prop, value);
    return toward(world, agent, o.placement.cell);
  }
  if (skill.kind == "handover") {
    const auto object = arg(skill, "object");
    const auto partner = arg(skill, "partner");
    if (!world.is_agent(partner)) return PrimitiveAction::wait();
    if (a.holding != object) return pick(world, a, object);
    const Agent& p = world.agent(partner);
    if (chebyshev(a.position, p.position) <= 1) return PrimitiveAction::give(object, partner);
    auto h = next_move(world, agent, [&](Cell c) { return chebyshev(c, p.position) <= 1; });
    return h ? PrimitiveAction::move(*h) : PrimitiveAction::wait();
  }
  return PrimitiveAction::wait();
}

std::optional<SkillSpec> ground_skill(const HtnDomain& domain, const std::string& label,
                                      const std::vector<std::string>& args, const EntityId& agent) {
  const Operator* op = domain.find_operator(label);
  if (!op) return std::nullopt;
  std::map<std::string, std::string> b;
  for (std::size_t i = 0; i < args.size() && i < op->params.size(); ++i) b[op->params[i]] = args[i];
  b["?agent"] = agent;
  SkillSpec s;
  s.kind = op->skill.kind;
  for (const auto& [k, v] : op->skill.args) {
    auto it = b.find(v);
    s.args[k] = it == b.end() ? v : it->second;
  }
  return s;
}

GridWorld believed_world(const GridWorld& world, const AgentMentalState& mental) {
  GridWorld out = world;
  const auto& beliefs = mental.beliefs;
  std::map<EntityId, EntityId> holder_of;  // object -> believed holder
  for (const auto& f : beliefs.facts())
    if (f.predicate.kind == PredKind::isHolding && world.is_agent(f.subject) && world.is_object(f.object))
      holder_of[f.object] = f.subject;

  for (const auto& [id, agent] : world.agents()) {
    (void)agent;
    out.agent_mut(id).holding.reset();
  }
  for (const auto& [id, obj] : world.objects()) {
    Obj& o = out.object_mut(id);
    for (const auto& f : beliefs.facts())
      if (f.subject == id && f.predicate.kind == PredKind::prop && world.prop_domains().contains(f.predicate.name))
        o.props[f.predicate.name] = f.object;
    if (auto h = holder_of.find(id); h != holder_of.end() && !out.agent(h->second).holding) {
      o.placement = Placement{Placement::Kind::held_by, Cell{}, h->second};
      out.agent_mut(h->second).holding = id;
      continue;
    }
    auto cell = mental.believed_cells.find(id);
    auto on = beliefs.find_key(id, Predicate::builtin(PredKind::isOn));
    if (on && world.is_surface(on->object)) {
      const auto& cells = world.surface_cells(on->object);
      Cell c = cells.front();
      if (cell != mental.believed_cells.end() &&
          std::find(cells.begin(), cells.end(), cell->second) != cells.end())
        c = cell->second;
      o.placement = Placement{Placement::Kind::on_surface, c, {}};
      continue;
    }
    if (cell != mental.believed_cells.end() && world.in_bounds(cell->second) &&
        !world.cell(cell->second).blocking) {
      const bool surface = world.cell(cell->second).is_surface();
      o.placement = Placement{surface ? Placement::Kind::on_surface : Placement::Kind::cell, cell->second, {}};
      continue;
    }
    // Unknown whereabouts: keep the true placement unless it is a hand.
    if (obj.placement.kind == Placement::Kind::held_by) {
      const auto& holder = obj.placement.holder;
      if (!out.agent(holder).holding) {
        out.agent_mut(holder).holding = id;
      } else {
        o.placement = Placement{Placement::Kind::cell, world.agent(holder).position, {}};
      }
    }
  }
  return out;
}

}  // namespace coact
