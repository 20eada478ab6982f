#include "coact/facts.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <sstream>

namespace coact {

namespace {

struct NamedKind {
  std::string_view name;
  PredKind kind;
};

constexpr std::array<NamedKind, 11> kBuiltins = {{
    {"isIn", PredKind::isIn},
    {"isOn", PredKind::isOn},
    {"isNextTo", PredKind::isNextTo},
    {"isHolding", PredKind::isHolding},
    {"canSee", PredKind::canSee},
    {"canReach", PredKind::canReach},
    {"isLookingAt", PredKind::isLookingAt},
    {"isPointingAt", PredKind::isPointingAt},
    {"isMovingToward", PredKind::isMovingToward},
    {"stepStatus", PredKind::stepStatus},
    {"isAwareOf", PredKind::isAwareOf},
}};

}  // namespace

Predicate Predicate::from_name(std::string_view name) {
  for (const auto& b : kBuiltins)
    if (b.name == name) return builtin(b.kind);
  return prop(std::string(name));
}

std::string Predicate::to_string() const {
  if (kind == PredKind::prop) return name;
  for (const auto& b : kBuiltins)
    if (b.kind == kind) return std::string(b.name);
  return "?";
}

bool Predicate::functional() const noexcept {
  switch (kind) {
    case PredKind::isIn:
    case PredKind::isOn:
    case PredKind::isHolding:
    case PredKind::isLookingAt:
    case PredKind::isPointingAt:
    case PredKind::prop:
    case PredKind::stepStatus:
    case PredKind::isAwareOf: return true;
    default: return false;
  }
}

bool Predicate::observable() const noexcept {
  switch (kind) {
    case PredKind::isIn:
    case PredKind::isOn:
    case PredKind::isHolding:
    case PredKind::prop: return true;
    default: return false;
  }
}

std::string Fact::to_string() const {
  return subject + ' ' + predicate.to_string() + ' ' + object;
}

Fact Fact::parse(std::string_view text, Tick tick) {
  std::istringstream in{std::string(text)};
  std::string s, p, o, extra;
  if (!(in >> s >> p >> o) || (in >> extra))
    throw std::invalid_argument("malformed fact '" + std::string(text) + "'");
  return Fact{s, Predicate::from_name(p), o, tick};
}

void FactBase::insert(EntityId subject, Predicate pred, std::string object) {
  facts_.insert(Fact{std::move(subject), std::move(pred), std::move(object), tick_});
}

bool FactBase::contains(const EntityId& subject, const Predicate& pred,
                        const std::string& object) const {
  return facts_.contains(Fact{subject, pred, object, 0});
}

bool FactBase::contains(std::string_view fact_text) const {
  return facts_.contains(Fact::parse(fact_text));
}

std::optional<std::string> FactBase::value_of(const EntityId& subject,
                                              const Predicate& pred) const {
  auto it = facts_.lower_bound(Fact{subject, pred, std::string{}, 0});
  if (it != facts_.end() && it->subject == subject && it->predicate == pred) return it->object;
  return std::nullopt;
}

std::vector<std::string> FactBase::objects_of(const EntityId& subject,
                                              const Predicate& pred) const {
  std::vector<std::string> out;
  for (auto it = facts_.lower_bound(Fact{subject, pred, std::string{}, 0});
       it != facts_.end() && it->subject == subject && it->predicate == pred; ++it)
    out.push_back(it->object);
  return out;
}

std::vector<std::string> FactBase::strings() const {
  std::vector<std::string> out;
  out.reserve(facts_.size());
  for (const auto& f : facts_) out.push_back(f.to_string());
  std::sort(out.begin(), out.end());
  return out;
}

bool can_see(const GridWorld& world, const Agent& viewer, Cell target) {
  if (target == viewer.position) return true;
  if (euclidean(viewer.position, target) > viewer.view_range + 1e-9) return false;
  if (angle_off_heading(viewer.heading, viewer.position, target) > viewer.view_half_angle + 1e-9)
    return false;
  bool clear = true;
  bresenham_interior(viewer.position, target, [&](Cell c) {
    if (world.cell(c).blocking) {
      clear = false;
      return false;
    }
    return true;
  });
  return clear;
}

namespace {

struct Located {
  EntityId id;
  Cell cell;
  bool held{false};
  EntityId holder;
};

std::vector<Located> locate_all(const GridWorld& w) {
  std::vector<Located> out;
  for (const auto& [id, a] : w.agents()) out.push_back({id, a.position, false, {}});
  for (const auto& [id, o] : w.objects()) {
    auto c = w.entity_cell(id);
    if (!c) continue;
    const bool held = o.placement.kind == Placement::Kind::held_by;
    out.push_back({id, *c, held, held ? o.placement.holder : EntityId{}});
  }
  return out;
}

}  // namespace

FactBase assess(const GridWorld& world, std::span<const GridWorld> history) {
  FactBase fb(world.tick());
  const auto located = locate_all(world);
  const auto isIn = Predicate::builtin(PredKind::isIn);

  for (const auto& [id, a] : world.agents()) fb.insert(id, isIn, world.room_of(a.position));
  for (const auto& [id, o] : world.objects()) {
    switch (o.placement.kind) {
      case Placement::Kind::held_by:
        fb.insert(o.placement.holder, Predicate::builtin(PredKind::isHolding), id);
        break;
      case Placement::Kind::on_surface:
        fb.insert(id, Predicate::builtin(PredKind::isOn), world.cell(o.placement.cell).surface);
        fb.insert(id, isIn, world.room_of(o.placement.cell));
        break;
      case Placement::Kind::cell: fb.insert(id, isIn, world.room_of(o.placement.cell)); break;
    }
    for (const auto& [name, value] : o.props) fb.insert(id, Predicate::prop(name), value);
  }

  // isNextTo between placed (not held) entities.
  for (std::size_t i = 0; i < located.size(); ++i) {
    if (located[i].held) continue;
    for (std::size_t j = i + 1; j < located.size(); ++j) {
      if (located[j].held) continue;
      if (chebyshev(located[i].cell, located[j].cell) <= 1) {
        fb.insert(located[i].id, Predicate::builtin(PredKind::isNextTo), located[j].id);
        fb.insert(located[j].id, Predicate::builtin(PredKind::isNextTo), located[i].id);
      }
    }
  }

  for (const auto& [vid, viewer] : world.agents()) {
    const EntityId* looked = nullptr;
    double looked_dist = std::numeric_limits<double>::infinity();
    for (const auto& e : located) {
      if (e.id == vid) continue;
      const bool own = e.held && e.holder == vid;
      if (can_see(world, viewer, e.cell)) {
        fb.insert(vid, Predicate::builtin(PredKind::canSee), e.id);
        const double d = euclidean(viewer.position, e.cell);
        if (!own && d > 0.0 &&
            angle_off_heading(viewer.heading, viewer.position, e.cell) <= kLookingHalfAngle + 1e-9 &&
            (d < looked_dist || (d == looked_dist && e.id < *looked))) {
          looked = &e.id;
          looked_dist = d;
        }
      }
      if (world.is_object(e.id) && !own && world.within_reach(viewer, e.cell))
        fb.insert(vid, Predicate::builtin(PredKind::canReach), e.id);
    }
    if (looked) fb.insert(vid, Predicate::builtin(PredKind::isLookingAt), *looked);
    if (viewer.pointing && world.tick() - viewer.pointing->tick <= kPointingPersistence &&
        world.tick() >= viewer.pointing->tick && world.has_entity(viewer.pointing->target))
      fb.insert(vid, Predicate::builtin(PredKind::isPointingAt), viewer.pointing->target);
  }

  if (history.size() + 1 >= kMotionWindow) {
    const GridWorld& w0 = history[history.size() - 2];
    const GridWorld& w1 = history[history.size() - 1];
    for (const auto& [sid, subject] : world.agents()) {
      if (!w0.is_agent(sid) || !w1.is_agent(sid)) continue;
      if (w0.agent(sid).position == subject.position) continue;
      for (const auto& e : located) {
        if (e.id == sid || (e.held && e.holder == sid)) continue;
        auto c0 = w0.entity_cell(e.id);
        auto c1 = w1.entity_cell(e.id);
        if (!c0 || !c1) continue;
        const int d0 = chebyshev(w0.agent(sid).position, *c0);
        const int d1 = chebyshev(w1.agent(sid).position, *c1);
        const int d2 = chebyshev(subject.position, e.cell);
        if (d0 >= d1 && d1 >= d2 && d0 - d2 >= 1)
          fb.insert(sid, Predicate::builtin(PredKind::isMovingToward), e.id);
      }
    }
  }
  return fb;
}

FactDiff diff(const FactBase& before, const FactBase& after) {
  FactDiff d;
  std::set_difference(after.facts().begin(), after.facts().end(), before.facts().begin(),
                      before.facts().end(), std::back_inserter(d.added));
  std::set_difference(before.facts().begin(), before.facts().end(), after.facts().begin(),
                      after.facts().end(), std::back_inserter(d.removed));
  return d;
}

}  // namespace coact
