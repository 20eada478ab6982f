#include "coact/mental_state.hpp"

#include <algorithm>

namespace coact {

namespace {

bool stored(const Predicate& p) noexcept {
  return p.observable() || p.kind == PredKind::isNextTo;
}

bool movable(const GridWorld& w, const std::string& id) { return w.is_agent(id) || w.is_object(id); }

bool perceivable(const Fact& f, const EntityId& self, const GridWorld& w,
                 const std::set<EntityId>& visible) {
  if (f.subject == self) return true;
  if (movable(w, f.subject) && !visible.contains(f.subject)) return false;
  if (movable(w, f.object) && !visible.contains(f.object)) return false;
  return true;
}

}  // namespace

std::string_view to_string(StepBelief s) noexcept {
  switch (s) {
    case StepBelief::pending: return "pending";
    case StepBelief::done: return "done";
    case StepBelief::failed: return "failed";
  }
  return "?";
}

void BeliefBase::assert_fact(Fact f) {
  if (f.predicate.functional()) {
    auto it = facts_.lower_bound(Fact{f.subject, f.predicate, std::string{}, 0});
    while (it != facts_.end() && it->subject == f.subject && it->predicate == f.predicate)
      it = facts_.erase(it);
  } else {
    facts_.erase(f);
  }
  facts_.insert(std::move(f));
}

void BeliefBase::retract(const Fact& f) { facts_.erase(f); }

std::optional<Fact> BeliefBase::find_key(const EntityId& subject, const Predicate& pred) const {
  auto it = facts_.lower_bound(Fact{subject, pred, std::string{}, 0});
  if (it != facts_.end() && it->subject == subject && it->predicate == pred) return *it;
  return std::nullopt;
}

std::vector<std::string> BeliefBase::strings() const {
  std::vector<std::string> out;
  out.reserve(facts_.size());
  for (const auto& f : facts_) out.push_back(f.to_string());
  std::sort(out.begin(), out.end());
  return out;
}

FactBase BeliefBase::as_fact_base(Tick tick) const {
  FactBase fb(tick);
  for (const auto& f : facts_) fb.insert(f.subject, f.predicate, f.object);
  return fb;
}

AgentMentalState make_mental_state(const EntityId& agent, const GridWorld& world,
                                   const FactBase& facts, std::map<std::string, KnowHow> know_how) {
  AgentMentalState m;
  m.beliefs = BeliefBase(agent);
  for (const auto& f : facts.facts())
    if (stored(f.predicate)) m.beliefs.assert_fact(f);
  m.know_how = std::move(know_how);
  for (const auto& [id, a] : world.agents()) m.believed_cells[id] = a.position;
  for (const auto& [id, o] : world.objects()) {
    (void)o;
    if (auto c = world.entity_cell(id)) m.believed_cells[id] = *c;
  }
  return m;
}

std::set<EntityId> visible_entities(const EntityId& agent, const FactBase& robot_facts) {
  std::set<EntityId> v{agent};
  for (const auto& o : robot_facts.objects_of(agent, Predicate::builtin(PredKind::canSee)))
    v.insert(o);
  return v;
}

AgentMentalState perceive_update(AgentMentalState mental, const GridWorld& world,
                                 const FactBase& robot_facts,
                                 const std::vector<StepUpdate>& step_updates) {
  const EntityId self = mental.agent();
  const auto visible = visible_entities(self, robot_facts);

  // Visibly false beliefs go first so that replacements below are clean.
  std::vector<Fact> stale;
  for (const auto& b : mental.beliefs.facts()) {
    if (!stored(b.predicate)) continue;
    if (perceivable(b, self, world, visible) && !robot_facts.facts().contains(b))
      stale.push_back(b);
  }
  for (const auto& b : stale) mental.beliefs.retract(b);

  for (const auto& f : robot_facts.facts()) {
    if (!stored(f.predicate)) continue;
    if (perceivable(f, self, world, visible)) mental.beliefs.assert_fact(f);
  }

  for (const auto& id : visible)
    if (auto c = world.entity_cell(id)) mental.believed_cells[id] = *c;

  for (const auto& u : step_updates) {
    if (!mental.plan_steps.contains(u.step_id)) continue;
    const bool seen = u.actor == self || visible.contains(u.actor) ||
                      (!u.object.empty() && visible.contains(u.object));
    if (seen) mental.step_beliefs[u.step_id] = u.status;
  }
  return mental;
}

AgentMentalState apply_comm(AgentMentalState mental, const CommAct& act) {
  const EntityId& self = mental.agent();
  if (act.addressee != self && act.sender != self)
    throw CommError("act not addressed to " + self);
  switch (act.kind) {
    case CommKind::Inform: {
      if (!act.fact) throw CommError("Inform without a fact");
      Fact f = *act.fact;
      f.tick = act.tick;
      if (f.predicate.kind == PredKind::stepStatus) {
        if (!mental.plan_steps.contains(f.subject))
          throw CommError("Inform about unknown step '" + f.subject + "'");
        mental.step_beliefs[f.subject] = f.object == "done"     ? StepBelief::done
                                         : f.object == "failed" ? StepBelief::failed
                                                                : StepBelief::pending;
        break;
      }
      mental.beliefs.assert_fact(std::move(f));
      break;
    }
    case CommKind::Explain: mental.know_how[act.task_label] = KnowHow::known; break;
    case CommKind::ProposePlan:
      if (act.addressee != self) break;
      mental.goal_aware = true;
      mental.plan_aware = act.plan_id;
      mental.plan_steps.clear();
      mental.step_beliefs.clear();
      mental.requested.clear();
      for (const auto& s : act.steps) {
        mental.plan_steps[s.step_id] = s;
        mental.step_beliefs[s.step_id] = StepBelief::pending;
      }
      break;
    case CommKind::RequestAction:
      if (!mental.plan_aware || !mental.plan_steps.contains(act.step_id))
        throw CommError("RequestAction for unknown step '" + act.step_id + "'");
      mental.step_beliefs[act.step_id] = StepBelief::pending;
      mental.requested.push_back(act.step_id);
      break;
    case CommKind::AcceptPlan:
    case CommKind::RejectPlan:
    case CommKind::AskFact:
    case CommKind::Answer:
    case CommKind::Signal: break;
  }
  return mental;
}

std::pair<EntityId, std::string> Divergence::key() const {
  const Fact& f = actual ? *actual : *believed;
  return {f.subject, f.predicate.to_string()};
}

std::vector<Divergence> divergences(const FactBase& robot_facts, const PlanDigest* plan,
                                    const AgentMentalState& mental) {
  using Key = std::pair<EntityId, Predicate>;
  std::map<Key, std::pair<std::optional<Fact>, std::optional<Fact>>> by_key;
  for (const auto& f : mental.beliefs.facts())
    if (f.predicate.observable()) by_key[{f.subject, f.predicate}].first = f;
  for (const auto& f : robot_facts.facts())
    if (f.predicate.observable()) by_key[{f.subject, f.predicate}].second = f;

  std::set<Key> pending_keys;
  if (plan) {
    for (const auto& s : plan->steps) {
      if (s.agent != mental.agent() || s.actual == StepBelief::done) continue;
      for (const auto& [lit, negated] : s.preconditions) {
        (void)negated;
        pending_keys.insert({lit.subject, lit.predicate});
      }
    }
  }

  std::vector<Divergence> out;
  for (const auto& [key, pair] : by_key) {
    const auto& [believed, actual] = pair;
    if (believed && actual && believed->object == actual->object) continue;
    out.push_back(Divergence{mental.agent(), believed, actual, pending_keys.contains(key)});
  }

  if (plan) {
    bool has_steps = false;
    for (const auto& s : plan->steps) {
      if (s.agent != mental.agent()) continue;
      has_steps = true;
      if (s.actual == StepBelief::pending) continue;
      auto it = mental.step_beliefs.find(s.id);
      const StepBelief believed = it == mental.step_beliefs.end() ? StepBelief::pending : it->second;
      if (believed == s.actual) continue;
      const auto status = Predicate::builtin(PredKind::stepStatus);
      out.push_back(Divergence{mental.agent(),
                               Fact{s.id, status, std::string(to_string(believed)), 0},
                               Fact{s.id, status, std::string(to_string(s.actual)), 0}, true});
    }
    if (has_steps && mental.plan_aware != plan->plan_id) {
      const auto aware = Predicate::builtin(PredKind::isAwareOf);
      std::optional<Fact> believed;
      if (mental.plan_aware) believed = Fact{mental.agent(), aware, *mental.plan_aware, 0};
      out.push_back(
          Divergence{mental.agent(), believed, Fact{mental.agent(), aware, plan->plan_id, 0}, true});
    }
  }
  return out;
}

KnowHow knows_task(const AgentMentalState& mental, const std::string& task_label) {
  auto it = mental.know_how.find(task_label);
  return it == mental.know_how.end() ? KnowHow::known : it->second;
}

}  // namespace coact
