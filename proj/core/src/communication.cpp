#include "coact/communication.hpp"

#include <algorithm>

namespace coact {

std::string_view to_string(CommKind k) noexcept {
  switch (k) {
    case CommKind::Inform: return "Inform";
    case CommKind::AskFact: return "AskFact";
    case CommKind::Answer: return "Answer";
    case CommKind::ProposePlan: return "ProposePlan";
    case CommKind::AcceptPlan: return "AcceptPlan";
    case CommKind::RejectPlan: return "RejectPlan";
    case CommKind::RequestAction: return "RequestAction";
    case CommKind::Explain: return "Explain";
    case CommKind::Signal: return "Signal";
  }
  return "?";
}

std::optional<CommKind> parse_comm_kind(std::string_view s) noexcept {
  for (auto k : {CommKind::Inform, CommKind::AskFact, CommKind::Answer, CommKind::ProposePlan,
                 CommKind::AcceptPlan, CommKind::RejectPlan, CommKind::RequestAction,
                 CommKind::Explain, CommKind::Signal})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

void NegotiationConstraints::merge(const NegotiationConstraints& other) {
  must_do.insert(other.must_do.begin(), other.must_do.end());
  must_not_do.insert(other.must_not_do.begin(), other.must_not_do.end());
}

CommAct CommAct::inform(EntityId from, EntityId to, Fact f, Tick t) {
  CommAct a;
  a.kind = CommKind::Inform;
  a.sender = std::move(from);
  a.addressee = std::move(to);
  a.tick = t;
  a.fact = std::move(f);
  return a;
}

CommAct CommAct::explain(EntityId from, EntityId to, std::string task, Tick t) {
  CommAct a;
  a.kind = CommKind::Explain;
  a.sender = std::move(from);
  a.addressee = std::move(to);
  a.tick = t;
  a.task_label = std::move(task);
  return a;
}

CommAct CommAct::request_action(EntityId from, EntityId to, std::string step, Tick t) {
  CommAct a;
  a.kind = CommKind::RequestAction;
  a.sender = std::move(from);
  a.addressee = std::move(to);
  a.tick = t;
  a.step_id = std::move(step);
  return a;
}

CommAct CommAct::accept_plan(EntityId from, EntityId to, std::string plan, Tick t) {
  CommAct a;
  a.kind = CommKind::AcceptPlan;
  a.sender = std::move(from);
  a.addressee = std::move(to);
  a.tick = t;
  a.plan_id = std::move(plan);
  return a;
}

CommAct CommAct::reject_plan(EntityId from, EntityId to, std::string plan,
                             NegotiationConstraints c, Tick t) {
  CommAct a;
  a.kind = CommKind::RejectPlan;
  a.sender = std::move(from);
  a.addressee = std::move(to);
  a.tick = t;
  a.plan_id = std::move(plan);
  a.constraints = std::move(c);
  return a;
}

CommAct CommAct::signal_act(EntityId from, EntityId to, ActionKind how, EntityId target, Tick t) {
  CommAct a;
  a.kind = CommKind::Signal;
  a.sender = std::move(from);
  a.addressee = std::move(to);
  a.tick = t;
  a.signal = how;
  a.signal_target = std::move(target);
  return a;
}

// ---------------------------------------------------------------------------

ReferenceContext ReferenceContext::from_world(const GridWorld& world) {
  ReferenceContext ctx;
  for (const auto& [id, o] : world.objects()) ctx.types[id] = o.type_label;
  for (const auto& [id, a] : world.agents()) ctx.types[id] = std::string(to_string(a.kind));
  for (const auto& [name, values] : world.prop_domains()) {
    (void)values;
    ctx.props.insert(name);
  }
  return ctx;
}

namespace {

void check_constraint(const Predicate& p, const ReferenceContext& ctx) {
  switch (p.kind) {
    case PredKind::isIn:
    case PredKind::isOn:
    case PredKind::isNextTo: return;
    case PredKind::prop:
      if (ctx.props.contains(p.name)) return;
      break;
    default: break;
  }
  throw ReferenceError("predicate '" + p.to_string() + "' cannot constrain a reference");
}

/// Typed entities the beliefs mention as a subject.
std::vector<EntityId> believed_entities(const BeliefBase& beliefs, const ReferenceContext& ctx) {
  std::set<EntityId> ids;
  for (const auto& f : beliefs.facts())
    if (ctx.types.contains(f.subject)) ids.insert(f.subject);
  return {ids.begin(), ids.end()};
}

std::vector<EntityId> filter(const std::vector<EntityId>& in, const BeliefBase& beliefs,
                             const Predicate& p, const std::string& value) {
  std::vector<EntityId> out;
  for (const auto& id : in)
    if (beliefs.contains(Fact{id, p, value, 0})) out.push_back(id);
  return out;
}

std::vector<EntityId> of_type(const std::vector<EntityId>& ids, const ReferenceContext& ctx,
                              const std::string& type) {
  std::vector<EntityId> out;
  for (const auto& id : ids)
    if (ctx.types.at(id) == type) out.push_back(id);
  return out;
}

Resolution classify(std::vector<EntityId> c) {
  Resolution r;
  r.kind = c.empty() ? Resolution::Kind::none
           : c.size() == 1 ? Resolution::Kind::unique
                           : Resolution::Kind::ambiguous;
  r.candidates = std::move(c);
  return r;
}

}  // namespace

Resolution resolve_reference(const ReferringExpression& expr, const BeliefBase& speaker_beliefs,
                             const ReferenceContext& ctx) {
  for (const auto& [p, v] : expr.constraints) {
    (void)v;
    check_constraint(p, ctx);
  }
  auto candidates = of_type(believed_entities(speaker_beliefs, ctx), ctx, expr.type_label);
  for (const auto& [p, v] : expr.constraints) candidates = filter(candidates, speaker_beliefs, p, v);
  return classify(std::move(candidates));
}

std::optional<ReferringExpression> generate_reference(const EntityId& entity,
                                                      const BeliefBase& addressee_beliefs,
                                                      const ReferenceContext& ctx) {
  const auto all = believed_entities(addressee_beliefs, ctx);
  if (std::find(all.begin(), all.end(), entity) == all.end())
    throw ReferenceError("addressee has no belief about '" + entity + "'");

  ReferringExpression expr{ctx.types.at(entity), {}};
  auto candidates = of_type(all, ctx, expr.type_label);

  std::vector<std::pair<Predicate, std::string>> options;
  for (auto kind : {PredKind::isOn, PredKind::isIn}) {
    if (auto f = addressee_beliefs.find_key(entity, Predicate::builtin(kind)))
      options.emplace_back(f->predicate, f->object);
  }
  for (const auto& f : addressee_beliefs.facts()) {
    if (f.subject != entity || f.predicate.kind != PredKind::isNextTo) continue;
    // Landmarks must be identifiable by type alone.
    if (!ctx.types.contains(f.object)) continue;
    if (of_type(all, ctx, ctx.types.at(f.object)).size() == 1) options.emplace_back(f.predicate, f.object);
  }
  for (const auto& f : addressee_beliefs.facts())
    if (f.subject == entity && f.predicate.kind == PredKind::prop && ctx.props.contains(f.predicate.name))
      options.emplace_back(f.predicate, f.object);

  for (const auto& [p, v] : options) {
    if (candidates.size() == 1) break;
    auto narrowed = filter(candidates, addressee_beliefs, p, v);
    if (narrowed.size() < candidates.size()) {
      candidates = std::move(narrowed);
      expr.constraints.emplace_back(p, v);
    }
  }
  if (candidates.size() != 1) return std::nullopt;
  return expr;
}

Resolution disambiguate_with_signal(const std::vector<EntityId>& candidates,
                                    const FactBase& speaker_signals, const EntityId& speaker) {
  std::vector<EntityId> sorted = candidates;
  std::sort(sorted.begin(), sorted.end());
  for (auto kind : {PredKind::isPointingAt, PredKind::isLookingAt}) {
    if (sorted.size() <= 1) break;
    auto targets = speaker_signals.objects_of(speaker, Predicate::builtin(kind));
    std::vector<EntityId> hit;
    for (const auto& id : sorted)
      if (std::find(targets.begin(), targets.end(), id) != targets.end()) hit.push_back(id);
    if (!hit.empty()) sorted = std::move(hit);
  }
  return classify(std::move(sorted));
}

}  // namespace coact
