#include "coact/human_models.hpp"

#include <stdexcept>

#include "coact/skills.hpp"

namespace coact {

double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<CommAct> CooperativeHuman::respond(const HumanView& view) {
  std::vector<CommAct> out;
  for (const auto& act : *view.inbox)
    if (act.kind == CommKind::ProposePlan && act.addressee == view.self)
      out.push_back(CommAct::accept_plan(view.self, act.sender, act.plan_id, view.tick));
  return out;
}

PrimitiveAction CooperativeHuman::act(const HumanView& view) {
  const auto& mental = *view.mental;
  const GridWorld& world = *view.world;
  const Agent& me = world.agent(view.self);

  for (const auto& step_id : mental.requested) {
    auto status = mental.step_beliefs.find(step_id);
    if (status == mental.step_beliefs.end() || status->second != StepBelief::pending) continue;
    auto brief = mental.plan_steps.find(step_id);
    if (brief == mental.plan_steps.end() || brief->second.agent != view.self) continue;
    if (knows_task(mental, brief->second.label) == KnowHow::unknown) continue;
    if (!domain_) continue;
    auto skill = ground_skill(*domain_, brief->second.label, brief->second.args, view.self);
    if (!skill) continue;
    const GridWorld believed = believed_world(world, mental);
    return skill_action(believed, view.self, *skill);
  }

  for (const auto& [id, brief] : mental.plan_steps) {
    if (std::find(brief.partners.begin(), brief.partners.end(), view.self) == brief.partners.end()) continue;
    auto status = mental.step_beliefs.find(id);
    if (status != mental.step_beliefs.end() && status->second != StepBelief::pending) continue;
    if (!world.is_agent(brief.agent) || me.holding) continue;
    const Cell giver = world.agent(brief.agent).position;
    if (chebyshev(me.position, giver) <= 1) return PrimitiveAction::look_at(brief.agent);
    if (auto h = next_move(world, view.self, [&](Cell c) { return chebyshev(c, giver) <= 1; }))
      return PrimitiveAction::move(*h);
    return PrimitiveAction::look_at(brief.agent);
  }

  for (const auto& act : *view.inbox)
    if (act.kind == CommKind::Signal && act.addressee == view.self && world.has_entity(act.sender))
      return PrimitiveAction::look_at(act.sender);
  return PrimitiveAction::wait();
}

HumanDecision CooperativeHuman::decide(const HumanView& view) {
  HumanDecision d;
  d.comm = respond(view);
  d.action = act(view);
  return d;
}

HumanDecision DistractedHuman::decide(const HumanView& view) {
  const bool idle = unit_draw(rng_) < p_;
  HumanDecision d;
  d.comm = respond(view);
  d.action = idle ? PrimitiveAction::wait() : act(view);
  return d;
}

std::vector<CommAct> ReluctantHuman::respond(const HumanView& view) {
  std::vector<CommAct> out;
  for (const auto& act : *view.inbox) {
    if (act.kind != CommKind::ProposePlan || act.addressee != view.self) continue;
    if (!rejected_) {
      rejected_ = true;
      NegotiationConstraints c;
      for (const auto& p : refuse_) c.must_not_do.insert({view.self, p});
      out.push_back(CommAct::reject_plan(view.self, act.sender, act.plan_id, c, view.tick));
    } else {
      out.push_back(CommAct::accept_plan(view.self, act.sender, act.plan_id, view.tick));
    }
  }
  return out;
}

HumanDecision ScriptedHuman::decide(const HumanView& view) {
  HumanDecision d;
  for (const auto& act : *view.inbox)
    if (act.kind == CommKind::ProposePlan && act.addressee == view.self)
      d.comm.push_back(CommAct::accept_plan(view.self, act.sender, act.plan_id, view.tick));
  d.action = next_ < script_.size() ? script_[next_++] : PrimitiveAction::wait();
  return d;
}

HumanDecision InteractiveHuman::decide(const HumanView& view) {
  if (auto d = driver_->next(view)) return *d;
  return HumanDecision{PrimitiveAction::wait(), {}};
}

std::uint64_t human_seed(std::uint64_t run_seed, const HumanSpec& spec) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a over the id
  for (unsigned char c : spec.id) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::uint64_t z = run_seed ^ h ^ (spec.seed * 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;  // splitmix64 finalizer
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::unique_ptr<HumanPolicy> make_human_policy(const Scenario& scenario, const HumanSpec& spec,
                                               std::uint64_t run_seed, std::shared_ptr<HumanDriver> driver) {
  const HtnDomain* domain = &scenario.htn;
  if (spec.policy == "Cooperative") return std::make_unique<CooperativeHuman>(domain);
  if (spec.policy == "Distracted")
    return std::make_unique<DistractedHuman>(domain, spec.p, human_seed(run_seed, spec));
  if (spec.policy == "Reluctant") return std::make_unique<ReluctantHuman>(domain, spec.refuse);
  if (spec.policy == "Scripted") return std::make_unique<ScriptedHuman>(spec.script);
  if (spec.policy == "Interactive") {
    if (!driver) throw std::invalid_argument("interactive human '" + spec.id + "' needs a driver");
    return std::make_unique<InteractiveHuman>(std::move(driver));
  }
  throw std::invalid_argument("unknown human policy '" + spec.policy + "'");
}

}  // namespace coact
