#include "coact/executive.hpp"

#include <algorithm>

#include "coact/skills.hpp"

namespace coact {

std::string_view to_string(Phase p) noexcept {
  switch (p) {
    case Phase::observing: return "observing";
    case Phase::proposing: return "proposing";
    case Phase::executing: return "executing";
    case Phase::replanning: return "replanning";
    case Phase::achieved: return "achieved";
    case Phase::aborted: return "aborted";
  }
  return "?";
}

std::string_view to_string(StepStatus s) noexcept {
  switch (s) {
    case StepStatus::pending: return "pending";
    case StepStatus::active: return "active";
    case StepStatus::done: return "done";
    case StepStatus::failed: return "failed";
  }
  return "?";
}

AtomSet planning_state(const FactBase& facts, const AtomSet& static_facts) {
  AtomSet out = static_facts;
  for (const auto& f : facts.facts())
    if (f.predicate.observable()) out.insert(Atom::from_fact(f));
  return out;
}

PlanDigest make_digest(const SharedPlan& plan, const std::map<std::string, StepStatus>& status) {
  PlanDigest d;
  d.plan_id = plan.id;
  for (const auto& s : plan.steps) {
    PlanDigest::Step ds;
    ds.id = s.id;
    ds.agent = s.agent;
    for (const auto& l : s.pre)
      ds.preconditions.emplace_back(Fact{l.subject, Predicate::from_name(l.predicate), l.object, 0}, l.negated);
    auto it = status.find(s.id);
    const auto st = it == status.end() ? StepStatus::pending : it->second;
    ds.actual = st == StepStatus::done ? StepBelief::done
                : st == StepStatus::failed ? StepBelief::failed
                                           : StepBelief::pending;
    d.steps.push_back(std::move(ds));
  }
  return d;
}

namespace {

std::string skill_arg(const PlanStep& s, const std::string& key) {
  auto it = s.skill.args.find(key);
  return it == s.skill.args.end() ? std::string{} : it->second;
}

bool event_completes(const PlanStep& s, const Event& e, const GridWorld& after) {
  if (!e.succeeded()) return false;
  const auto& a = e.action;
  const auto& kind = s.skill.kind;
  if (kind == "pick")
    return e.actor == s.agent && (a.kind == ActionKind::PickUp || a.kind == ActionKind::Take) &&
           a.object == skill_arg(s, "object");
  if (kind == "place")
    return e.actor == s.agent && a.kind == ActionKind::Place && a.object == skill_arg(s, "object") &&
           after.in_bounds(a.cell) && after.cell(a.cell).surface == skill_arg(s, "surface");
  if (kind == "set")
    return e.actor == s.agent && a.kind == ActionKind::StateOp && a.object == skill_arg(s, "object") &&
           a.prop == skill_arg(s, "prop") && a.value == skill_arg(s, "value");
  if (kind == "handover") {
    const auto object = skill_arg(s, "object");
    const auto partner = skill_arg(s, "partner");
    return (e.actor == s.agent && a.kind == ActionKind::Give && a.object == object && a.target == partner) ||
           (e.actor == partner && a.kind == ActionKind::Take && a.object == object && a.target == s.agent);
  }
  return false;
}

bool holds_all(const std::vector<Literal>& pre, const AtomSet& state) {
  return std::all_of(pre.begin(), pre.end(), [&](const Literal& l) { return literal_holds(l, state); });
}

std::map<EntityId, AgentKind> kinds_of(const GridWorld& w) {
  std::map<EntityId, AgentKind> out;
  for (const auto& [id, a] : w.agents()) out[id] = a.kind;
  return out;
}

std::multiset<std::pair<std::string, EntityId>> human_assignment(const SharedPlan& plan, const EntityId& human,
                                                                 const std::map<std::string, StepStatus>* status) {
  std::multiset<std::pair<std::string, EntityId>> out;
  for (const auto& s : plan.steps) {
    if (status) {
      auto it = status->find(s.id);
      if (it != status->end() && it->second == StepStatus::done) continue;
    }
    const auto partner = skill_arg(s, "partner");
    if (s.agent == human || partner == human) out.insert({s.task.to_string(), s.agent});
  }
  return out;
}

bool has_human_role(const SharedPlan& plan, const EntityId& human) {
  return !human_assignment(plan, human, nullptr).empty();
}

CommAct proposal(const Scenario& sc, const SharedPlan& plan, const EntityId& human, Tick tick) {
  CommAct act;
  act.kind = CommKind::ProposePlan;
  act.sender = sc.robot;
  act.addressee = human;
  act.tick = tick;
  act.plan_id = plan.id;
  act.summary = plan.summary;
  act.steps = step_briefs(plan);
  return act;
}

void install(ExecutionState& st, SharedPlan plan) {
  st.status.clear();
  for (const auto& s : plan.steps) st.status[s.id] = StepStatus::pending;
  st.wait_timers.clear();
  st.requested.clear();
  st.handover.reset();
  st.handover_step.clear();
  st.plan_ids.push_back(plan.id);
  st.plan = std::move(plan);
}

void transition(ExecutionState& st, MonitorVerdict& v, Phase to, std::string reason) {
  st.phase = to;
  st.reason = reason;
  v.transition = std::string(to_string(to)) + (reason.empty() ? "" : ": " + reason);
}

/// Sends proposals to every human with a role in the plan; returns whether any was sent.
bool propose_to_humans(ExecutionState& st, const Scenario& sc, const ExecutiveInput& in, MonitorVerdict& v,
                       const std::set<EntityId>& only) {
  st.awaiting.clear();
  st.proposal_wait = 0;
  for (const auto& [id, kind] : kinds_of(*in.world)) {
    if (kind != AgentKind::human || st.disengaged.contains(id) || !has_human_role(*st.plan, id)) continue;
    if (!only.empty() && !only.contains(id)) continue;
    v.comm.push_back(proposal(sc, *st.plan, id, in.tick));
    st.awaiting.insert(id);
  }
  return !st.awaiting.empty();
}

MonitorVerdict adopt_result(ExecutionState& st, const Scenario& sc, const ExecutiveInput& in,
                            const PlanResult& result, bool initial) {
  MonitorVerdict v;
  if (const auto* f = std::get_if<PlanFailure>(&result)) {
    std::string reason = f->message;
    if (!st.disengaged.empty()) {
      std::string who;
      for (const auto& id : st.disengaged) who += (who.empty() ? "" : ",") + id;
      reason = "partner disengaged (" + who + "); " + reason;
    }
    transition(st, v, Phase::aborted, reason);
    return v;
  }
  SharedPlan plan = std::get<SharedPlan>(result);
  std::optional<SharedPlan> old = st.plan;
  const auto old_status = st.status;
  install(st, std::move(plan));
  if (st.plan->steps.empty()) {
    transition(st, v, Phase::achieved, "goal already satisfied");
    return v;
  }
  std::set<EntityId> changed;
  for (const auto& [id, kind] : kinds_of(*in.world)) {
    if (kind != AgentKind::human || st.disengaged.contains(id)) continue;
    const auto now = human_assignment(*st.plan, id, nullptr);
    if (now.empty()) continue;
    const auto& mental = in.mentals->at(id);
    const bool aware = old && mental.plan_aware == old->id;
    if (!initial && aware && human_assignment(*old, id, &old_status) == now) {
      v.keep_awareness.push_back(id);
    } else {
      changed.insert(id);
    }
  }
  if (!v.keep_awareness.empty()) v.previous_plan = old;
  if (!changed.empty() && propose_to_humans(st, sc, in, v, changed)) {
    transition(st, v, Phase::proposing, "awaiting answers to " + st.plan->id);
  } else {
    transition(st, v, Phase::executing, initial ? "no human steps to propose" : "plan " + st.plan->id + " installed");
  }
  return v;
}

PlanRequest make_request(const Scenario& sc, const GoalSpec& goal, const ExecutiveInput& in) {
  PlanRequest r;
  r.domain = &sc.htn;
  r.initial = planning_state(*in.facts, sc.static_facts);
  r.goal = goal.task;
  r.goal_condition = goal.condition;
  for (const auto& [id, a] : in.world->agents()) r.agents.push_back({id, a.kind});
  r.knowledge = sc.knowledge;
  r.policy = sc.policy;
  return r;
}

void merge_verdict(MonitorVerdict& into, MonitorVerdict from) {
  into.comm.insert(into.comm.end(), from.comm.begin(), from.comm.end());
  if (from.transition) into.transition = from.transition;
  into.keep_awareness.insert(into.keep_awareness.end(), from.keep_awareness.begin(), from.keep_awareness.end());
  if (from.previous_plan) into.previous_plan = std::move(from.previous_plan);
}

/// Handles AcceptPlan / RejectPlan acts addressed to the robot.
void process_responses(ExecutionState& st, const Scenario& sc, const ExecutiveInput& in, MonitorVerdict& v) {
  if (!in.inbox || !st.plan || !st.negotiation) return;
  for (const auto& act : *in.inbox) {
    if (act.kind != CommKind::AcceptPlan && act.kind != CommKind::RejectPlan) continue;
    if (act.plan_id != st.plan->id) continue;  // stale answer to a superseded proposal
    if (act.kind == CommKind::AcceptPlan) {
      st.awaiting.erase(act.sender);
      continue;
    }
    auto outcome = st.negotiation->respond(*st.plan, act);
    if (outcome.kind == NegotiationOutcome::Kind::infeasible) {
      transition(st, v, Phase::aborted, outcome.failure.message);
      return;
    }
    ++st.replans;
    merge_verdict(v, adopt_result(st, sc, in, PlanResult{*outcome.plan}, true));
    return;
  }
}

}  // namespace

std::vector<StepUpdate> match_step_events(const SharedPlan& plan,
                                          const std::map<std::string, StepStatus>& status,
                                          const std::vector<Event>& events, const GridWorld& after) {
  std::vector<StepUpdate> out;
  std::set<std::string> used;
  for (const auto& e : events) {
    for (const auto& s : plan.steps) {
      auto it = status.find(s.id);
      if (it != status.end() && (it->second == StepStatus::done || it->second == StepStatus::failed)) continue;
      if (used.contains(s.id) || !event_completes(s, e, after)) continue;
      used.insert(s.id);
      out.push_back({s.id, StepBelief::done, e.actor, e.action.object});
      break;
    }
  }
  return out;
}

std::vector<std::size_t> eligible_steps(const SharedPlan& plan, const std::map<std::string, StepStatus>& status) {
  std::vector<std::size_t> out;
  auto st = [&](std::size_t i) {
    auto it = status.find(plan.steps[i].id);
    return it == status.end() ? StepStatus::pending : it->second;
  };
  for (std::size_t j = 0; j < plan.steps.size(); ++j) {
    if (st(j) == StepStatus::done || st(j) == StepStatus::failed) continue;
    bool ready = true;
    for (const auto& [a, b] : plan.ordering)
      if (b == j && st(a) != StepStatus::done) ready = false;
    if (ready) out.push_back(j);
  }
  return out;
}

std::vector<StepBrief> step_briefs(const SharedPlan& plan) {
  std::vector<StepBrief> out;
  for (const auto& s : plan.steps) {
    StepBrief b;
    b.step_id = s.id;
    b.task = s.task.to_string();
    b.label = s.task.name;
    b.args = s.task.args;
    b.agent = s.agent;
    if (auto p = skill_arg(s, "partner"); !p.empty()) b.partners.push_back(p);
    out.push_back(std::move(b));
  }
  return out;
}

AgentMentalState remap_plan_awareness(AgentMentalState mental, const SharedPlan& old_plan,
                                      const SharedPlan& new_plan) {
  std::map<std::pair<std::string, EntityId>, std::string> old_ids;
  for (const auto& s : old_plan.steps) old_ids.emplace(std::pair{s.task.to_string(), s.agent}, s.id);
  std::map<std::string, StepBelief> beliefs;
  std::map<std::string, std::string> renamed;
  for (const auto& s : new_plan.steps) {
    auto it = old_ids.find({s.task.to_string(), s.agent});
    StepBelief b = StepBelief::pending;
    if (it != old_ids.end()) {
      renamed[it->second] = s.id;
      if (auto ob = mental.step_beliefs.find(it->second); ob != mental.step_beliefs.end()) b = ob->second;
    }
    beliefs[s.id] = b;
  }
  std::vector<std::string> requested;
  for (const auto& r : mental.requested)
    if (auto it = renamed.find(r); it != renamed.end()) requested.push_back(it->second);
  mental.plan_aware = new_plan.id;
  mental.plan_steps.clear();
  for (auto& b : step_briefs(new_plan)) mental.plan_steps[b.step_id] = std::move(b);
  mental.step_beliefs = std::move(beliefs);
  mental.requested = std::move(requested);
  return mental;
}

MonitorVerdict start_goal(ExecutionState& st, const Scenario& sc, const std::string& goal_id,
                          const ExecutiveInput& in) {
  const GoalSpec& goal = sc.goal(goal_id);
  st.goal_id = goal_id;
  st.negotiation.emplace(make_request(sc, goal, in));
  auto result = st.negotiation->propose();
  return adopt_result(st, sc, in, result, true);
}

MonitorVerdict handle_replan(ExecutionState& st, const Scenario& sc, const ExecutiveInput& in,
                             const PlanResult& result) {
  if (std::holds_alternative<SharedPlan>(result)) ++st.replans;
  return adopt_result(st, sc, in, result, false);
}

Commitment commitment_check(const ExecutionState& st, const Scenario& sc) {
  for (const auto& [agent, count] : st.request_counts)
    if (count >= sc.executive.max_ignored) return {false, agent};
  return {};
}

MonitorVerdict tick_executive(ExecutionState& st, const Scenario& sc, const ExecutiveInput& in) {
  MonitorVerdict v;
  v.robot_command = PrimitiveAction::wait();
  if (st.terminal()) return v;

  if (st.phase == Phase::observing) {
    if (!sc.intentions) return v;
    const auto help = decide_help(st.posterior, sc.intentions->model.threshold, sc.intentions->capability);
    if (!help.adopt) return v;
    std::string goal_ref;
    for (const auto& g : sc.intentions->model.goals)
      if (g.id == help.goal) goal_ref = g.goal_ref;
    if (goal_ref.empty()) return v;
    merge_verdict(v, start_goal(st, sc, goal_ref, in));
    v.transition = "adopted " + goal_ref + " (" + help.goal + "); " + v.transition.value_or("");
    return v;
  }

  // Step completion first, so answers and replans see the current status.
  if (st.plan && in.step_updates)
    for (const auto& u : *in.step_updates) st.status[u.step_id] = StepStatus::done;

  process_responses(st, sc, in, v);
  if (st.terminal()) return v;

  if (st.phase == Phase::proposing) {
    if (++st.proposal_wait > sc.executive.wait_timeout) st.awaiting.clear();  // silence counts as consent
    if (!st.awaiting.empty()) return v;
    transition(st, v, Phase::executing, "proposal " + st.plan->id + " accepted");
  }

  if (st.phase == Phase::replanning) {
    st.negotiation->set_initial(planning_state(*in.facts, sc.static_facts));
    merge_verdict(v, handle_replan(st, sc, in, st.negotiation->propose()));
    return v;
  }

  if (st.phase != Phase::executing || !st.plan) return v;
  const SharedPlan& plan = *st.plan;
  const AtomSet state = planning_state(*in.facts, sc.static_facts);
  const auto kinds = kinds_of(*in.world);

  // (1) progress bookkeeping
  if (std::all_of(plan.steps.begin(), plan.steps.end(),
                  [&](const PlanStep& s) { return st.status[s.id] == StepStatus::done; })) {
    transition(st, v, Phase::achieved, "all steps done");
    return v;
  }
  std::map<EntityId, bool> progressed;
  if (in.events)
    for (const auto& e : *in.events)
      if (e.succeeded() && e.action.kind != ActionKind::Wait) progressed[e.actor] = true;
  for (auto& [step_id, timer] : st.wait_timers) {
    if (st.status[step_id] == StepStatus::done) continue;
    const auto& agent = plan.steps[plan.index_of(step_id)].agent;
    timer = progressed[agent] ? 0 : timer + 1;
  }

  // (5) monitoring: feasibility of the remainder, then timeouts
  std::vector<std::size_t> remaining;
  for (std::size_t i = 0; i < plan.steps.size(); ++i)
    if (st.status[plan.steps[i].id] != StepStatus::done) remaining.push_back(i);
  if (auto bad = validate(plan.restrict_to(remaining), state)) {
    transition(st, v, Phase::replanning,
               "step " + bad->step_id + " infeasible: " + bad->precondition.to_string());
    return v;
  }
  for (auto& [step_id, timer] : st.wait_timers) {
    if (st.status[step_id] == StepStatus::done || timer <= sc.executive.wait_timeout) continue;
    const auto& agent = plan.steps[plan.index_of(step_id)].agent;
    const int ignored = ++st.request_counts[agent];
    if (ignored >= sc.executive.max_ignored) {
      st.disengaged.insert(agent);
      NegotiationConstraints solo;
      solo.must_not_do.insert({agent, "*"});
      st.negotiation->add_constraints(solo);
      transition(st, v, Phase::replanning, agent + " disengaged after " + std::to_string(ignored) + " ignored requests");
    } else {
      transition(st, v, Phase::replanning, "timeout waiting for " + agent + " on " + step_id);
    }
    return v;
  }

  const auto eligible = eligible_steps(plan, st.status);
  const auto digest = make_digest(plan, st.status);

  // (2)-(3) communication, one human at a time in id order
  for (const auto& [id, kind] : kinds) {
    if (kind != AgentKind::human || st.disengaged.contains(id)) continue;
    auto mental = in.mentals->at(id);
    if (has_human_role(plan, id) && mental.plan_aware != plan.id) {
      if (!st.awaiting.contains(id)) {
        v.comm.push_back(proposal(sc, plan, id, in.tick));
        st.awaiting.insert(id);
      }
      continue;
    }
    bool informed = false;
    auto pending_relevant = [&](const AgentMentalState& m) {
      std::vector<Divergence> out;
      for (auto& d : divergences(*in.facts, &digest, m))
        if (d.relevant && d.actual && d.actual->predicate.kind != PredKind::isAwareOf) out.push_back(std::move(d));
      return out;
    };
    auto divs = pending_relevant(mental);
    if (!divs.empty()) {
      auto act = CommAct::inform(sc.robot, id, *divs.front().actual, in.tick);
      mental = apply_comm(std::move(mental), act);
      v.comm.push_back(std::move(act));
      informed = true;
    }
    if (informed && !pending_relevant(mental).empty()) continue;
    for (auto j : eligible) {
      const auto& s = plan.steps[j];
      if (s.agent != id || st.requested.contains(s.id)) continue;
      if (knows_task(mental, s.task.name) == KnowHow::unknown && !st.explained.contains({id, s.task.name})) {
        v.comm.push_back(CommAct::explain(sc.robot, id, s.task.name, in.tick));
        st.explained.insert({id, s.task.name});
      }
      v.comm.push_back(CommAct::request_action(sc.robot, id, s.id, in.tick));
      st.requested.insert(s.id);
      st.wait_timers[s.id] = 0;
      st.status[s.id] = StepStatus::active;
      break;
    }
  }

  // (4) robot dispatch
  for (auto j : eligible) {
    const auto& s = plan.steps[j];
    if (s.agent != sc.robot) continue;
    if (!holds_all(s.pre, state)) break;  // wait for the world to catch up
    st.status[s.id] = StepStatus::active;
    PrimitiveAction cmd;
    if (s.skill.kind == "handover") {
      if (st.handover_step != s.id) {
        st.handover = HandoverState{};
        st.handover_step = s.id;
      }
      const auto partner = skill_arg(s, "partner");
      EngagementBelief belief = kUniformEngagement;
      if (in.engagement)
        if (auto it = in.engagement->find(partner); it != in.engagement->end()) belief = it->second;
      auto d = handover_step(*st.handover, sc.engagement, *in.world, sc.robot, partner,
                             skill_arg(s, "object"), belief, in.tick);
      if (st.handover->phase == HandoverState::Phase::aborted) {
        if (st.handover->abort_reason == "PARTNER_DISENGAGED") {
          st.disengaged.insert(partner);
          NegotiationConstraints solo;
          solo.must_not_do.insert({partner, "*"});
          st.negotiation->add_constraints(solo);
        }
        transition(st, v, Phase::replanning, "handover " + s.id + " aborted: " + st.handover->abort_reason);
        return v;
      }
      if (d.signal) v.comm.push_back(*d.signal);
      cmd = d.action;
    } else {
      cmd = skill_action(*in.world, sc.robot, s.skill);
    }
    if (sc.executive.safety) {
      static const std::set<std::string> kNone;
      const auto verdict = safety_gate(*in.world, sc.robot, cmd, in.human_workspaces ? *in.human_workspaces : kNone);
      if (verdict.hold) {
        v.safety_hold = true;
        ++st.safety_holds;
        cmd = PrimitiveAction::wait();
      }
    }
    v.robot_command = cmd;
    break;
  }
  return v;
}

}  // namespace coact
