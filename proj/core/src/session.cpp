#include "coact/session.hpp"

#include <algorithm>

namespace coact {

namespace {

std::vector<std::string> fact_strings(const std::vector<Fact>& facts) {
  std::vector<std::string> out;
  out.reserve(facts.size());
  for (const auto& f : facts) out.push_back(f.to_string());
  return out;
}

}  // namespace

Session::Session(Scenario scenario, SessionOptions options, DriverMap drivers)
    : scenario_(std::move(scenario)),
      seed_(options.seed.value_or(scenario_.seed)),
      max_ticks_(options.max_ticks.value_or(scenario_.max_ticks)),
      world_(scenario_.world) {
  facts_ = assess(world_);
  for (const auto& id : scenario_.human_ids()) {
    std::map<std::string, KnowHow> know;
    if (auto it = scenario_.knowledge.find(id); it != scenario_.knowledge.end()) know = it->second;
    mentals_.emplace(id, make_mental_state(id, world_, facts_, know));
    std::shared_ptr<HumanDriver> driver;
    if (auto it = drivers.find(id); it != drivers.end()) driver = it->second;
    policies_.emplace(id, make_human_policy(scenario_, scenario_.humans.at(id), seed_, driver));
    inboxes_[id];
    engagement_[id] = kUniformEngagement;
  }

  TickRecord rec;
  rec.tick = world_.tick();
  rec.facts_added = facts_.strings();
  const std::vector<Event> no_events;
  const std::vector<StepUpdate> no_updates;
  const std::vector<CommAct> no_comm;
  const std::set<std::string> no_ws;
  ExecutiveInput in{world_.tick(), &world_, &facts_, &mentals_, &no_events, &no_updates, &no_comm, &engagement_, &no_ws};
  MonitorVerdict verdict;
  verdict.robot_command = PrimitiveAction::wait();
  if (scenario_.intentions) {
    exec_.phase = Phase::observing;
    exec_.posterior = initial_posterior(scenario_.intentions->model, scenario_.intentions->model.context);
    verdict = tick_executive(exec_, scenario_, in);
  } else {
    verdict = start_goal(exec_, scenario_, scenario_.goals.front().id, in);
    verdict.robot_command = PrimitiveAction::wait();
  }
  robot_next_ = verdict.robot_command;
  deliver(verdict, rec);
  rec.phase = exec_.phase;
  rec.transition = verdict.transition;
  rec.posterior = exec_.posterior;
  rec.engagement = engagement_;
  rec.goal = exec_.goal_id;
  rec.plan_id = exec_.plan ? exec_.plan->id : std::string{};
  for (const auto& [id, m] : mentals_) rec.beliefs[id] = m.beliefs.strings();
  records_.push_back(std::move(rec));
}

bool Session::finished() const noexcept { return exec_.terminal() || world_.tick() >= max_ticks_; }

void Session::deliver(const MonitorVerdict& verdict, TickRecord& rec) {
  if (verdict.previous_plan && exec_.plan)
    for (const auto& id : verdict.keep_awareness)
      mentals_[id] = remap_plan_awareness(std::move(mentals_[id]), *verdict.previous_plan, *exec_.plan);
  for (const auto& act : verdict.comm) {
    rec.comm.push_back(act);
    auto m = mentals_.find(act.addressee);
    if (m == mentals_.end()) continue;
    m->second = apply_comm(std::move(m->second), act);
    inboxes_[act.addressee].push_back(act);
    if (act.kind == CommKind::Inform && act.sender == scenario_.robot && act.fact) {
      ++divergences_detected_;
      if (m->second.beliefs.contains(*act.fact)) ++divergences_resolved_;
    }
  }
  rec.safety_hold = rec.safety_hold || verdict.safety_hold;
}

const TickRecord& Session::step() {
  if (finished()) throw std::logic_error("session already finished");
  TickRecord rec;
  const EntityId& robot = scenario_.robot;

  ActionMap actions;
  actions[robot] = robot_next_;
  std::vector<CommAct> to_robot;
  for (auto& [id, policy] : policies_) {
    HumanView view{&world_, &mentals_.at(id), &inboxes_.at(id), id, robot, world_.tick()};
    HumanDecision d = policy->decide(view);
    inboxes_.at(id).clear();
    actions[id] = d.action;
    if (policy->name() == "Interactive") rec.inputs[id] = d;
    for (auto& act : d.comm) {
      act.sender = id;
      act.tick = world_.tick();
      rec.comm.push_back(act);
      if (act.addressee == robot) to_robot.push_back(act);
    }
  }

  // Actions are scored in the state the observed agent believed when choosing them.
  std::optional<FactBase> believed_before;
  if (exec_.phase == Phase::observing && scenario_.intentions) {
    const auto& who = scenario_.intentions->model.observed_agent;
    believed_before = mentals_.count(who) ? mentals_.at(who).beliefs.as_fact_base(world_.tick()) : facts_;
  }

  if (scenario_.executive.safety) {
    std::map<EntityId, PrimitiveAction> human_actions;
    for (const auto& [id, a] : actions)
      if (id != robot) human_actions.emplace(id, a);
    if (safety_gate(world_, robot, actions[robot], last_human_ws_, &human_actions).hold) {
      actions[robot] = PrimitiveAction::wait();
      rec.safety_hold = true;
    }
  }

  const GridWorld before = world_;
  StepResult result = coact::step(world_, actions);
  std::set<std::string> human_ws;
  for (const auto& e : result.events) {
    std::string ws;
    if (e.action.is_manipulation())
      if (auto c = manipulation_target(before, e.actor, e.action)) ws = workspace_key(before, *c);
    if (e.succeeded() && !ws.empty() && before.agent(e.actor).kind == AgentKind::human) human_ws.insert(ws);
    if (e.succeeded() && e.action.kind != ActionKind::Wait) ++action_counts_[e.actor];
    if (e.action.kind == ActionKind::Wait && before.agent(e.actor).kind == AgentKind::human) ++human_idle_ticks_;
    rec.event_workspaces.push_back(ws);
  }
  last_human_ws_ = human_ws;
  world_ = std::move(result.world);
  rec.events = std::move(result.events);
  rec.tick = world_.tick();

  history_.push_back(before);
  while (history_.size() + 1 > kMotionWindow) history_.pop_front();
  const std::vector<GridWorld> hist(history_.begin(), history_.end());
  FactBase facts = assess(world_, hist);
  const FactDiff d = diff(facts_, facts);
  rec.facts_added = fact_strings(d.added);
  rec.facts_removed = fact_strings(d.removed);
  facts_ = std::move(facts);

  std::vector<StepUpdate> updates;
  if (exec_.plan) updates = match_step_events(*exec_.plan, exec_.status, rec.events, world_);
  for (auto& [id, m] : mentals_) m = perceive_update(std::move(m), world_, facts_, updates);

  for (auto& [id, belief] : engagement_)
    belief = engagement_update(scenario_.engagement, belief, observe_cue(before, world_, facts_, id, robot));

  if (believed_before) {
    const auto& model = scenario_.intentions->model;
    for (const auto& e : rec.events) {
      if (e.actor != model.observed_agent) continue;
      if (auto a = model.map_action(e.action.to_string()))
        exec_.posterior = observe_action(model, exec_.posterior, *a, *believed_before).posterior;
    }
  }

  ExecutiveInput in{world_.tick(), &world_, &facts_, &mentals_, &rec.events, &updates, &to_robot, &engagement_, &human_ws};
  MonitorVerdict verdict = tick_executive(exec_, scenario_, in);
  robot_next_ = verdict.robot_command;
  deliver(verdict, rec);

  rec.phase = exec_.phase;
  rec.transition = verdict.transition;
  rec.posterior = exec_.posterior;
  rec.engagement = engagement_;
  rec.goal = exec_.goal_id;
  rec.plan_id = exec_.plan ? exec_.plan->id : std::string{};
  for (const auto& [id, m] : mentals_) rec.beliefs[id] = m.beliefs.strings();
  records_.push_back(std::move(rec));
  return records_.back();
}

RunReport Session::run() {
  while (!finished()) step();
  return report();
}

RunReport Session::report() const {
  RunReport r;
  r.scenario = scenario_.name;
  r.goal = exec_.goal_id;
  r.ticks = world_.tick();
  r.goal_achieved = exec_.phase == Phase::achieved;
  if (exec_.phase == Phase::achieved) {
    r.outcome = "achieved";
  } else if (exec_.phase == Phase::aborted) {
    r.outcome = "aborted";
    r.abort_reason = exec_.reason;
  } else if (finished()) {
    r.outcome = "timeout";
    r.abort_reason = "TIMEOUT";
  } else {
    r.outcome = "running";
  }
  for (const auto& rec : records_)
    for (const auto& act : rec.comm) ++r.comm_counts[std::string(to_string(act.kind))];
  r.replans = exec_.replans;
  r.divergences_detected = divergences_detected_;
  r.divergences_resolved = divergences_resolved_;
  r.human_idle_ticks = human_idle_ticks_;
  r.safety_holds = static_cast<int>(
      std::count_if(records_.begin(), records_.end(), [](const TickRecord& rec) { return rec.safety_hold; }));
  r.plan_ids = exec_.plan_ids;
  r.final_facts = facts_.strings();
  r.actions = action_counts_;
  return r;
}

std::vector<std::string> safety_violations(const TickRecord& record, const GridWorld& initial) {
  std::set<std::string> robot_ws, human_ws;
  for (std::size_t i = 0; i < record.events.size(); ++i) {
    const auto& e = record.events[i];
    const auto& ws = i < record.event_workspaces.size() ? record.event_workspaces[i] : std::string{};
    if (!e.succeeded() || ws.empty() || !initial.is_agent(e.actor)) continue;
    (initial.agent(e.actor).kind == AgentKind::robot ? robot_ws : human_ws).insert(ws);
  }
  std::vector<std::string> out;
  std::set_intersection(robot_ws.begin(), robot_ws.end(), human_ws.begin(), human_ws.end(),
                        std::back_inserter(out));
  return out;
}

}  // namespace coact
