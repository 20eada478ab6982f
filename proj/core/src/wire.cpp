#include "coact/wire.hpp"

#include <stdexcept>

namespace coact {

namespace {

std::optional<FailReason> parse_fail_reason(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(FailReason::TAKEN); ++i) {
    const auto r = static_cast<FailReason>(i);
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

json cell_json(Cell c) { return json::array({c.x, c.y}); }

std::string str(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? std::string{} : it->get<std::string>();
}

}  // namespace

json to_json(const Event& e) {
  json j{{"tick", e.tick}, {"actor", e.actor}, {"action", e.action.to_string()}};
  j["failure"] = e.failure ? json(std::string(to_string(*e.failure))) : json(nullptr);
  return j;
}

Event event_from_json(const json& j) {
  Event e;
  e.tick = j.at("tick").get<Tick>();
  e.actor = j.at("actor").get<std::string>();
  e.action = PrimitiveAction::parse(j.at("action").get<std::string>());
  if (auto f = j.find("failure"); f != j.end() && !f->is_null()) {
    e.failure = parse_fail_reason(f->get<std::string>());
    if (!e.failure) throw std::invalid_argument("unknown failure '" + f->get<std::string>() + "'");
  }
  return e;
}

json to_json(const NegotiationConstraints& c) {
  json j{{"must_do", json::array()}, {"must_not_do", json::array()}};
  for (const auto& t : c.must_do) j["must_do"].push_back({t.agent, t.pattern});
  for (const auto& t : c.must_not_do) j["must_not_do"].push_back({t.agent, t.pattern});
  return j;
}

NegotiationConstraints constraints_from_json(const json& j) {
  NegotiationConstraints c;
  auto read = [&](const char* key, std::set<TaskConstraint>& into) {
    auto it = j.find(key);
    if (it == j.end()) return;
    for (const auto& p : *it) {
      if (!p.is_array() || p.size() != 2) throw std::invalid_argument(std::string(key) + " entries are [agent, pattern]");
      into.insert({p[0].get<std::string>(), p[1].get<std::string>()});
    }
  };
  read("must_do", c.must_do);
  read("must_not_do", c.must_not_do);
  return c;
}

json to_json(const CommAct& act) {
  json j{{"kind", std::string(to_string(act.kind))}, {"sender", act.sender}, {"addressee", act.addressee},
         {"tick", act.tick}};
  switch (act.kind) {
    case CommKind::Inform:
      j["fact"] = act.fact ? json(act.fact->to_string()) : json(nullptr);
      break;
    case CommKind::AskFact: j["pattern"] = act.pattern; break;
    case CommKind::Answer: {
      json facts = json::array();
      for (const auto& f : act.facts) facts.push_back(f.to_string());
      j["facts"] = facts;
      break;
    }
    case CommKind::ProposePlan: {
      j["plan_id"] = act.plan_id;
      json summary = json::array();
      for (const auto& t : act.summary) summary.push_back({{"task", t.task}, {"agents", t.agents}});
      j["summary"] = summary;
      json steps = json::array();
      for (const auto& s : act.steps)
        steps.push_back({{"id", s.step_id}, {"task", s.task}, {"label", s.label}, {"args", s.args},
                         {"agent", s.agent}, {"partners", s.partners}});
      j["steps"] = steps;
      break;
    }
    case CommKind::AcceptPlan: j["plan_id"] = act.plan_id; break;
    case CommKind::RejectPlan:
      j["plan_id"] = act.plan_id;
      j["constraints"] = to_json(act.constraints);
      break;
    case CommKind::RequestAction: j["step_id"] = act.step_id; break;
    case CommKind::Explain: j["task"] = act.task_label; break;
    case CommKind::Signal:
      j["signal"] = std::string(to_string(act.signal));
      j["target"] = act.signal_target;
      break;
  }
  return j;
}

CommAct comm_from_json(const json& j) {
  CommAct act;
  const auto kind = parse_comm_kind(j.at("kind").get<std::string>());
  if (!kind) throw std::invalid_argument("unknown communicative act '" + j.at("kind").get<std::string>() + "'");
  act.kind = *kind;
  act.sender = str(j, "sender");
  act.addressee = str(j, "addressee");
  act.tick = j.value("tick", Tick{0});
  switch (act.kind) {
    case CommKind::Inform:
      if (auto f = j.find("fact"); f != j.end() && !f->is_null()) act.fact = Fact::parse(f->get<std::string>());
      break;
    case CommKind::AskFact: act.pattern = str(j, "pattern"); break;
    case CommKind::Answer:
      for (const auto& f : j.value("facts", json::array())) act.facts.push_back(Fact::parse(f.get<std::string>()));
      break;
    case CommKind::ProposePlan:
      act.plan_id = str(j, "plan_id");
      for (const auto& t : j.value("summary", json::array()))
        act.summary.push_back({t.at("task").get<std::string>(), t.at("agents").get<std::vector<std::string>>()});
      for (const auto& s : j.value("steps", json::array()))
        act.steps.push_back({s.at("id").get<std::string>(), s.at("task").get<std::string>(),
                             s.at("label").get<std::string>(), s.at("args").get<std::vector<std::string>>(),
                             s.at("agent").get<std::string>(), s.at("partners").get<std::vector<std::string>>()});
      break;
    case CommKind::AcceptPlan: act.plan_id = str(j, "plan_id"); break;
    case CommKind::RejectPlan:
      act.plan_id = str(j, "plan_id");
      if (auto c = j.find("constraints"); c != j.end()) act.constraints = constraints_from_json(*c);
      break;
    case CommKind::RequestAction: act.step_id = str(j, "step_id"); break;
    case CommKind::Explain: act.task_label = str(j, "task"); break;
    case CommKind::Signal:
      act.signal = str(j, "signal") == "PointAt" ? ActionKind::PointAt : ActionKind::LookAt;
      act.signal_target = str(j, "target");
      break;
  }
  return act;
}

json to_json(const SharedPlan& plan) {
  json steps = json::array();
  for (const auto& s : plan.steps) {
    json pre = json::array();
    for (const auto& l : s.pre) pre.push_back(l.to_string());
    steps.push_back({{"id", s.id}, {"task", s.task.to_string()}, {"agent", s.agent}, {"cost", s.base_cost},
                     {"pre", pre}, {"skill", s.skill.kind}});
  }
  json order = json::array();
  for (const auto& [a, b] : plan.ordering) order.push_back({plan.steps[a].id, plan.steps[b].id});
  json summary = json::array();
  for (const auto& t : plan.summary) summary.push_back({{"task", t.task}, {"agents", t.agents}});
  return {{"id", plan.id},
          {"steps", steps},
          {"ordering", order},
          {"summary", summary},
          {"cost", plan.cost},
          {"robot_effort", plan.robot_effort},
          {"human_effort", plan.human_effort},
          {"unknown_human_tasks", plan.unknown_human_tasks}};
}

json to_json(const HumanDecision& d) {
  json comm = json::array();
  for (const auto& c : d.comm) comm.push_back(to_json(c));
  return {{"action", d.action.to_string()}, {"comm", comm}};
}

HumanDecision decision_from_json(const json& j) {
  HumanDecision d;
  d.action = PrimitiveAction::parse(j.value("action", std::string("Wait")));
  for (const auto& c : j.value("comm", json::array())) d.comm.push_back(comm_from_json(c));
  return d;
}

json to_json(const TickRecord& rec) {
  json events = json::array();
  for (std::size_t i = 0; i < rec.events.size(); ++i) {
    json e = to_json(rec.events[i]);
    if (i < rec.event_workspaces.size() && !rec.event_workspaces[i].empty()) e["workspace"] = rec.event_workspaces[i];
    events.push_back(std::move(e));
  }
  json comm = json::array();
  for (const auto& c : rec.comm) comm.push_back(to_json(c));
  json engagement = json::object();
  for (const auto& [id, b] : rec.engagement) engagement[id] = {b[0], b[1], b[2]};
  json j{{"tick", rec.tick},
         {"events", events},
         {"facts_added", rec.facts_added},
         {"facts_removed", rec.facts_removed},
         {"comm", comm},
         {"beliefs", rec.beliefs},
         {"posterior", rec.posterior},
         {"phase", std::string(to_string(rec.phase))},
         {"engagement", engagement},
         {"safety_hold", rec.safety_hold},
         {"goal", rec.goal},
         {"plan", rec.plan_id}};
  j["transition"] = rec.transition ? json(*rec.transition) : json(nullptr);
  if (!rec.inputs.empty()) {
    json inputs = json::object();
    for (const auto& [id, d] : rec.inputs) inputs[id] = to_json(d);
    j["inputs"] = inputs;
  }
  return j;
}

json to_json(const RunReport& r) {
  json j{{"scenario", r.scenario},
         {"goal", r.goal},
         {"goal_achieved", r.goal_achieved},
         {"outcome", r.outcome},
         {"ticks", r.ticks},
         {"comm_counts", r.comm_counts},
         {"replans", r.replans},
         {"divergences_detected", r.divergences_detected},
         {"divergences_resolved", r.divergences_resolved},
         {"human_idle_ticks", r.human_idle_ticks},
         {"safety_holds", r.safety_holds},
         {"plan_ids", r.plan_ids},
         {"final_facts", r.final_facts},
         {"actions", r.actions}};
  j["abort_reason"] = r.abort_reason ? json(*r.abort_reason) : json(nullptr);
  return j;
}

json to_json(const GridWorld& w) {
  json cells = json::array();
  for (int y = 0; y < w.height(); ++y)
    for (int x = 0; x < w.width(); ++x) {
      const auto& c = w.cell({x, y});
      cells.push_back({{"blocking", c.blocking}, {"room", c.room}, {"workspace", c.workspace}, {"surface", c.surface}});
    }
  json agents = json::object();
  for (const auto& [id, a] : w.agents()) {
    agents[id] = {{"kind", std::string(to_string(a.kind))},
                  {"at", cell_json(a.position)},
                  {"heading", std::string(to_string(a.heading))},
                  {"holding", a.holding ? json(*a.holding) : json(nullptr)}};
  }
  json objects = json::object();
  for (const auto& [id, o] : w.objects()) {
    json p;
    switch (o.placement.kind) {
      case Placement::Kind::cell: p = {{"cell", cell_json(o.placement.cell)}}; break;
      case Placement::Kind::on_surface:
        p = {{"cell", cell_json(o.placement.cell)}, {"surface", w.cell(o.placement.cell).surface}};
        break;
      case Placement::Kind::held_by: p = {{"held_by", o.placement.holder}}; break;
    }
    objects[id] = {{"type", o.type_label}, {"placement", p}, {"props", o.props}};
  }
  return {{"tick", w.tick()}, {"width", w.width()}, {"height", w.height()},
          {"cells", cells},   {"agents", agents},   {"objects", objects}};
}

}  // namespace coact
