#include "coact/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace coact {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ScenarioError(path + ": " + msg);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(join(path, key), "is required");
  return *it;
}

template <typename T>
T as(const json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    fail(path, std::string("has the wrong type (") + j.type_name() + ")");
  }
}

template <typename T>
T get_or(const json& j, const std::string& key, const std::string& path, T fallback) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return as<T>(*it, join(path, key));
}

const json& array_at(const json& j, const std::string& key, const std::string& path) {
  static const json empty = json::array();
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) return empty;
  if (!it->is_array()) fail(join(path, key), "expected an array");
  return *it;
}

Cell parse_cell(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    fail(path, "expected [x, y]");
  return Cell{j[0].get<int>(), j[1].get<int>()};
}

std::vector<Literal> parse_literals(const json& arr, const std::string& path) {
  std::vector<Literal> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    try {
      out.push_back(Literal::parse(as<std::string>(arr[i], index(path, i))));
    } catch (const std::invalid_argument& e) {
      fail(index(path, i), e.what());
    }
  }
  return out;
}

std::vector<Atom> parse_atoms(const json& arr, const std::string& path) {
  std::vector<Atom> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    try {
      out.push_back(Atom::parse(as<std::string>(arr[i], index(path, i))));
    } catch (const std::invalid_argument& e) {
      fail(index(path, i), e.what());
    }
  }
  return out;
}

std::vector<std::string> string_list(const json& j, const std::string& key, const std::string& path) {
  std::vector<std::string> out;
  const auto& arr = array_at(j, key, path);
  for (std::size_t i = 0; i < arr.size(); ++i)
    out.push_back(as<std::string>(arr[i], index(join(path, key), i)));
  return out;
}

GridWorld parse_grid(const json& doc, std::map<std::string, std::vector<std::string>>& props) {
  const auto& grid = require(doc, "grid", "");
  const auto& rows_j = require(grid, "rows", "grid");
  if (!rows_j.is_array() || rows_j.empty()) fail("grid.rows", "expected a non-empty array of strings");
  std::vector<std::string> rows;
  for (std::size_t i = 0; i < rows_j.size(); ++i) rows.push_back(as<std::string>(rows_j[i], index("grid.rows", i)));
  const int w = static_cast<int>(rows.front().size());
  const int h = static_cast<int>(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (static_cast<int>(rows[i].size()) != w) fail(index("grid.rows", i), "row width differs from row 0");

  std::map<char, CellInfo> legend;
  legend['#'] = CellInfo{true, "WORLD", "", ""};
  legend['.'] = CellInfo{false, "WORLD", "", ""};
  if (auto it = grid.find("legend"); it != grid.end()) {
    if (!it->is_object()) fail("grid.legend", "expected an object");
    for (const auto& [key, val] : it->items()) {
      const std::string p = "grid.legend." + key;
      if (key.size() != 1) fail(p, "legend keys are single characters");
      CellInfo ci;
      ci.blocking = get_or<bool>(val, "wall", p, false);
      ci.room = get_or<std::string>(val, "room", p, "WORLD");
      ci.surface = get_or<std::string>(val, "surface", p, "");
      ci.workspace = get_or<std::string>(val, "workspace", p, "");
      legend[key[0]] = ci;
    }
  }
  std::vector<CellInfo> cells;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const char c = rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)];
      auto it = legend.find(c);
      if (it == legend.end())
        fail(index("grid.rows", static_cast<std::size_t>(y)),
             std::string("unknown legend character '") + c + "' at column " + std::to_string(x));
      cells.push_back(it->second);
    }
  GridWorld world(w, h, std::move(cells));
  if (auto it = doc.find("props"); it != doc.end()) {
    if (!it->is_object()) fail("props", "expected an object");
    for (const auto& [name, vals] : it->items()) {
      auto values = as<std::vector<std::string>>(vals, "props." + name);
      props[name] = values;
      world.declare_prop(name, values);
    }
  }
  return world;
}

void parse_entities(const json& doc, GridWorld& world, EntityId& robot) {
  const auto& ents = require(doc, "entities", "");
  if (!ents.is_array()) fail("entities", "expected an array");
  std::vector<std::pair<std::size_t, std::string>> held;  // entity index, holder
  for (std::size_t i = 0; i < ents.size(); ++i) {
    const auto& e = ents[i];
    const std::string p = index("entities", i);
    const auto id = as<std::string>(require(e, "id", p), join(p, "id"));
    if (id.empty()) fail(join(p, "id"), "must not be empty");
    if (world.is_surface(id) || world.is_room(id)) fail(join(p, "id"), "'" + id + "' is already a room or surface");
    const auto kind = as<std::string>(require(e, "kind", p), join(p, "kind"));
    try {
      if (kind == "robot" || kind == "human") {
        Agent a;
        a.id = id;
        a.kind = kind == "robot" ? AgentKind::robot : AgentKind::human;
        a.position = parse_cell(require(e, "at", p), join(p, "at"));
        if (!world.in_bounds(a.position)) fail(join(p, "at"), "is outside the grid");
        auto hd = parse_heading(get_or<std::string>(e, "heading", p, "N"));
        if (!hd) fail(join(p, "heading"), "is not a heading");
        a.heading = *hd;
        a.reach_radius = get_or<int>(e, "reach", p, 1);
        a.view_range = get_or<int>(e, "view_range", p, 6);
        a.view_half_angle = get_or<double>(e, "view_half_angle", p, 60.0);
        if (a.kind == AgentKind::robot) {
          if (!robot.empty()) fail(join(p, "kind"), "a scenario has exactly one robot");
          robot = id;
        }
        world.add_agent(std::move(a));
      } else if (kind == "object") {
        Obj o;
        o.id = id;
        o.type_label = get_or<std::string>(e, "type", p, id);
        if (auto it = e.find("props"); it != e.end())
          o.props = as<std::map<std::string, std::string>>(*it, join(p, "props"));
        if (auto it = e.find("held_by"); it != e.end()) {
          o.placement.kind = Placement::Kind::held_by;
          o.placement.holder = as<std::string>(*it, join(p, "held_by"));
          held.emplace_back(i, o.placement.holder);
        } else {
          o.placement.cell = parse_cell(require(e, "at", p), join(p, "at"));
          if (!world.in_bounds(o.placement.cell)) fail(join(p, "at"), "is outside the grid");
          o.placement.kind = world.cell(o.placement.cell).is_surface() ? Placement::Kind::on_surface
                                                                       : Placement::Kind::cell;
        }
        world.add_object(std::move(o));
      } else {
        fail(join(p, "kind"), "must be robot, human or object");
      }
    } catch (const WorldError& err) {
      fail(p, err.what());
    }
  }
  for (const auto& [i, holder] : held) {
    const std::string p = index("entities", i) + ".held_by";
    if (!world.is_agent(holder)) fail(p, "'" + holder + "' is not an agent");
    Agent& a = world.agent_mut(holder);
    if (a.holding) fail(p, "'" + holder + "' already holds an object");
    a.holding = as<std::string>(ents[i]["id"], p);
  }
  if (robot.empty()) fail("entities", "a scenario needs one robot");
  try {
    world.check_invariants();
  } catch (const WorldError& err) {
    fail("entities", err.what());
  }
}

AgentReq parse_agent_req(const std::string& s, const std::string& path) {
  if (s == "any") return AgentReq::any;
  if (s == "robot") return AgentReq::robot;
  if (s == "human") return AgentReq::human;
  fail(path, "must be any, robot or human");
}

HtnDomain parse_htn(const json& j, const std::string& path) {
  HtnDomain d;
  d.depth_bound = get_or<std::size_t>(j, "depth_bound", path, 50);
  const auto& tasks = array_at(j, "tasks", path);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto p = index(join(path, "tasks"), i);
    d.tasks.push_back({as<std::string>(require(tasks[i], "name", p), join(p, "name")),
                       string_list(tasks[i], "params", p)});
  }
  const auto& ops = array_at(j, "operators", path);
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const auto& o = ops[i];
    const auto p = index(join(path, "operators"), i);
    Operator op;
    op.name = as<std::string>(require(o, "name", p), join(p, "name"));
    op.params = string_list(o, "params", p);
    op.agent = parse_agent_req(get_or<std::string>(o, "agent", p, "any"), join(p, "agent"));
    op.pre = parse_literals(array_at(o, "pre", p), join(p, "pre"));
    op.add = parse_literals(array_at(o, "add", p), join(p, "add"));
    op.del = parse_literals(array_at(o, "del", p), join(p, "del"));
    for (const auto* eff : {&op.add, &op.del})
      for (const auto& l : *eff)
        if (l.negated) fail(join(p, "add"), "effects cannot be negated");
    if (auto it = o.find("cost"); it != o.end()) {
      if (it->is_number()) {
        op.cost_robot = op.cost_human = it->get<double>();
      } else {
        op.cost_robot = get_or<double>(*it, "robot", join(p, "cost"), 1.0);
        op.cost_human = get_or<double>(*it, "human", join(p, "cost"), 1.0);
      }
    }
    if (auto it = o.find("skill"); it != o.end()) {
      if (!it->is_object()) fail(join(p, "skill"), "expected an object");
      for (const auto& [k, v] : it->items()) {
        if (k == "kind") op.skill.kind = as<std::string>(v, join(p, "skill.kind"));
        else op.skill.args[k] = as<std::string>(v, join(p, "skill." + k));
      }
    }
    if (op.skill.kind.empty()) op.skill.kind = "none";
    d.operators.push_back(std::move(op));
  }
  const auto& methods = array_at(j, "methods", path);
  for (std::size_t i = 0; i < methods.size(); ++i) {
    const auto& m = methods[i];
    const auto p = index(join(path, "methods"), i);
    Method me;
    me.name = get_or<std::string>(m, "name", p, "m" + std::to_string(i));
    me.task = as<std::string>(require(m, "task", p), join(p, "task"));
    me.params = string_list(m, "params", p);
    me.pre = parse_literals(array_at(m, "pre", p), join(p, "pre"));
    const auto subs = string_list(m, "subtasks", p);
    for (std::size_t k = 0; k < subs.size(); ++k) {
      try {
        me.subtasks.push_back(parse_task_call(subs[k]));
      } catch (const std::invalid_argument& e) {
        fail(index(join(p, "subtasks"), k), e.what());
      }
    }
    const auto order_it = m.find("order");
    if (order_it == m.end() || (order_it->is_string() && *order_it == "sequential")) {
      for (std::size_t k = 1; k < me.subtasks.size(); ++k) me.order.emplace_back(k - 1, k);
    } else if (order_it->is_string() && *order_it == "unordered") {
    } else if (order_it->is_array()) {
      me.order = as<std::vector<std::pair<std::size_t, std::size_t>>>(*order_it, join(p, "order"));
    } else {
      fail(join(p, "order"), "must be \"sequential\", \"unordered\" or a list of [before, after]");
    }
    d.methods.push_back(std::move(me));
  }
  try {
    d.validate();
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  return d;
}

IntentionSpec parse_intentions(const json& j, const std::string& path) {
  IntentionSpec spec;
  auto& m = spec.model;
  m.observed_agent = as<std::string>(require(j, "observed", path), join(path, "observed"));
  m.beta = get_or<double>(j, "beta", path, 5.0);
  m.threshold = get_or<double>(j, "threshold", path, 0.8);
  m.context = get_or<std::string>(j, "context", path, "default");
  m.actions = string_list(j, "actions", path);
  if (auto it = j.find("action_map"); it != j.end())
    m.action_map = as<std::map<std::string, std::string>>(*it, join(path, "action_map"));
  if (auto it = j.find("prior"); it != j.end())
    m.prior = as<std::map<std::string, std::map<std::string, double>>>(*it, join(path, "prior"));
  if (auto it = j.find("confusion"); it != j.end())
    m.confusion = as<std::vector<std::vector<double>>>(*it, join(path, "confusion"));
  if (auto it = j.find("capability"); it != j.end())
    spec.capability = as<std::map<std::string, bool>>(*it, join(path, "capability"));
  const auto& goals = array_at(j, "goals", path);
  for (std::size_t i = 0; i < goals.size(); ++i) {
    const auto& g = goals[i];
    const auto p = index(join(path, "goals"), i);
    IntentionGoal ig;
    ig.id = as<std::string>(require(g, "id", p), join(p, "id"));
    ig.goal_ref = get_or<std::string>(g, "goal", p, "");
    std::vector<std::string> names;
    const auto& states = array_at(g, "states", p);
    for (std::size_t s = 0; s < states.size(); ++s) {
      const auto sp = index(join(p, "states"), s);
      names.push_back(as<std::string>(require(states[s], "id", sp), join(sp, "id")));
      std::vector<Fact> conj;
      for (const auto& a : parse_atoms(array_at(states[s], "facts", sp), join(sp, "facts")))
        conj.push_back(a.to_fact());
      ig.abstraction.push_back(std::move(conj));
    }
    ig.mdp = Mdp::with_states(names, m.actions);
    ig.mdp.step_cost = get_or<double>(g, "step_cost", p, 0.04);
    ig.mdp.gamma = get_or<double>(g, "gamma", p, 0.95);
    ig.mdp.goal_reward = get_or<double>(g, "goal_reward", p, 1.0);
    std::map<std::pair<std::size_t, std::size_t>, std::vector<Transition>> rows;
    const auto& trans = array_at(g, "transitions", p);
    try {
      for (std::size_t t = 0; t < trans.size(); ++t) {
        const auto tp = index(join(p, "transitions"), t);
        const auto& tr = trans[t];
        if (!tr.is_array() || tr.size() < 3 || tr.size() > 4) fail(tp, "expected [from, action, to(, prob)]");
        const auto from = ig.mdp.state_index(as<std::string>(tr[0], tp));
        const auto act = ig.mdp.action_index(as<std::string>(tr[1], tp));
        const auto to = ig.mdp.state_index(as<std::string>(tr[2], tp));
        rows[{from, act}].push_back({to, tr.size() == 4 ? as<double>(tr[3], tp) : 1.0});
      }
      for (auto& [key, row] : rows) ig.mdp.transitions[key.first][key.second] = row;
      for (const auto& gs : string_list(g, "goal_states", p)) ig.mdp.mark_goal(ig.mdp.state_index(gs));
    } catch (const MdpError& e) {
      fail(p, e.what());
    }
    m.goals.push_back(std::move(ig));
  }
  try {
    m.solve();
  } catch (const MdpError& e) {
    fail(path, e.what());
  }
  return spec;
}

std::size_t line_of(const std::string& text, std::size_t byte, std::size_t& column) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  column = col;
  return line;
}

}  // namespace

TaskCall parse_task_call(const std::string& text) {
  TaskCall call;
  const auto open = text.find('(');
  if (open == std::string::npos) {
    call.name = text;
  } else {
    if (text.back() != ')') throw std::invalid_argument("malformed task call '" + text + "'");
    call.name = text.substr(0, open);
    std::string inner = text.substr(open + 1, text.size() - open - 2);
    std::stringstream ss(inner);
    std::string arg;
    while (std::getline(ss, arg, ',')) {
      arg.erase(0, arg.find_first_not_of(' '));
      arg.erase(arg.find_last_not_of(' ') + 1);
      if (arg.empty()) throw std::invalid_argument("empty argument in '" + text + "'");
      call.args.push_back(arg);
    }
  }
  while (!call.name.empty() && call.name.back() == ' ') call.name.pop_back();
  if (call.name.empty()) throw std::invalid_argument("task call without a name");
  return call;
}

const GoalSpec& Scenario::goal(const std::string& id) const {
  for (const auto& g : goals)
    if (g.id == id) return g;
  throw ScenarioError("unknown goal '" + id + "'");
}

std::vector<EntityId> Scenario::human_ids() const {
  std::vector<EntityId> out;
  for (const auto& [id, a] : world.agents())
    if (a.kind == AgentKind::human) out.push_back(id);
  return out;
}

Scenario load_scenario(const json& doc) {
  if (!doc.is_object()) fail("(root)", "expected an object");
  Scenario sc;
  sc.source = doc;
  sc.name = get_or<std::string>(doc, "name", "", "unnamed");
  std::map<std::string, std::vector<std::string>> props;
  sc.world = parse_grid(doc, props);
  parse_entities(doc, sc.world, sc.robot);
  sc.seed = get_or<std::uint64_t>(doc, "seed", "", 1);
  sc.max_ticks = get_or<int>(doc, "max_ticks", "", 400);

  const json empty = json::object();
  const auto dit = doc.find("domain");
  const json& domain = dit == doc.end() ? empty : *dit;
  if (!domain.is_object()) fail("domain", "expected an object");
  sc.htn = parse_htn(domain.contains("htn") ? domain["htn"] : empty, "domain.htn");
  for (const auto& a : parse_atoms(array_at(domain, "static_facts", "domain"), "domain.static_facts"))
    sc.static_facts.insert(a);
  if (auto it = domain.find("knowledge"); it != domain.end()) {
    for (const auto& [agent, tasks] : it->items()) {
      if (!sc.world.is_agent(agent)) fail("domain.knowledge." + agent, "is not an agent");
      for (const auto& [task, v] : tasks.items()) {
        const auto s = as<std::string>(v, "domain.knowledge." + agent + "." + task);
        if (s != "known" && s != "unknown")
          fail("domain.knowledge." + agent + "." + task, "must be known or unknown");
        sc.knowledge[agent][task] = s == "known" ? KnowHow::known : KnowHow::unknown;
      }
    }
  }
  if (auto it = domain.find("policy"); it != domain.end()) {
    const auto mode = get_or<std::string>(*it, "mode", "domain.policy", "EFFICIENT");
    auto m = parse_policy_mode(mode);
    if (!m) fail("domain.policy.mode", "must be EFFICIENT, TEACH or BALANCED");
    sc.policy.mode = *m;
    sc.policy.lambda = get_or<double>(*it, "lambda", "domain.policy", 0.5);
    sc.policy.mu = get_or<double>(*it, "mu", "domain.policy", 1.0);
  }
  if (auto it = domain.find("executive"); it != domain.end()) {
    sc.executive.wait_timeout = get_or<int>(*it, "wait_timeout", "domain.executive", 20);
    sc.executive.max_ignored = get_or<int>(*it, "max_ignored", "domain.executive", 2);
    sc.executive.safety = get_or<bool>(*it, "safety", "domain.executive", true);
  }
  if (auto it = domain.find("engagement"); it != domain.end()) {
    auto& e = sc.engagement;
    const std::string p = "domain.engagement";
    e.stickiness = get_or<double>(*it, "stickiness", p, e.stickiness);
    e.engaged_threshold = get_or<double>(*it, "engaged_threshold", p, e.engaged_threshold);
    e.disengaged_threshold = get_or<double>(*it, "disengaged_threshold", p, e.disengaged_threshold);
    e.abort_ticks = get_or<int>(*it, "abort_ticks", p, e.abort_ticks);
    e.signal_period = get_or<int>(*it, "signal_period", p, e.signal_period);
    if (auto l = it->find("likelihood"); l != it->end()) {
      const char* rows[] = {"engaged", "distracted", "disengaged"};
      for (int r = 0; r < 3; ++r) {
        const auto rp = p + ".likelihood." + rows[r];
        if (l->contains(rows[r])) {
          auto v = as<std::vector<double>>((*l)[rows[r]], rp);
          if (v.size() != 4) fail(rp, "needs four cue likelihoods");
          std::copy(v.begin(), v.end(), e.likelihood[static_cast<std::size_t>(r)].begin());
        }
      }
    }
  }
  if (auto it = domain.find("intentions"); it != domain.end() && !it->empty())
    sc.intentions = parse_intentions(*it, "domain.intentions");

  const auto& goals = array_at(doc, "goals", "");
  for (std::size_t i = 0; i < goals.size(); ++i) {
    const auto p = index("goals", i);
    GoalSpec g;
    g.id = get_or<std::string>(goals[i], "id", p, "G" + std::to_string(i + 1));
    g.task.name = as<std::string>(require(goals[i], "task", p), join(p, "task"));
    g.task.args = string_list(goals[i], "args", p);
    g.condition = parse_atoms(array_at(goals[i], "condition", p), join(p, "condition"));
    if (!sc.htn.is_compound(g.task.name) && !sc.htn.find_operator(g.task.name))
      fail(join(p, "task"), "'" + g.task.name + "' is not a task of the domain");
    sc.goals.push_back(std::move(g));
  }
  if (sc.goals.empty() && !sc.intentions) fail("goals", "a scenario needs a goal or declared intentions");
  if (sc.intentions)
    for (const auto& ig : sc.intentions->model.goals)
      if (!ig.goal_ref.empty() &&
          std::none_of(sc.goals.begin(), sc.goals.end(), [&](const GoalSpec& g) { return g.id == ig.goal_ref; }))
        fail("domain.intentions", "intention '" + ig.id + "' refers to unknown goal '" + ig.goal_ref + "'");

  const auto humans_ids = sc.human_ids();
  if (auto it = doc.find("humans"); it != doc.end()) {
    if (!it->is_object()) fail("humans", "expected an object");
    for (const auto& [id, h] : it->items()) {
      const std::string p = "humans." + id;
      if (!sc.world.is_agent(id) || sc.world.agent(id).kind != AgentKind::human)
        fail(p, "is not a human entity");
      HumanSpec spec;
      spec.id = id;
      spec.policy = get_or<std::string>(h, "policy", p, "Cooperative");
      static const std::set<std::string> kPolicies{"Cooperative", "Distracted", "Reluctant", "Scripted",
                                                   "Interactive"};
      if (!kPolicies.contains(spec.policy)) fail(join(p, "policy"), "unknown policy '" + spec.policy + "'");
      spec.seed = get_or<std::uint64_t>(h, "seed", p, 0);
      spec.p = get_or<double>(h, "p", p, 0.3);
      if (spec.p < 0.0 || spec.p > 1.0) fail(join(p, "p"), "must lie in [0, 1]");
      spec.refuse = string_list(h, "refuse", p);
      const auto script = string_list(h, "script", p);
      for (std::size_t k = 0; k < script.size(); ++k) {
        try {
          spec.script.push_back(PrimitiveAction::parse(script[k]));
        } catch (const std::exception& e) {
          fail(index(join(p, "script"), k), e.what());
        }
      }
      if (spec.policy == "Distracted")
        sc.world.agent_mut(id).view_range = get_or<int>(h, "view_range", p, 3);
      sc.humans[id] = std::move(spec);
    }
  }
  for (const auto& id : humans_ids)
    if (!sc.humans.contains(id)) sc.humans[id] = HumanSpec{id};
  return sc;
}

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t col = 0;
    const auto line = line_of(text, e.byte == 0 ? 0 : e.byte - 1, col);
    throw ScenarioError("line " + std::to_string(line) + ", column " + std::to_string(col) +
                        ": invalid JSON");
  }
}

Scenario load_scenario_text(const std::string& text) { return load_scenario(parse_json_text(text)); }

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return load_scenario_text(ss.str());
  } catch (const ScenarioError& e) {
    throw ScenarioError(path.filename().string() + ": " + e.what());
  }
}

json apply_overrides(json doc, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw ScenarioError("override '" + o + "' is not path=value");
    std::string path = o.substr(0, eq);
    if (path.front() != '/') path = "/" + path;
    const std::string raw = o.substr(eq + 1);
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::parse_error&) {
      value = raw;
    }
    try {
      doc[json::json_pointer(path)] = value;
    } catch (const json::exception& e) {
      throw ScenarioError("override '" + o + "': " + e.what());
    }
  }
  return doc;
}

}  // namespace coact
