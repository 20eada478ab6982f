#include "support/fixtures.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include "coact/executive.hpp"
#include "coact/facts.hpp"

#ifndef COACT_SCENARIO_DIR
#define COACT_SCENARIO_DIR "scenarios"
#endif

namespace coact::fixtures {

namespace {

const std::vector<std::string> kRooms{"W2", "W1", "C", "E1", "E2"};

std::vector<Literal> lits(std::initializer_list<const char*> texts) {
  std::vector<Literal> out;
  for (const auto* t : texts) out.push_back(Literal::parse(t));
  return out;
}

const std::vector<std::string> kItems{"MUG", "CUP", "PLATE"};


std::size_t shift(std::size_t room, std::size_t action) {
  if (action == 0) return room == 0 ? 0 : room - 1;
  if (action == 2) return std::min<std::size_t>(room + 1, kRooms.size() - 1);
  return room;
}

Fact is_in(const std::string& who, const std::string& room) {
  return Fact{who, Predicate::builtin(PredKind::isIn), room, 0};
}

}  // namespace

std::string scenario_path(const std::string& name) {
  return std::string(COACT_SCENARIO_DIR) + "/" + name + ".json";
}

Scenario load(const std::string& name) { return load_scenario_file(scenario_path(name)); }

nlohmann::json document(const std::string& name) { return load(name).source; }

GridWorld make_grid(const std::vector<std::string>& rows, std::map<char, CellInfo> legend) {
  legend.try_emplace('.', CellInfo{false, "ROOM", "", ""});
  std::vector<CellInfo> cells;
  for (const auto& row : rows)
    for (char c : row) cells.push_back(c == '#' ? CellInfo{true, "", "", ""} : legend.at(c));
  return GridWorld(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()), std::move(cells));
}

Agent make_agent(const EntityId& id, AgentKind kind, Cell at, Heading heading) {
  Agent a;
  a.id = id;
  a.kind = kind;
  a.position = at;
  a.heading = heading;
  return a;
}

void add_object(GridWorld& world, const EntityId& id, const std::string& type, Cell at,
                std::map<std::string, std::string> props) {
  Obj o;
  o.id = id;
  o.type_label = type;
  o.placement.kind = world.cell(at).is_surface() ? Placement::Kind::on_surface : Placement::Kind::cell;
  o.placement.cell = at;
  o.props = std::move(props);
  world.add_object(std::move(o));
}

GridWorld random_world(std::mt19937_64& rng) {
  std::vector<std::string> rows(5, std::string(5, '.'));
  std::uniform_int_distribution<int> coord(0, 4), pct(0, 99);
  for (auto& r : rows)
    for (auto& c : r) {
      const int p = pct(rng);
      c = p < 15 ? '#' : p < 25 ? 'T' : p < 60 ? '.' : 'k';
    }
  std::map<char, CellInfo> legend{{'.', {false, "LIVING", "", ""}},
                                  {'k', {false, "KITCHEN", "", ""}},
                                  {'T', {false, "KITCHEN", "TABLE_WS", "TABLE"}}};
  GridWorld w = make_grid(rows, legend);
  w.declare_prop("isFull", {"TRUE", "FALSE"});
  std::set<Cell> used;
  auto free_cell = [&](bool surface_ok) -> std::optional<Cell> {
    for (int tries = 0; tries < 100; ++tries) {
      Cell c{coord(rng), coord(rng)};
      if (used.contains(c) || w.cell(c).blocking) continue;
      if (w.cell(c).is_surface() && !surface_ok) continue;
      used.insert(c);
      return c;
    }
    return std::nullopt;
  };
  for (const auto* id : {"ALICE", "BOB", "ROBOT"})
    if (auto c = free_cell(false))
      w.add_agent(make_agent(id, id == std::string("ROBOT") ? AgentKind::robot : AgentKind::human, *c,
                             kAllHeadings[static_cast<std::size_t>(pct(rng)) % 8]));
  for (const auto* id : {"CUP", "MUG", "PLATE"})
    if (auto c = free_cell(true)) add_object(w, id, "thing", *c, {{"isFull", "FALSE"}});
  return w;
}

IntentionModel moved_mug_model() {
  IntentionModel m;
  m.observed_agent = "BOB";
  m.actions = {"west", "stay", "east"};
  m.beta = 10.0;
  m.context = "evening";

  IntentionGoal fetch;
  fetch.id = "FETCH_MUG";
  std::vector<std::string> names;
  for (const auto& mug : {std::string("W2"), std::string("E2")})
    for (const auto& r : kRooms) names.push_back(r + "_mug" + mug);
  fetch.mdp = Mdp::with_states(names, m.actions);
  for (std::size_t mug = 0; mug < 2; ++mug)
    for (std::size_t r = 0; r < kRooms.size(); ++r) {
      const std::size_t s = mug * kRooms.size() + r;
      fetch.abstraction.push_back({is_in("BOB", kRooms[r]), is_in("MUG", mug == 0 ? "W2" : "E2")});
      for (std::size_t a = 0; a < 3; ++a) fetch.mdp.set_deterministic(s, a, mug * kRooms.size() + shift(r, a));
    }
  fetch.mdp.mark_goal(0);
  fetch.mdp.mark_goal(2 * kRooms.size() - 1);

  IntentionGoal read;
  read.id = "READ";
  read.mdp = Mdp::with_states(kRooms, m.actions);
  for (std::size_t r = 0; r < kRooms.size(); ++r) {
    read.abstraction.push_back({is_in("BOB", kRooms[r])});
    for (std::size_t a = 0; a < 3; ++a) read.mdp.set_deterministic(r, a, shift(r, a));
  }
  read.mdp.mark_goal(kRooms.size() - 1);

  m.goals = {fetch, read};
  m.prior["evening"] = {{"FETCH_MUG", 0.45}, {"READ", 0.45}, {kNoIntention, 0.1}};
  m.solve();
  return m;
}

FactBase corridor_facts(const std::string& bob_room, const std::string& mug_room) {
  FactBase f;
  f.insert("BOB", Predicate::builtin(PredKind::isIn), bob_room);
  f.insert("MUG", Predicate::builtin(PredKind::isIn), mug_room);
  return f;
}

IntentionModel two_goal_corridor(double beta) {
  IntentionModel m;
  m.observed_agent = "BOB";
  m.actions = {"west", "stay", "east"};
  m.beta = beta;
  m.context = "default";
  for (const auto& [id, goal] : {std::pair<std::string, std::size_t>{"A", 4}, {"B", 0}}) {
    IntentionGoal g;
    g.id = id;
    g.mdp = Mdp::with_states(kRooms, m.actions);
    for (std::size_t r = 0; r < kRooms.size(); ++r) {
      g.abstraction.push_back({is_in("BOB", kRooms[r])});
      for (std::size_t a = 0; a < 3; ++a) g.mdp.set_deterministic(r, a, shift(r, a));
    }
    g.mdp.mark_goal(goal);
    m.goals.push_back(g);
  }
  m.prior["default"] = {{"A", 0.5}, {"B", 0.5}, {kNoIntention, 0.0}};
  m.solve();
  return m;
}

IntentionModel random_intention_model(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> goals(1, 3), acts(2, 3), states(2, 4);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  IntentionModel m;
  m.observed_agent = "H";
  const std::size_t na = acts(rng);
  for (std::size_t a = 0; a < na; ++a) m.actions.push_back("a" + std::to_string(a));
  std::uniform_real_distribution<double> beta(0.5, 8.0);
  m.beta = beta(rng);
  const std::size_t ng = goals(rng);
  for (std::size_t g = 0; g < ng; ++g) {
    IntentionGoal ig;
    ig.id = "G" + std::to_string(g);
    const std::size_t ns = states(rng);
    std::vector<std::string> names;
    for (std::size_t s = 0; s < ns; ++s) names.push_back("s" + std::to_string(s));
    ig.mdp = Mdp::with_states(names, m.actions);
    std::uniform_int_distribution<std::size_t> pick(0, ns - 1);
    for (std::size_t s = 0; s < ns; ++s)
      for (std::size_t a = 0; a < na; ++a) ig.mdp.set_deterministic(s, a, pick(rng));
    ig.mdp.mark_goal(ns - 1);
    for (std::size_t s = 0; s < ns; ++s)
      ig.abstraction.push_back({Fact{"H", Predicate::builtin(PredKind::isIn), ig.id + names[s], 0}});
    m.goals.push_back(ig);
  }
  for (const auto* ctx : {"c0", "c1"}) {
    std::map<std::string, double> p;
    double z = 0.0;
    for (const auto& g : m.goals) z += p[g.id] = u(rng);
    z += p[kNoIntention] = u(rng);
    for (auto& [k, v] : p) v /= z;
    m.prior[ctx] = p;
  }
  m.confusion.assign(na, std::vector<double>(na, 0.0));
  for (std::size_t t = 0; t < na; ++t) {
    double z = 0.0;
    for (std::size_t o = 0; o < na; ++o) z += m.confusion[o][t] = u(rng) + (o == t ? 2.0 : 0.0);
    for (std::size_t o = 0; o < na; ++o) m.confusion[o][t] /= z;
  }
  m.solve();
  return m;
}

PlanRequest request_for(const Scenario& sc, const std::string& goal_id) {
  const GoalSpec& goal = sc.goal(goal_id);
  PlanRequest r;
  r.domain = &sc.htn;
  r.initial = planning_state(assess(sc.world), sc.static_facts);
  r.goal = goal.task;
  r.goal_condition = goal.condition;
  for (const auto& [id, a] : sc.world.agents()) r.agents.push_back({id, a.kind});
  r.knowledge = sc.knowledge;
  r.policy = sc.policy;
  return r;
}

Mdp random_mdp(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> ns(2, 6), na(2, 3);
  const std::size_t n = ns(rng), m = na(rng);
  std::vector<std::string> states, actions;
  for (std::size_t i = 0; i < n; ++i) states.push_back("s" + std::to_string(i));
  for (std::size_t i = 0; i < m; ++i) actions.push_back("a" + std::to_string(i));
  Mdp mdp = Mdp::with_states(states, actions);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t a = 0; a < m; ++a) {
      const std::size_t x = pick(rng), y = pick(rng);
      const double p = u(rng);
      if (x == y) mdp.transitions[s][a] = {Transition{x, 1.0}};
      else mdp.transitions[s][a] = {Transition{x, p}, Transition{y, 1.0 - p}};
    }
  mdp.mark_goal(n - 1);
  std::uniform_real_distribution<double> cost(0.01, 0.2);
  mdp.step_cost = cost(rng);
  return mdp;
}

RandomDomain random_domain(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_items(1, 3), coin(0, 99);
  std::uniform_real_distribution<double> cost(0.5, 2.0), weight(0.0, 1.5);
  RandomDomain rd;
  HtnDomain& d = rd.domain;
  d.tasks = {{"serve", {}}, {"bring", {"?o"}}};
  d.operators.push_back(Operator{"fetch", {"?o"}, AgentReq::any, lits({"!?o isOn TABLE", "!?o isOn HIGH"}),
                                 lits({"?o isOn TABLE"}), lits({"?o isOn SHELF", "?o isOn COUNTER"}), cost(rng),
                                 cost(rng), {}});
  d.operators.push_back(Operator{"lower", {"?o"}, AgentReq::human, lits({"?o isOn HIGH"}), lits({"?o isOn COUNTER"}),
                                 lits({"?o isOn HIGH"}), cost(rng), cost(rng), {}});
  d.operators.push_back(Operator{"wipe", {}, AgentReq::any, {}, lits({"TABLE isClean TRUE"}), {}, cost(rng),
                                 cost(rng), {}});
  d.methods.push_back(Method{"done", "bring", {"?o"}, lits({"?o isOn TABLE"}), {}, {}});
  d.methods.push_back(Method{"carry", "bring", {"?o"}, lits({"!?o isOn TABLE", "!?o isOn HIGH"}),
                             {{"fetch", {"?o"}}}, {}});
  d.methods.push_back(Method{"lower_first", "bring", {"?o"}, lits({"?o isOn HIGH"}),
                             {{"lower", {"?o"}}, {"fetch", {"?o"}}}, {{0, 1}}});
  Method serve{"serve_all", "serve", {}, {}, {}, {}};
  PlanRequest& r = rd.request;
  const int n = n_items(rng);
  for (int i = 0; i < n; ++i) {
    const std::string item = kItems[static_cast<std::size_t>(i)];
    serve.subtasks.push_back({"bring", {item}});
    const int where = coin(rng);
    r.initial.insert(Atom{item, "isOn", where < 40 ? "SHELF" : where < 70 ? "COUNTER" : "HIGH"});
    r.goal_condition.push_back(Atom{item, "isOn", "TABLE"});
  }
  if (coin(rng) < 30) serve.subtasks.push_back({"wipe", {}});
  d.methods.push_back(serve);
  d.validate();
  r.goal = {"serve", {}};
  r.agents = {{"BOB", AgentKind::human}, {"ROBOT", AgentKind::robot}};
  if (coin(rng) < 60) r.knowledge["BOB"]["fetch"] = KnowHow::unknown;
  if (coin(rng) < 30) r.knowledge["BOB"]["wipe"] = KnowHow::unknown;
  const int m = coin(rng);
  r.policy.mode = m < 34 ? SocialPolicy::Mode::efficient : m < 67 ? SocialPolicy::Mode::teach
                                                                  : SocialPolicy::Mode::balanced;
  r.policy.lambda = weight(rng);
  r.policy.mu = weight(rng);
  return rd;
}

}  // namespace coact::fixtures
