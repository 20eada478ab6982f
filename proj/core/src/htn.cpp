#include "coact/htn.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace coact {

namespace {

std::vector<std::string> split_ws(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

bool is_var(const std::string& t) { return !t.empty() && t.front() == '?'; }

bool term_matches(const std::string& pattern, const std::string& value) {
  return pattern == "*" || is_var(pattern) || pattern == value;
}

using Bindings = std::map<std::string, std::string>;

std::string subst(const std::string& term, const Bindings& b) {
  if (!is_var(term)) return term;
  auto it = b.find(term);
  return it == b.end() ? term : it->second;
}

Literal ground(const Literal& l, const Bindings& b) {
  return Literal{subst(l.subject, b), subst(l.predicate, b), subst(l.object, b), l.negated};
}

Atom ground_effect(const Literal& l, const Bindings& b, const std::string& op) {
  Literal g = ground(l, b);
  for (const auto* t : {&g.subject, &g.predicate, &g.object})
    if (is_var(*t) || *t == "*")
      throw std::invalid_argument("operator '" + op + "' effect " + l.to_string() +
                                  " has an unbound term");
  return Atom{g.subject, g.predicate, g.object};
}

bool unify(const Literal& l, const Atom& a, Bindings& b) {
  const std::pair<const std::string*, const std::string*> terms[] = {
      {&l.subject, &a.subject}, {&l.predicate, &a.predicate}, {&l.object, &a.object}};
  for (const auto& [pat, val] : terms) {
    if (*pat == "*") continue;
    if (is_var(*pat)) {
      auto it = b.find(*pat);
      if (it == b.end()) {
        b.emplace(*pat, *val);
      } else if (it->second != *val) {
        return false;
      }
    } else if (*pat != *val) {
      return false;
    }
  }
  return true;
}

/// All extensions of `b` satisfying `pre` in `state`, in deterministic order.
void satisfying(const std::vector<Literal>& pre, const AtomSet& state, const Bindings& b,
                std::vector<Bindings>& out) {
  std::vector<const Literal*> pos, neg;
  for (const auto& l : pre) (l.negated ? neg : pos).push_back(&l);
  std::function<void(std::size_t, const Bindings&)> rec = [&](std::size_t i, const Bindings& cur) {
    if (i == pos.size()) {
      for (const auto* n : neg)
        if (literal_holds(ground(*n, cur), state) == false) return;
      out.push_back(cur);
      return;
    }
    const Literal g = ground(*pos[i], cur);
    for (const auto& a : state) {
      Bindings next = cur;
      if (unify(g, a, next)) rec(i + 1, next);
    }
  };
  rec(0, b);
}

Bindings bind_params(const std::vector<std::string>& params, const std::vector<std::string>& args,
                     const std::string& what) {
  Bindings b;
  if (args.size() > params.size())
    throw std::invalid_argument("too many arguments for '" + what + "'");
  for (std::size_t i = 0; i < args.size(); ++i) b[params[i]] = args[i];
  return b;
}

bool atom_matched_by_any(const Atom& a, const std::vector<Literal>& pre) {
  return std::any_of(pre.begin(), pre.end(), [&](const Literal& l) { return l.matches(a); });
}

std::vector<std::vector<bool>> closure(std::size_t n,
                                       const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
  for (const auto& [a, b] : edges) r[a][b] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (r[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (r[k][j]) r[i][j] = true;
  return r;
}

std::vector<std::pair<std::size_t, std::size_t>> reduce(const std::vector<std::vector<bool>>& r) {
  const std::size_t n = r.size();
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!r[i][j]) continue;
      bool implied = false;
      for (std::size_t k = 0; k < n && !implied; ++k) implied = r[i][k] && r[k][j];
      if (!implied) out.emplace_back(i, j);
    }
  return out;
}

std::set<EntityId> involved(const PlanStep& s) {
  std::set<EntityId> out{s.agent};
  auto it = s.skill.args.find("partner");
  if (it != s.skill.args.end()) out.insert(it->second);
  return out;
}

bool interferes(const PlanStep& a, const PlanStep& b) {
  auto touches = [](const PlanStep& x, const PlanStep& y) {
    for (const auto* set : {&x.add, &x.del})
      for (const auto& atom : *set) {
        if (atom_matched_by_any(atom, y.pre)) return true;
        if (y.add.contains(atom) || y.del.contains(atom)) return true;
      }
    return false;
  };
  return touches(a, b) || touches(b, a);
}

}  // namespace

// --- atoms and literals ----------------------------------------------------

std::string Atom::to_string() const { return subject + " " + predicate + " " + object; }

Atom Atom::parse(std::string_view text) {
  auto t = split_ws(text);
  if (t.size() != 3) throw std::invalid_argument("atom needs three terms: '" + std::string(text) + "'");
  return Atom{t[0], t[1], t[2]};
}

Atom Atom::from_fact(const Fact& f) { return Atom{f.subject, f.predicate.to_string(), f.object}; }

Fact Atom::to_fact() const { return Fact{subject, Predicate::from_name(predicate), object, 0}; }

std::string Literal::to_string() const {
  return (negated ? "!" : "") + subject + " " + predicate + " " + object;
}

Literal Literal::parse(std::string_view text) {
  bool neg = false;
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  if (!text.empty() && text.front() == '!') {
    neg = true;
    text.remove_prefix(1);
  }
  auto t = split_ws(text);
  if (t.size() != 3)
    throw std::invalid_argument("literal needs three terms: '" + std::string(text) + "'");
  if (!neg && (t[0] == "*" || t[1] == "*" || t[2] == "*"))
    throw std::invalid_argument("wildcards are only allowed in negated literals");
  return Literal{t[0], t[1], t[2], neg};
}

bool Literal::matches(const Atom& a) const {
  return term_matches(subject, a.subject) && term_matches(predicate, a.predicate) &&
         term_matches(object, a.object);
}

std::string TaskCall::to_string() const {
  std::string out = name + "(";
  for (std::size_t i = 0; i < args.size(); ++i) out += (i ? "," : "") + args[i];
  return out + ")";
}

bool literal_holds(const Literal& l, const AtomSet& state) {
  bool any = false;
  if (l.subject == "*" || l.predicate == "*" || l.object == "*" || is_var(l.subject) ||
      is_var(l.predicate) || is_var(l.object)) {
    any = std::any_of(state.begin(), state.end(), [&](const Atom& a) { return l.matches(a); });
  } else {
    any = state.contains(Atom{l.subject, l.predicate, l.object});
  }
  return l.negated ? !any : any;
}

void apply_effects(AtomSet& state, const PlanStep& step) {
  for (const auto& a : step.del) state.erase(a);
  for (const auto& a : step.add) state.insert(a);
}

// --- domain ------------------------------------------------------------------

const Operator* HtnDomain::find_operator(const std::string& name) const {
  for (const auto& op : operators)
    if (op.name == name) return &op;
  return nullptr;
}

bool HtnDomain::is_compound(const std::string& name) const {
  return std::any_of(tasks.begin(), tasks.end(), [&](const TaskDecl& t) { return t.name == name; });
}

void HtnDomain::validate() const {
  std::set<std::string> names;
  for (const auto& op : operators)
    if (!names.insert(op.name).second)
      throw std::invalid_argument("duplicate operator '" + op.name + "'");
  for (const auto& t : tasks) {
    if (!names.insert(t.name).second)
      throw std::invalid_argument("task '" + t.name + "' is declared twice");
    if (std::none_of(methods.begin(), methods.end(), [&](const Method& m) { return m.task == t.name; }))
      throw std::invalid_argument("abstract task '" + t.name + "' has no method");
  }
  for (const auto& m : methods) {
    if (!is_compound(m.task))
      throw std::invalid_argument("method '" + m.name + "' refines undeclared task '" + m.task + "'");
    for (const auto& s : m.subtasks)
      if (!names.contains(s.name))
        throw std::invalid_argument("method '" + m.name + "' calls unknown task '" + s.name + "'");
    for (const auto& [a, b] : m.order)
      if (a >= m.subtasks.size() || b >= m.subtasks.size() || a == b)
        throw std::invalid_argument("method '" + m.name + "' has a bad ordering edge");
  }
}

std::string_view to_string(SocialPolicy::Mode m) noexcept {
  switch (m) {
    case SocialPolicy::Mode::efficient: return "EFFICIENT";
    case SocialPolicy::Mode::teach: return "TEACH";
    case SocialPolicy::Mode::balanced: return "BALANCED";
  }
  return "?";
}

std::optional<SocialPolicy::Mode> parse_policy_mode(std::string_view s) noexcept {
  if (s == "EFFICIENT") return SocialPolicy::Mode::efficient;
  if (s == "TEACH") return SocialPolicy::Mode::teach;
  if (s == "BALANCED") return SocialPolicy::Mode::balanced;
  return std::nullopt;
}

double social_cost(const SocialPolicy& policy, double base, double robot_effort,
                   double human_effort, std::size_t unknown_human_tasks) {
  double sign = 0.0;
  if (policy.mode == SocialPolicy::Mode::efficient) sign = 1.0;
  if (policy.mode == SocialPolicy::Mode::teach) sign = -1.0;
  return base + policy.lambda * std::abs(robot_effort - human_effort) +
         sign * policy.mu * static_cast<double>(unknown_human_tasks);
}

bool task_matches(const std::string& pattern, const std::string& task) {
  return ::fnmatch(pattern.c_str(), task.c_str(), 0) == 0;
}

std::vector<TaskConstraint> contradictory_constraints(const NegotiationConstraints& c) {
  std::set<TaskConstraint> out;
  for (const auto& d : c.must_do) {
    if (c.must_not_do.contains(d)) out.insert(d);
    for (const auto& e : c.must_do)
      if (e.pattern == d.pattern && e.agent != d.agent) {
        out.insert(d);
        out.insert(e);
      }
  }
  return {out.begin(), out.end()};
}

// --- plans -------------------------------------------------------------------

std::size_t SharedPlan::index_of(const std::string& step_id) const {
  for (std::size_t i = 0; i < steps.size(); ++i)
    if (steps[i].id == step_id) return i;
  throw std::out_of_range("no step '" + step_id + "' in plan " + id);
}

std::vector<std::vector<bool>> SharedPlan::precedence() const { return closure(steps.size(), ordering); }

SharedPlan SharedPlan::restrict_to(const std::vector<std::size_t>& keep) const {
  const auto r = precedence();
  SharedPlan out = *this;
  out.steps.clear();
  out.links.clear();
  std::map<std::size_t, std::size_t> remap;
  for (auto k : keep) {
    remap[k] = out.steps.size();
    out.steps.push_back(steps.at(k));
  }
  std::vector<std::vector<bool>> sub(keep.size(), std::vector<bool>(keep.size(), false));
  for (std::size_t i = 0; i < keep.size(); ++i)
    for (std::size_t j = 0; j < keep.size(); ++j) sub[i][j] = r[keep[i]][keep[j]];
  out.ordering = reduce(sub);
  for (const auto& l : links) {
    auto c = remap.find(l.consumer);
    if (c == remap.end()) continue;
    auto p = remap.find(l.producer);
    out.links.push_back({p == remap.end() ? CausalLink::kInitial : p->second, c->second, l.fact});
  }
  return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Node {
  TaskCall call;
  std::vector<std::size_t> preds;
  std::vector<std::size_t> children;
  bool expanded{false};
  bool executed{false};
  std::size_t top{0};
  std::size_t depth{0};
};

struct SearchOutcome {
  std::optional<std::vector<PlanStep>> steps;
  std::vector<std::string> tops;
  double cost{kInf};
  bool depth_hit{false};
};

class Search {
 public:
  explicit Search(const PlanRequest& req) : req_(req), dom_(*req.domain) {
    agents_ = req.agents;
    std::sort(agents_.begin(), agents_.end(),
              [](const PlanAgent& a, const PlanAgent& b) { return a.id < b.id; });
    compute_bounds();
  }

  SearchOutcome run() {
    Node root;
    root.call = req_.goal;
    root.top = kNoTop;
    net_.push_back(root);
    if (!dom_.is_compound(root.call.name)) tops_ = {root.call.to_string()};
    state_ = req_.initial;
    dfs();
    return std::move(best_);
  }

 private:
  static constexpr std::size_t kNoTop = std::numeric_limits<std::size_t>::max();

  bool agent_allowed(const Operator& op, const PlanAgent& a) const {
    if (op.agent == AgentReq::robot) return a.kind == AgentKind::robot;
    if (op.agent == AgentReq::human) return a.kind == AgentKind::human;
    return true;
  }

  double op_cost(const Operator& op, const PlanAgent& a) const {
    return a.kind == AgentKind::robot ? op.cost_robot : op.cost_human;
  }

  void compute_bounds() {
    for (const auto& op : dom_.operators) {
      double best = kInf;
      for (const auto& a : agents_)
        if (agent_allowed(op, a)) best = std::min(best, op_cost(op, a));
      lb_[op.name] = best;
      ub_count_[op.name] = 1.0;
    }
    for (const auto& t : dom_.tasks) lb_[t.name] = kInf;
    for (std::size_t iter = 0; iter <= dom_.tasks.size() + 1; ++iter) {
      bool changed = false;
      for (const auto& m : dom_.methods) {
        double sum = 0.0;
        for (const auto& s : m.subtasks) sum += lb_.at(s.name);
        if (sum < lb_[m.task] - 1e-12) {
          lb_[m.task] = sum;
          changed = true;
        }
      }
      if (!changed) break;
    }
    // Upper bound on primitive count; infinite for recursive tasks.
    std::map<std::string, int> mark;
    std::function<double(const std::string&)> ub = [&](const std::string& name) -> double {
      if (!dom_.is_compound(name)) return 1.0;
      if (mark[name] == 1) return kInf;
      if (mark[name] == 2) return ub_count_[name];
      mark[name] = 1;
      double best = 0.0;
      for (const auto& m : dom_.methods) {
        if (m.task != name) continue;
        double sum = 0.0;
        for (const auto& s : m.subtasks) sum += ub(s.name);
        best = std::max(best, sum);
      }
      mark[name] = 2;
      ub_count_[name] = best;
      return best;
    };
    for (const auto& t : dom_.tasks) ub(t.name);
  }

  bool done(std::size_t k) const {
    const Node& n = net_[k];
    if (n.executed) return true;
    if (!n.expanded) return false;
    return std::all_of(n.children.begin(), n.children.end(), [&](std::size_t c) { return done(c); });
  }

  bool is_open_leaf(std::size_t k) const { return !net_[k].executed && !net_[k].expanded; }

  double bound() const {
    double rem = 0.0, rem_prims = 0.0;
    for (std::size_t k = 0; k < net_.size(); ++k) {
      if (!is_open_leaf(k)) continue;
      rem += lb_.at(net_[k].call.name);
      rem_prims += ub_count_.at(net_[k].call.name);
    }
    double b = base_ + rem;
    const auto& pol = req_.policy;
    if (pol.mode == SocialPolicy::Mode::efficient) b += pol.mu * static_cast<double>(unknown_);
    if (pol.mode == SocialPolicy::Mode::teach)
      b -= pol.mu * (static_cast<double>(unknown_) + rem_prims);
    return b;
  }

  bool forbidden(const std::string& task, const EntityId& agent) const {
    for (const auto& c : req_.constraints.must_not_do)
      if (c.agent == agent && task_matches(c.pattern, task)) return true;
    for (const auto& c : req_.constraints.must_do)
      if (c.agent != agent && task_matches(c.pattern, task)) return true;
    return false;
  }

  /// A human who refuses a task also refuses to be its handover partner.
  bool partner_refuses(const std::string& task, const PlanStep& s) const {
    auto it = s.skill.args.find("partner");
    if (it == s.skill.args.end()) return false;
    for (const auto& c : req_.constraints.must_not_do)
      if (c.agent == it->second && task_matches(c.pattern, task)) return true;
    return false;
  }

  bool unknown_to(const EntityId& agent, const std::string& label) const {
    auto a = req_.knowledge.find(agent);
    if (a == req_.knowledge.end()) return false;
    auto t = a->second.find(label);
    return t != a->second.end() && t->second == KnowHow::unknown;
  }

  void leaf() {
    for (const auto& c : req_.constraints.must_do) {
      const bool hit = std::any_of(steps_.begin(), steps_.end(), [&](const PlanStep& s) {
        return s.agent == c.agent && task_matches(c.pattern, s.task.to_string());
      });
      if (!hit) return;
    }
    const double cost = social_cost(req_.policy, base_, robot_, human_, unknown_);
    if (cost < best_.cost - 1e-9) {
      best_.cost = cost;
      best_.steps = steps_;
      best_.tops = tops_;
    }
  }

  void dfs() {
    if (++visited_ > kVisitBudget) return;
    if (bound() >= best_.cost - 1e-9) return;
    std::vector<std::size_t> eligible;
    bool all_done = true;
    for (std::size_t k = 0; k < net_.size(); ++k) {
      if (!is_open_leaf(k)) continue;
      all_done = false;
      const auto& preds = net_[k].preds;
      if (std::all_of(preds.begin(), preds.end(), [&](std::size_t p) { return done(p); }))
        eligible.push_back(k);
    }
    if (all_done) {
      leaf();
      return;
    }
    for (auto k : eligible)
      if (dom_.is_compound(net_[k].call.name)) {
        expand(k);
        return;
      }
    for (auto k : eligible) execute(k);
  }

  void expand(std::size_t k) {
    const Node node = net_[k];
    if (node.depth >= dom_.depth_bound) {
      best_.depth_hit = true;
      return;
    }
    for (const auto& m : dom_.methods) {
      if (m.task != node.call.name) continue;
      Bindings b0 = bind_params(m.params, node.call.args, m.name);
      std::vector<Bindings> options;
      satisfying(m.pre, state_, b0, options);
      for (const auto& b : options) {
        const std::size_t first = net_.size();
        const auto saved_tops = tops_;
        if (node.top == kNoTop) tops_.clear();
        for (std::size_t i = 0; i < m.subtasks.size(); ++i) {
          Node child;
          child.call.name = m.subtasks[i].name;
          for (const auto& a : m.subtasks[i].args) {
            const auto v = subst(a, b);
            if (is_var(v))
              throw std::invalid_argument("method '" + m.name + "' leaves " + v + " unbound");
            child.call.args.push_back(v);
          }
          child.depth = node.depth + 1;
          child.top = node.top == kNoTop ? i : node.top;
          if (node.top == kNoTop) tops_.push_back(child.call.to_string());
          net_.push_back(std::move(child));
        }
        for (const auto& [a, c] : m.order) net_[first + c].preds.push_back(first + a);
        net_[k].expanded = true;
        net_[k].children.clear();
        for (std::size_t i = 0; i < m.subtasks.size(); ++i) net_[k].children.push_back(first + i);
        dfs();
        net_[k].expanded = false;
        net_[k].children.clear();
        net_.resize(first);
        tops_ = saved_tops;
      }
    }
  }

  void execute(std::size_t k) {
    const Node node = net_[k];
    const Operator* op = dom_.find_operator(node.call.name);
    if (!op) throw std::invalid_argument("unknown task '" + node.call.name + "'");
    const std::string task = node.call.to_string();
    for (const auto& agent : agents_) {
      if (!agent_allowed(*op, agent) || forbidden(task, agent.id)) continue;
      Bindings b0 = bind_params(op->params, node.call.args, op->name);
      b0["?agent"] = agent.id;
      std::vector<Bindings> options;
      satisfying(op->pre, state_, b0, options);
      for (const auto& b : options) {
        PlanStep s;
        s.task = node.call;
        s.agent = agent.id;
        for (const auto& l : op->pre) s.pre.push_back(ground(l, b));
        for (const auto& l : op->add) s.add.insert(ground_effect(l, b, op->name));
        for (const auto& l : op->del) s.del.insert(ground_effect(l, b, op->name));
        s.base_cost = op_cost(*op, agent);
        s.skill.kind = op->skill.kind;
        for (const auto& [key, val] : op->skill.args) s.skill.args[key] = subst(val, b);
        s.top = node.top == kNoTop ? 0 : node.top;
        if (partner_refuses(task, s)) continue;

        const AtomSet saved = state_;
        const double sb = base_, sr = robot_, sh = human_;
        const std::size_t su = unknown_;
        apply_effects(state_, s);
        base_ += s.base_cost;
        (agent.kind == AgentKind::robot ? robot_ : human_) += s.base_cost;
        if (agent.kind == AgentKind::human && unknown_to(agent.id, op->name)) ++unknown_;
        steps_.push_back(std::move(s));
        net_[k].executed = true;
        dfs();
        net_[k].executed = false;
        steps_.pop_back();
        state_ = saved;
        base_ = sb;
        robot_ = sr;
        human_ = sh;
        unknown_ = su;
      }
    }
  }

  static constexpr std::size_t kVisitBudget = 2'000'000;

  const PlanRequest& req_;
  const HtnDomain& dom_;
  std::vector<PlanAgent> agents_;
  std::map<std::string, double> lb_;
  std::map<std::string, double> ub_count_;

  std::vector<Node> net_;
  AtomSet state_;
  std::vector<PlanStep> steps_;
  std::vector<std::string> tops_;
  double base_{0.0}, robot_{0.0}, human_{0.0};
  std::size_t unknown_{0};
  std::size_t visited_{0};
  SearchOutcome best_;
};

SharedPlan assemble(const PlanRequest& req, std::vector<PlanStep> steps,
                    const std::vector<std::string>& tops) {
  SharedPlan p;
  p.id = req.plan_id;
  p.steps = std::move(steps);
  const std::size_t n = p.steps.size();
  std::map<EntityId, AgentKind> kinds;
  for (const auto& a : req.agents) kinds[a.id] = a.kind;
  for (std::size_t i = 0; i < n; ++i) {
    auto& s = p.steps[i];
    s.id = "s" + std::to_string(i + 1);
    p.robot_effort += kinds[s.agent] == AgentKind::robot ? s.base_cost : 0.0;
    p.human_effort += kinds[s.agent] == AgentKind::human ? s.base_cost : 0.0;
    auto k = req.knowledge.find(s.agent);
    if (kinds[s.agent] == AgentKind::human && k != req.knowledge.end()) {
      auto t = k->second.find(s.task.name);
      if (t != k->second.end() && t->second == KnowHow::unknown) ++p.unknown_human_tasks;
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto ai = involved(p.steps[i]), aj = involved(p.steps[j]);
      const bool shared = std::any_of(ai.begin(), ai.end(), [&](const auto& x) { return aj.contains(x); });
      if (shared || interferes(p.steps[i], p.steps[j])) edges.emplace_back(i, j);
    }
  p.ordering = reduce(closure(n, edges));
  for (std::size_t j = 0; j < n; ++j)
    for (const auto& l : p.steps[j].pre) {
      if (l.negated || l.subject == "*" || l.predicate == "*" || l.object == "*") continue;
      const Atom a{l.subject, l.predicate, l.object};
      std::size_t producer = CausalLink::kInitial;
      for (std::size_t i = 0; i < j; ++i)
        if (p.steps[i].add.contains(a)) producer = i;
      p.links.push_back({producer, j, a});
    }
  for (std::size_t t = 0; t < tops.size(); ++t) {
    std::set<EntityId> agents;
    for (const auto& s : p.steps)
      if (s.top == t) agents.insert(s.agent);
    if (!agents.empty()) p.summary.push_back({tops[t], {agents.begin(), agents.end()}});
  }
  // Re-point step.top at the compacted summary.
  std::map<std::size_t, std::size_t> compact;
  for (std::size_t t = 0, c = 0; t < tops.size(); ++t) {
    const bool used = std::any_of(p.steps.begin(), p.steps.end(), [&](const PlanStep& s) { return s.top == t; });
    if (used) compact[t] = c++;
  }
  for (auto& s : p.steps) s.top = compact[s.top];
  p.cost = social_cost(req.policy, p.robot_effort + p.human_effort, p.robot_effort, p.human_effort,
                       p.unknown_human_tasks);
  return p;
}

PlanResult search_only(const PlanRequest& req) {
  if (!req.domain) throw std::invalid_argument("plan request without a domain");
  if (!req.goal_condition.empty() &&
      std::all_of(req.goal_condition.begin(), req.goal_condition.end(),
                  [&](const Atom& a) { return req.initial.contains(a); })) {
    SharedPlan p;
    p.id = req.plan_id;
    return p;
  }
  Search search(req);
  auto out = search.run();
  if (out.steps) return assemble(req, std::move(*out.steps), out.tops);
  PlanFailure f;
  if (out.depth_hit) {
    f.kind = PlanFailure::Kind::depth_exceeded;
    f.message = "decomposition of " + req.goal.to_string() + " exceeded depth " +
                std::to_string(req.domain->depth_bound);
  } else {
    f.message = "no decomposition of " + req.goal.to_string() + " is applicable";
  }
  return f;
}

}  // namespace

std::vector<TaskConstraint> blocking_constraints(const PlanRequest& request) {
  std::vector<TaskConstraint> out;
  auto try_without = [&](bool must_do, const TaskConstraint& c) {
    PlanRequest r = request;
    (must_do ? r.constraints.must_do : r.constraints.must_not_do).erase(c);
    if (std::holds_alternative<SharedPlan>(search_only(r))) out.push_back(c);
  };
  for (const auto& c : request.constraints.must_do) try_without(true, c);
  for (const auto& c : request.constraints.must_not_do) try_without(false, c);
  return out;
}

PlanResult plan(const PlanRequest& request) {
  if (auto bad = contradictory_constraints(request.constraints); !bad.empty()) {
    PlanFailure f{PlanFailure::Kind::contradictory, "contradictory constraints:", bad};
    for (const auto& c : bad)
      f.message += " mustDo(" + c.agent + ", " + c.pattern + ") vs mustNotDo(" + c.agent + ", " + c.pattern + ")";
    return f;
  }
  auto result = search_only(request);
  if (auto* f = std::get_if<PlanFailure>(&result); f && !request.constraints.empty()) {
    f->culprits = blocking_constraints(request);
    if (!f->culprits.empty()) {
      f->message += "; blocked by";
      for (const auto& c : f->culprits) f->message += " (" + c.agent + ", " + c.pattern + ")";
    }
  }
  return result;
}

// --- validation ----------------------------------------------------------------

namespace {

/// Whether ground atom `q` is necessarily true (or, with `want_true` false,
/// necessarily false) right before step `s` in every linearization.
bool necessarily(const SharedPlan& plan, const std::vector<std::vector<bool>>& before,
                 const AtomSet& facts, std::size_t s, const Atom& q, bool want_true) {
  const std::size_t n = plan.steps.size();
  auto makes = [&](std::size_t i, bool value) {
    const auto& st = plan.steps[i];
    const bool adds = st.add.contains(q);
    const bool dels = st.del.contains(q);
    return value ? adds : (dels && !adds);
  };
  bool established = facts.contains(q) == want_true;
  for (std::size_t i = 0; i < n && !established; ++i)
    if (i != s && before[i][s] && makes(i, want_true)) established = true;
  if (!established) return false;
  for (std::size_t c = 0; c < n; ++c) {
    if (c == s || before[s][c] || !makes(c, !want_true)) continue;
    bool knight = false;
    for (std::size_t w = 0; w < n && !knight; ++w)
      knight = w != s && w != c && before[c][w] && before[w][s] && makes(w, want_true);
    if (!knight) return false;
  }
  return true;
}

}  // namespace

std::optional<Violation> validate(const SharedPlan& plan, const AtomSet& facts) {
  const std::size_t n = plan.steps.size();
  const auto before = plan.precedence();
  std::vector<std::size_t> indeg(n, 0), order;
  for (const auto& [a, b] : plan.ordering) ++indeg[b];
  std::vector<bool> used(n, false);
  for (std::size_t round = 0; round < n; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i] || indeg[i] != 0) continue;
      used[i] = true;
      order.push_back(i);
      for (const auto& [a, b] : plan.ordering)
        if (a == i) --indeg[b];
      break;
    }
  }
  AtomSet universe = facts;
  for (const auto& st : plan.steps) universe.insert(st.add.begin(), st.add.end());

  for (auto s : order) {
    for (const auto& l : plan.steps[s].pre) {
      const bool wild = l.subject == "*" || l.predicate == "*" || l.object == "*";
      bool ok = true;
      if (!wild) {
        ok = necessarily(plan, before, facts, s, Atom{l.subject, l.predicate, l.object}, !l.negated);
      } else if (l.negated) {
        for (const auto& a : universe)
          if (l.matches(a) && !necessarily(plan, before, facts, s, a, false)) {
            ok = false;
            break;
          }
      } else {
        ok = std::any_of(universe.begin(), universe.end(), [&](const Atom& a) {
          return l.matches(a) && necessarily(plan, before, facts, s, a, true);
        });
      }
      if (!ok) return Violation{plan.steps[s].id, l};
    }
  }
  return std::nullopt;
}

// --- negotiation -------------------------------------------------------------------

PlanResult Negotiation::propose() {
  request_.plan_id = "P" + std::to_string(++counter_);
  return plan(request_);
}

NegotiationOutcome Negotiation::respond(const SharedPlan& current, const CommAct& response) {
  if (response.plan_id != current.id)
    throw NegotiationError("response refers to plan '" + response.plan_id + "', current is '" +
                           current.id + "'");
  NegotiationOutcome out;
  if (response.kind == CommKind::AcceptPlan) {
    out.kind = NegotiationOutcome::Kind::accepted;
    out.plan = current;
    return out;
  }
  if (response.kind != CommKind::RejectPlan)
    throw NegotiationError("expected AcceptPlan or RejectPlan, got " +
                           std::string(to_string(response.kind)));
  add_constraints(response.constraints);
  auto next = propose();
  if (auto* p = std::get_if<SharedPlan>(&next)) {
    out.kind = NegotiationOutcome::Kind::replanned;
    out.plan = std::move(*p);
  } else {
    out.kind = NegotiationOutcome::Kind::infeasible;
    out.failure = std::get<PlanFailure>(next);
  }
  return out;
}

}  // namespace coact
