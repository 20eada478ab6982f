#pragma once

#include <compare>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "coact/comm_act.hpp"
#include "coact/facts.hpp"
#include "coact/mental_state.hpp"
#include "coact/world.hpp"

namespace coact {

/// Ground planning atom; predicates are free-form strings.
struct Atom {
  std::string subject;
  std::string predicate;
  std::string object;

  std::string to_string() const;
  static Atom parse(std::string_view text);
  static Atom from_fact(const Fact& f);
  Fact to_fact() const;

  auto operator<=>(const Atom&) const = default;
};

using AtomSet = std::set<Atom>;

/// Precondition or effect pattern. Terms starting with '?' are variables,
/// "*" matches anything (negated preconditions only).
struct Literal {
  std::string subject;
  std::string predicate;
  std::string object;
  bool negated{false};

  std::string to_string() const;
  /// "S P O" or "!S P O".
  static Literal parse(std::string_view text);
  bool matches(const Atom& a) const;

  auto operator<=>(const Literal&) const = default;
};

struct TaskCall {
  std::string name;
  std::vector<std::string> args;

  std::string to_string() const;  // "fetch(MUG)"
  auto operator<=>(const TaskCall&) const = default;
};

enum class AgentReq { any, robot, human };

/// How the executive turns a step into primitive actions.
struct SkillSpec {
  std::string kind;  // pick | place | set | handover | none
  std::map<std::string, std::string> args;

  bool operator==(const SkillSpec&) const = default;
};

struct Operator {
  std::string name;
  std::vector<std::string> params;
  AgentReq agent{AgentReq::any};
  std::vector<Literal> pre;
  std::vector<Literal> add;
  std::vector<Literal> del;
  double cost_robot{1.0};
  double cost_human{1.0};
  SkillSpec skill;
};

struct Method {
  std::string name;
  std::string task;
  std::vector<std::string> params;
  std::vector<Literal> pre;
  std::vector<TaskCall> subtasks;
  std::vector<std::pair<std::size_t, std::size_t>> order;  // before -> after
};

struct TaskDecl {
  std::string name;
  std::vector<std::string> params;
};

struct HtnDomain {
  std::vector<TaskDecl> tasks;
  std::vector<Method> methods;
  std::vector<Operator> operators;
  std::size_t depth_bound{50};

  const Operator* find_operator(const std::string& name) const;
  bool is_compound(const std::string& name) const;
  /// Every abstract task needs a method; calls must name known tasks.
  void validate() const;
};

struct SocialPolicy {
  enum class Mode { efficient, teach, balanced };
  Mode mode{Mode::efficient};
  double lambda{0.5};
  double mu{1.0};
};

std::string_view to_string(SocialPolicy::Mode m) noexcept;
std::optional<SocialPolicy::Mode> parse_policy_mode(std::string_view s) noexcept;

struct PlanStep {
  std::string id;
  TaskCall task;  // operator instance
  EntityId agent;
  std::vector<Literal> pre;  // ground; may contain "*"
  AtomSet add;
  AtomSet del;
  double base_cost{0.0};
  SkillSpec skill;  // ground
  std::size_t top{0};  // index into SharedPlan::summary

  bool operator==(const PlanStep&) const = default;
};

struct CausalLink {
  static constexpr std::size_t kInitial = std::numeric_limits<std::size_t>::max();
  std::size_t producer{kInitial};
  std::size_t consumer{0};
  Atom fact;

  bool operator==(const CausalLink&) const = default;
};

struct SharedPlan {
  std::string id;
  std::vector<PlanStep> steps;
  std::vector<std::pair<std::size_t, std::size_t>> ordering;  // transitively reduced
  std::vector<CausalLink> links;
  std::vector<TaskBrief> summary;  // tasks one level below the goal
  double cost{0.0};
  double robot_effort{0.0};
  double human_effort{0.0};
  std::size_t unknown_human_tasks{0};

  std::size_t index_of(const std::string& step_id) const;
  /// before[i][j] == true iff step i must precede step j.
  std::vector<std::vector<bool>> precedence() const;
  /// Steps listed in `keep`, ordering restricted transitively.
  SharedPlan restrict_to(const std::vector<std::size_t>& keep) const;
  bool operator==(const SharedPlan&) const = default;
};

struct PlanAgent {
  EntityId id;
  AgentKind kind{AgentKind::robot};
};

using KnowledgeMap = std::map<EntityId, std::map<std::string, KnowHow>>;

struct PlanRequest {
  const HtnDomain* domain{nullptr};
  AtomSet initial;
  TaskCall goal;
  std::vector<Atom> goal_condition;
  std::vector<PlanAgent> agents;
  KnowledgeMap knowledge;
  SocialPolicy policy;
  NegotiationConstraints constraints;
  std::string plan_id{"P1"};
};

struct PlanFailure {
  enum class Kind { infeasible, depth_exceeded, contradictory };
  Kind kind{Kind::infeasible};
  std::string message;
  std::vector<TaskConstraint> culprits;
};

using PlanResult = std::variant<SharedPlan, PlanFailure>;

/// Social cost of an assignment: sum of base costs, effort imbalance and the
/// signed unknown-task term.
double social_cost(const SocialPolicy& policy, double base, double robot_effort,
                   double human_effort, std::size_t unknown_human_tasks);

bool task_matches(const std::string& pattern, const std::string& task);

/// Contradictory constraint pairs, if any.
std::vector<TaskConstraint> contradictory_constraints(const NegotiationConstraints& c);

/// Depth-first decomposition with branch-and-bound on social cost.
PlanResult plan(const PlanRequest& request);

struct Violation {
  std::string step_id;
  Literal precondition;

  bool operator==(const Violation&) const = default;
};

/// nullopt iff every linearization of the partial order executes from `facts`.
std::optional<Violation> validate(const SharedPlan& plan, const AtomSet& facts);

/// Applies step effects (deletes first) to a state.
void apply_effects(AtomSet& state, const PlanStep& step);
bool literal_holds(const Literal& l, const AtomSet& state);

// --- negotiation -----------------------------------------------------------

struct NegotiationOutcome {
  enum class Kind { accepted, replanned, infeasible };
  Kind kind{Kind::accepted};
  std::optional<SharedPlan> plan;
  PlanFailure failure;
};

class NegotiationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One goal episode of proposal rounds. Constraints accumulate across rejections.
class Negotiation {
 public:
  explicit Negotiation(PlanRequest request) : request_(std::move(request)) {}

  const PlanRequest& request() const noexcept { return request_; }
  const NegotiationConstraints& constraints() const noexcept { return request_.constraints; }
  void add_constraints(const NegotiationConstraints& c) { request_.constraints.merge(c); }
  void set_initial(AtomSet facts) { request_.initial = std::move(facts); }

  /// Plans with the accumulated constraints; fresh plan ids each call.
  PlanResult propose();
  NegotiationOutcome respond(const SharedPlan& current, const CommAct& response);

 private:
  PlanRequest request_;
  int counter_{0};
};

/// Constraints whose removal alone makes planning feasible.
std::vector<TaskConstraint> blocking_constraints(const PlanRequest& request);

}  // namespace coact
