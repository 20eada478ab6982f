#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coact/facts.hpp"
#include "coact/world.hpp"

namespace coact {

/// (agent, task pattern) pair; patterns are shell globs over step task
/// strings such as "fetch(MUG)", e.g. "fetch*" or "*".
struct TaskConstraint {
  EntityId agent;
  std::string pattern;

  auto operator<=>(const TaskConstraint&) const = default;
};

struct NegotiationConstraints {
  std::set<TaskConstraint> must_do;
  std::set<TaskConstraint> must_not_do;

  bool empty() const noexcept { return must_do.empty() && must_not_do.empty(); }
  void merge(const NegotiationConstraints& other);
  bool operator==(const NegotiationConstraints&) const = default;
};

/// One plan step as communicated to a partner.
struct StepBrief {
  std::string step_id;
  std::string task;  // e.g. "fetch(MUG)"
  std::string label;  // operator name, the know-how key
  std::vector<std::string> args;
  EntityId agent;
  std::vector<EntityId> partners;

  bool operator==(const StepBrief&) const = default;
};

/// A higher-level task of a proposal with the agents working on it.
struct TaskBrief {
  std::string task;
  std::vector<EntityId> agents;

  bool operator==(const TaskBrief&) const = default;
};

enum class CommKind {
  Inform,
  AskFact,
  Answer,
  ProposePlan,
  AcceptPlan,
  RejectPlan,
  RequestAction,
  Explain,
  Signal,
};

std::string_view to_string(CommKind k) noexcept;
std::optional<CommKind> parse_comm_kind(std::string_view s) noexcept;

/// Structured communicative act. Payload fields are used per `kind`.
struct CommAct {
  CommKind kind{CommKind::Inform};
  EntityId sender;
  EntityId addressee;
  Tick tick{0};

  std::optional<Fact> fact;           // Inform
  std::string pattern;                // AskFact, "subject predicate ?"
  std::vector<Fact> facts;            // Answer
  std::string plan_id;                // ProposePlan, AcceptPlan, RejectPlan
  std::vector<TaskBrief> summary;     // ProposePlan
  std::vector<StepBrief> steps;       // ProposePlan
  NegotiationConstraints constraints;  // RejectPlan
  std::string step_id;                // RequestAction
  std::string task_label;             // Explain
  ActionKind signal{ActionKind::LookAt};  // Signal: LookAt or PointAt
  EntityId signal_target;             // Signal

  static CommAct inform(EntityId from, EntityId to, Fact f, Tick t);
  static CommAct explain(EntityId from, EntityId to, std::string task, Tick t);
  static CommAct request_action(EntityId from, EntityId to, std::string step, Tick t);
  static CommAct accept_plan(EntityId from, EntityId to, std::string plan, Tick t);
  static CommAct reject_plan(EntityId from, EntityId to, std::string plan,
                             NegotiationConstraints c, Tick t);
  static CommAct signal_act(EntityId from, EntityId to, ActionKind how, EntityId target, Tick t);

  bool operator==(const CommAct&) const = default;
};

}  // namespace coact
