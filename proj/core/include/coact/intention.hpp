#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coact/facts.hpp"
#include "coact/mdp.hpp"

namespace coact {

inline constexpr const char* kNoIntention = "none";

/// One candidate intention: its MDP plus the fact conjunction defining each
/// abstract state. `goal_ref` names the scenario goal the robot would adopt.
struct IntentionGoal {
  std::string id;
  std::string goal_ref;
  Mdp mdp;
  std::vector<std::vector<Fact>> abstraction;  // per MDP state
  std::optional<QTable> q;
};

/// Context -> Intention -> Action -> Observation network whose action CPD is
/// the softmax of each goal's Q-values.
struct IntentionModel {
  EntityId observed_agent;
  std::vector<std::string> actions;  // shared action vocabulary
  std::vector<IntentionGoal> goals;
  std::map<std::string, std::map<std::string, double>> prior;  // context -> goal|none -> p
  std::string context;
  double beta{5.0};
  double threshold{0.8};
  std::vector<std::vector<double>> confusion;  // [observed][true]; empty = identity
  /// Maps a primitive action wire string (or its kind, or "*") to a vocabulary action.
  std::map<std::string, std::string> action_map;

  void validate() const;
  void solve(double epsilon = 1e-6);

  double confusion_prob(std::size_t observed, std::size_t truth) const;
  std::size_t action_index(const std::string& name) const;
  /// First abstract state whose conjunction holds in `facts`.
  std::optional<std::size_t> project(std::size_t goal, const FactBase& facts) const;
  /// Vocabulary action for a primitive action, if the map covers it.
  std::optional<std::size_t> map_action(const std::string& primitive_wire) const;
};

using IntentionPosterior = std::map<std::string, double>;

IntentionPosterior initial_posterior(const IntentionModel& model, const std::string& context);

struct ObservationUpdate {
  IntentionPosterior posterior;
  std::vector<std::string> unmappable;  // goals scored with a uniform likelihood
};

/// Bayes update with likelihoods evaluated in each goal's believed state.
/// `believed_states[g]` is the projection of the observed agent's beliefs.
ObservationUpdate observe_action(const IntentionModel& model, const IntentionPosterior& prior,
                                 std::size_t observed_action,
                                 const std::vector<std::optional<std::size_t>>& believed_states);

/// Convenience overload projecting `believed_facts` through every goal.
ObservationUpdate observe_action(const IntentionModel& model, const IntentionPosterior& prior,
                                 std::size_t observed_action, const FactBase& believed_facts);

struct HelpDecision {
  bool adopt{false};
  std::string goal;

  bool operator==(const HelpDecision&) const = default;
};

HelpDecision decide_help(const IntentionPosterior& posterior, double threshold,
                         const std::map<std::string, bool>& capability);

}  // namespace coact
