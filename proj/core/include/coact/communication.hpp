#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coact/facts.hpp"
#include "coact/mental_state.hpp"

namespace coact {

/// Static vocabulary shared by speaker and addressee.
struct ReferenceContext {
  std::map<EntityId, std::string> types;  // entity id -> type label
  std::set<std::string> props;            // declared state properties

  static ReferenceContext from_world(const GridWorld& world);
};

struct ReferringExpression {
  std::string type_label;
  std::vector<std::pair<Predicate, std::string>> constraints;

  bool operator==(const ReferringExpression&) const = default;
};

struct Resolution {
  enum class Kind { unique, ambiguous, none };
  Kind kind{Kind::none};
  std::vector<EntityId> candidates;  // sorted

  bool operator==(const Resolution&) const = default;
};

class ReferenceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Entities of the expression's type whose believed facts satisfy every constraint.
Resolution resolve_reference(const ReferringExpression& expr, const BeliefBase& speaker_beliefs,
                             const ReferenceContext& ctx);

/// Greedy smallest description that singles out `entity` in the addressee's
/// beliefs: type first, then isOn / isIn, isNextTo a uniquely typed landmark,
/// then state properties. nullopt when no discriminating set exists.
std::optional<ReferringExpression> generate_reference(const EntityId& entity,
                                                      const BeliefBase& addressee_beliefs,
                                                      const ReferenceContext& ctx);

/// Narrows an ambiguous set with the speaker's pointing (first) and gaze
/// (second) targets; an empty intersection keeps the original set.
Resolution disambiguate_with_signal(const std::vector<EntityId>& candidates,
                                    const FactBase& speaker_signals, const EntityId& speaker);

}  // namespace coact
