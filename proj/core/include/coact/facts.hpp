#pragma once

#include <compare>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "coact/world.hpp"

namespace coact {

enum class PredKind {
  isIn,
  isOn,
  isNextTo,
  isHolding,
  canSee,
  canReach,
  isLookingAt,
  isPointingAt,
  isMovingToward,
  prop,
  // Meta predicates used only for plan bookkeeping in mental states.
  stepStatus,
  isAwareOf,
};

struct Predicate {
  PredKind kind{PredKind::isIn};
  std::string name;  // prop name; empty for built-ins

  static Predicate builtin(PredKind k) { return Predicate{k, {}}; }
  static Predicate prop(std::string name) { return Predicate{PredKind::prop, std::move(name)}; }
  /// Built-in names map to their kind, anything else is a state property.
  static Predicate from_name(std::string_view name);

  std::string to_string() const;
  /// At most one object per subject.
  bool functional() const noexcept;
  /// Stored in belief bases and compared for divergences.
  bool observable() const noexcept;

  auto operator<=>(const Predicate&) const = default;
};

/// subject / predicate / object triple stamped with its derivation tick.
/// Ordering and equality ignore the tick.
struct Fact {
  EntityId subject;
  Predicate predicate;
  std::string object;
  Tick tick{0};

  std::string to_string() const;
  static Fact parse(std::string_view text, Tick tick = 0);

  bool operator==(const Fact& o) const {
    return subject == o.subject && predicate == o.predicate && object == o.object;
  }
  bool operator<(const Fact& o) const {
    return std::tie(subject, predicate, object) < std::tie(o.subject, o.predicate, o.object);
  }
};

inline constexpr std::string_view kTrue = "TRUE";
inline constexpr std::string_view kFalse = "FALSE";

class FactBase {
 public:
  FactBase() = default;
  explicit FactBase(Tick tick) : tick_(tick) {}

  Tick tick() const noexcept { return tick_; }
  const std::set<Fact>& facts() const noexcept { return facts_; }
  std::size_t size() const noexcept { return facts_.size(); }
  bool empty() const noexcept { return facts_.empty(); }

  void insert(EntityId subject, Predicate pred, std::string object);
  bool contains(const EntityId& subject, const Predicate& pred, const std::string& object) const;
  bool contains(std::string_view fact_text) const;
  /// Object of a functional predicate, if present.
  std::optional<std::string> value_of(const EntityId& subject, const Predicate& pred) const;
  std::vector<std::string> objects_of(const EntityId& subject, const Predicate& pred) const;

  std::vector<std::string> strings() const;

  bool operator==(const FactBase& o) const { return facts_ == o.facts_; }

 private:
  Tick tick_{0};
  std::set<Fact> facts_;
};

/// Derives the complete fact base of `world`. `history` holds earlier worlds,
/// oldest first; motion facts need at least two of them.
FactBase assess(const GridWorld& world, std::span<const GridWorld> history = {});

struct FactDiff {
  std::vector<Fact> added;
  std::vector<Fact> removed;

  bool empty() const noexcept { return added.empty() && removed.empty(); }
};

FactDiff diff(const FactBase& before, const FactBase& after);

/// Number of ticks after a PointAt during which isPointingAt persists.
inline constexpr Tick kPointingPersistence = 3;
/// Worlds (current included) needed for isMovingToward.
inline constexpr std::size_t kMotionWindow = 3;
/// Half-width of the isLookingAt cone.
inline constexpr double kLookingHalfAngle = 22.5;

bool can_see(const GridWorld& world, const Agent& viewer, Cell target);

}  // namespace coact
