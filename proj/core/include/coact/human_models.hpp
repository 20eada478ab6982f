#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "coact/comm_act.hpp"
#include "coact/htn.hpp"
#include "coact/mental_state.hpp"
#include "coact/scenario.hpp"
#include "coact/world.hpp"

namespace coact {

/// What a simulated human sees when choosing its next action.
struct HumanView {
  const GridWorld* world{nullptr};
  const AgentMentalState* mental{nullptr};
  const std::vector<CommAct>* inbox{nullptr};  // acts delivered since the last decision
  EntityId self;
  EntityId robot;
  Tick tick{0};
};

struct HumanDecision {
  PrimitiveAction action;
  std::vector<CommAct> comm;

  bool operator==(const HumanDecision&) const = default;
};

class HumanPolicy {
 public:
  virtual ~HumanPolicy() = default;
  virtual HumanDecision decide(const HumanView& view) = 0;
  virtual std::string name() const = 0;
};

/// Uniform double in [0, 1) from the raw 53 high bits of the engine output.
double unit_draw(std::mt19937_64& rng);

/// Accepts proposals, performs requested steps it knows how to do, comes to
/// the robot for handovers and answers gaze signals with gaze.
class CooperativeHuman : public HumanPolicy {
 public:
  explicit CooperativeHuman(const HtnDomain* domain) : domain_(domain) {}
  HumanDecision decide(const HumanView& view) override;
  std::string name() const override { return "Cooperative"; }

 protected:
  /// Plan responses for proposals in the inbox.
  virtual std::vector<CommAct> respond(const HumanView& view);
  PrimitiveAction act(const HumanView& view);

  const HtnDomain* domain_;
};

/// Cooperative, except that each tick it idles with probability p.
class DistractedHuman : public CooperativeHuman {
 public:
  DistractedHuman(const HtnDomain* domain, double p, std::uint64_t seed)
      : CooperativeHuman(domain), p_(p), rng_(seed) {}
  HumanDecision decide(const HumanView& view) override;
  std::string name() const override { return "Distracted"; }

 private:
  double p_;
  std::mt19937_64 rng_;
};

/// Rejects the first proposal, refusing the given task patterns for itself.
class ReluctantHuman : public CooperativeHuman {
 public:
  ReluctantHuman(const HtnDomain* domain, std::vector<std::string> refuse)
      : CooperativeHuman(domain), refuse_(std::move(refuse)) {}
  std::string name() const override { return "Reluctant"; }

 protected:
  std::vector<CommAct> respond(const HumanView& view) override;

 private:
  std::vector<std::string> refuse_;
  bool rejected_{false};
};

/// Plays a fixed action list, then waits. Accepts every proposal.
class ScriptedHuman : public HumanPolicy {
 public:
  explicit ScriptedHuman(std::vector<PrimitiveAction> script) : script_(std::move(script)) {}
  HumanDecision decide(const HumanView& view) override;
  std::string name() const override { return "Scripted"; }

 private:
  std::vector<PrimitiveAction> script_;
  std::size_t next_{0};
};

/// Source of decisions for an externally driven human.
class HumanDriver {
 public:
  virtual ~HumanDriver() = default;
  /// nullopt means no input arrived; the human waits.
  virtual std::optional<HumanDecision> next(const HumanView& view) = 0;
};

class InteractiveHuman : public HumanPolicy {
 public:
  explicit InteractiveHuman(std::shared_ptr<HumanDriver> driver) : driver_(std::move(driver)) {}
  HumanDecision decide(const HumanView& view) override;
  std::string name() const override { return "Interactive"; }

 private:
  std::shared_ptr<HumanDriver> driver_;
};

/// Seed of a human's private generator, derived from the run seed.
std::uint64_t human_seed(std::uint64_t run_seed, const HumanSpec& spec);

/// Policy for a scenario human. Interactive humans need a driver.
std::unique_ptr<HumanPolicy> make_human_policy(const Scenario& scenario, const HumanSpec& spec,
                                               std::uint64_t run_seed,
                                               std::shared_ptr<HumanDriver> driver = nullptr);

}  // namespace coact
