#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace coact {

struct Transition {
  std::size_t next{0};
  double prob{0.0};
};

/// Finite discounted MDP with absorbing goal states.
///
/// Non-goal states pay `step_cost` per step. A goal state earns
/// (1 - gamma) * goal_reward on every step of its self loop, so its value is
/// exactly `goal_reward`. `reward_offset` is added to every reward.
struct Mdp {
  std::vector<std::string> states;
  std::vector<std::string> actions;
  std::vector<std::vector<std::vector<Transition>>> transitions;  // [state][action]
  std::vector<bool> goal;
  double goal_reward{1.0};
  double step_cost{0.04};
  double gamma{0.95};
  double reward_offset{0.0};

  /// States with no outgoing transitions self-loop on every action.
  static Mdp with_states(std::vector<std::string> states, std::vector<std::string> actions);

  std::size_t num_states() const noexcept { return states.size(); }
  std::size_t num_actions() const noexcept { return actions.size(); }
  double reward(std::size_t state) const noexcept;

  std::size_t state_index(std::string_view name) const;
  std::size_t action_index(std::string_view name) const;

  void set_deterministic(std::size_t from, std::size_t action, std::size_t to);
  void mark_goal(std::size_t state);

  /// Throws MdpError on bad rows, non-absorbing goals or gamma outside [0, 1).
  void validate() const;
};

class MdpError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct QTable {
  std::vector<std::vector<double>> q;  // [state][action]
  std::size_t sweeps{0};
  double residual{0.0};  // max |dQ| of the last sweep

  double value(std::size_t state) const;
  /// argmax action, ties to the lowest index.
  std::size_t greedy(std::size_t state) const;
};

QTable value_iteration(const Mdp& mdp, double epsilon = 1e-6);

/// One Bellman backup of `q`; used to audit the residual contract.
QTable bellman_backup(const Mdp& mdp, const QTable& q);

/// Softmax over Q(state, .) with inverse temperature beta, max-subtracted.
std::vector<double> action_distribution(const QTable& q, std::size_t state, double beta);
double action_likelihood(const QTable& q, std::size_t state, std::size_t action, double beta);

}  // namespace coact
