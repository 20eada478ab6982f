#include "coact/mdp.hpp"

#include <algorithm>
#include <cmath>

namespace coact {

Mdp Mdp::with_states(std::vector<std::string> states, std::vector<std::string> actions) {
  Mdp m;
  m.states = std::move(states);
  m.actions = std::move(actions);
  m.goal.assign(m.states.size(), false);
  m.transitions.resize(m.states.size());
  for (std::size_t s = 0; s < m.states.size(); ++s) {
    m.transitions[s].resize(m.actions.size());
    for (auto& row : m.transitions[s]) row = {Transition{s, 1.0}};
  }
  return m;
}

double Mdp::reward(std::size_t state) const noexcept {
  return (goal[state] ? (1.0 - gamma) * goal_reward : -step_cost) + reward_offset;
}

std::size_t Mdp::state_index(std::string_view name) const {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i] == name) return i;
  throw MdpError("unknown MDP state '" + std::string(name) + "'");
}

std::size_t Mdp::action_index(std::string_view name) const {
  for (std::size_t i = 0; i < actions.size(); ++i)
    if (actions[i] == name) return i;
  throw MdpError("unknown MDP action '" + std::string(name) + "'");
}

void Mdp::set_deterministic(std::size_t from, std::size_t action, std::size_t to) {
  transitions.at(from).at(action) = {Transition{to, 1.0}};
}

void Mdp::mark_goal(std::size_t state) {
  goal.at(state) = true;
  for (auto& row : transitions.at(state)) row = {Transition{state, 1.0}};
}

void Mdp::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw MdpError("discount must lie in [0, 1)");
  if (states.empty() || actions.empty()) throw MdpError("MDP needs states and actions");
  if (transitions.size() != states.size() || goal.size() != states.size())
    throw MdpError("transition table does not match state count");
  for (std::size_t s = 0; s < states.size(); ++s) {
    if (transitions[s].size() != actions.size())
      throw MdpError("transition row count mismatch in state '" + states[s] + "'");
    for (std::size_t a = 0; a < actions.size(); ++a) {
      double sum = 0.0;
      for (const auto& t : transitions[s][a]) {
        if (t.next >= states.size() || t.prob < 0.0)
          throw MdpError("bad transition in state '" + states[s] + "'");
        sum += t.prob;
        if (goal[s] && t.next != s && t.prob > 0.0)
          throw MdpError("goal state '" + states[s] + "' is not absorbing");
      }
      if (std::abs(sum - 1.0) > 1e-9)
        throw MdpError("transition row (" + states[s] + ", " + actions[a] + ") sums to " +
                       std::to_string(sum));
    }
  }
}

double QTable::value(std::size_t state) const {
  return *std::max_element(q.at(state).begin(), q.at(state).end());
}

std::size_t QTable::greedy(std::size_t state) const {
  const auto& row = q.at(state);
  return static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
}

QTable bellman_backup(const Mdp& mdp, const QTable& q) {
  QTable out;
  out.q.resize(mdp.num_states(), std::vector<double>(mdp.num_actions(), 0.0));
  std::vector<double> v(mdp.num_states());
  for (std::size_t s = 0; s < mdp.num_states(); ++s) v[s] = q.value(s);
  double residual = 0.0;
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
      double expect = 0.0;
      for (const auto& t : mdp.transitions[s][a]) expect += t.prob * v[t.next];
      out.q[s][a] = mdp.reward(s) + mdp.gamma * expect;
      residual = std::max(residual, std::abs(out.q[s][a] - q.q[s][a]));
    }
  }
  out.sweeps = q.sweeps + 1;
  out.residual = residual;
  return out;
}

QTable value_iteration(const Mdp& mdp, double epsilon) {
  mdp.validate();
  QTable q;
  q.q.resize(mdp.num_states(), std::vector<double>(mdp.num_actions(), 0.0));
  // Absorbing goals start at their closed-form value.
  for (std::size_t s = 0; s < mdp.num_states(); ++s)
    if (mdp.goal[s]) std::fill(q.q[s].begin(), q.q[s].end(), mdp.reward(s) / (1.0 - mdp.gamma));
  while (true) {
    q = bellman_backup(mdp, q);
    if (q.residual < epsilon) return q;
  }
}

std::vector<double> action_distribution(const QTable& q, std::size_t state, double beta) {
  const auto& row = q.q.at(state);
  const double top = *std::max_element(row.begin(), row.end());
  std::vector<double> p(row.size());
  double z = 0.0;
  for (std::size_t a = 0; a < row.size(); ++a) {
    p[a] = std::exp(beta * (row[a] - top));
    z += p[a];
  }
  for (auto& x : p) x /= z;
  return p;
}

double action_likelihood(const QTable& q, std::size_t state, std::size_t action, double beta) {
  return action_distribution(q, state, beta).at(action);
}

}  // namespace coact
