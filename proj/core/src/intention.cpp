#include "coact/intention.hpp"

#include <cmath>

namespace coact {

void IntentionModel::validate() const {
  if (!(beta > 0.0)) throw MdpError("rationality beta must be positive");
  if (actions.empty()) throw MdpError("intention model has no actions");
  for (const auto& g : goals) {
    if (g.id == kNoIntention) throw MdpError("goal id 'none' is reserved");
    if (g.mdp.actions != actions)
      throw MdpError("goal '" + g.id + "' does not share the action vocabulary");
    if (g.abstraction.size() != g.mdp.num_states())
      throw MdpError("goal '" + g.id + "' abstraction does not cover every state");
    g.mdp.validate();
  }
  for (const auto& [ctx, dist] : prior) {
    double sum = 0.0;
    for (const auto& [goal, p] : dist) {
      if (p < 0.0) throw MdpError("negative prior in context '" + ctx + "'");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw MdpError("prior of context '" + ctx + "' is not normalized");
  }
  if (!confusion.empty()) {
    if (confusion.size() != actions.size()) throw MdpError("confusion matrix size mismatch");
    for (std::size_t t = 0; t < actions.size(); ++t) {
      double sum = 0.0;
      for (std::size_t o = 0; o < actions.size(); ++o) sum += confusion[o].at(t);
      if (std::abs(sum - 1.0) > 1e-9) throw MdpError("confusion column does not sum to 1");
    }
  }
}

void IntentionModel::solve(double epsilon) {
  validate();
  for (auto& g : goals) g.q = value_iteration(g.mdp, epsilon);
}

double IntentionModel::confusion_prob(std::size_t observed, std::size_t truth) const {
  if (confusion.empty()) return observed == truth ? 1.0 : 0.0;
  return confusion.at(observed).at(truth);
}

std::size_t IntentionModel::action_index(const std::string& name) const {
  for (std::size_t i = 0; i < actions.size(); ++i)
    if (actions[i] == name) return i;
  throw MdpError("unknown intention action '" + name + "'");
}

std::optional<std::size_t> IntentionModel::project(std::size_t goal, const FactBase& facts) const {
  const auto& abs = goals.at(goal).abstraction;
  for (std::size_t s = 0; s < abs.size(); ++s) {
    bool all = true;
    for (const auto& f : abs[s])
      if (!facts.facts().contains(f)) {
        all = false;
        break;
      }
    if (all) return s;
  }
  return std::nullopt;
}

std::optional<std::size_t> IntentionModel::map_action(const std::string& primitive_wire) const {
  auto lookup = [&](const std::string& key) -> std::optional<std::size_t> {
    auto it = action_map.find(key);
    if (it == action_map.end()) return std::nullopt;
    return action_index(it->second);
  };
  if (auto a = lookup(primitive_wire)) return a;
  const auto space = primitive_wire.find(' ');
  if (space != std::string::npos)
    if (auto a = lookup(primitive_wire.substr(0, space))) return a;
  return lookup("*");
}

IntentionPosterior initial_posterior(const IntentionModel& model, const std::string& context) {
  IntentionPosterior p;
  for (const auto& g : model.goals) p[g.id] = 0.0;
  p[kNoIntention] = 0.0;
  auto it = model.prior.find(context);
  if (it == model.prior.end()) {
    const double u = 1.0 / static_cast<double>(model.goals.size() + 1);
    for (auto& [k, v] : p) v = u;
    return p;
  }
  for (const auto& [k, v] : it->second) p[k] = v;
  return p;
}

ObservationUpdate observe_action(const IntentionModel& model, const IntentionPosterior& prior,
                                 std::size_t observed_action,
                                 const std::vector<std::optional<std::size_t>>& believed_states) {
  const std::size_t n = model.actions.size();
  ObservationUpdate out;
  double uniform_obs = 0.0;
  for (std::size_t t = 0; t < n; ++t) uniform_obs += model.confusion_prob(observed_action, t);
  uniform_obs /= static_cast<double>(n);

  IntentionPosterior post;
  for (std::size_t g = 0; g < model.goals.size(); ++g) {
    const auto& goal = model.goals[g];
    if (!goal.q) throw MdpError("goal '" + goal.id + "' MDP is not solved");
    double like = uniform_obs;
    const auto s = g < believed_states.size() ? believed_states[g] : std::nullopt;
    if (s) {
      const auto dist = action_distribution(*goal.q, *s, model.beta);
      like = 0.0;
      for (std::size_t t = 0; t < n; ++t) like += model.confusion_prob(observed_action, t) * dist[t];
    } else {
      out.unmappable.push_back(goal.id);
    }
    auto it = prior.find(goal.id);
    post[goal.id] = (it == prior.end() ? 0.0 : it->second) * like;
  }
  auto none = prior.find(kNoIntention);
  post[kNoIntention] = (none == prior.end() ? 0.0 : none->second) * uniform_obs;

  double z = 0.0;
  for (const auto& [k, v] : post) z += v;
  if (!(z > 0.0)) {
    out.posterior = prior;  // observation impossible under every hypothesis
    return out;
  }
  for (auto& [k, v] : post) v /= z;
  out.posterior = std::move(post);
  return out;
}

ObservationUpdate observe_action(const IntentionModel& model, const IntentionPosterior& prior,
                                 std::size_t observed_action, const FactBase& believed_facts) {
  std::vector<std::optional<std::size_t>> states;
  for (std::size_t g = 0; g < model.goals.size(); ++g)
    states.push_back(model.project(g, believed_facts));
  return observe_action(model, prior, observed_action, states);
}

HelpDecision decide_help(const IntentionPosterior& posterior, double threshold,
                         const std::map<std::string, bool>& capability) {
  const std::string* best = nullptr;
  double best_p = -1.0;
  for (const auto& [goal, p] : posterior) {  // map order = lexicographic tie-break
    if (goal == kNoIntention) continue;
    if (p > best_p) {
      best = &goal;
      best_p = p;
    }
  }
  if (!best || !(best_p > threshold)) return {};
  auto cap = capability.find(*best);
  if (cap == capability.end() || !cap->second) return {};
  return {true, *best};
}

}  // namespace coact
