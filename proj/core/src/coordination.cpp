#include "coact/coordination.hpp"

#include <algorithm>

#include "coact/skills.hpp"

namespace coact {

std::string_view to_string(Engagement e) noexcept {
  switch (e) {
    case Engagement::engaged: return "engaged";
    case Engagement::distracted: return "distracted";
    case Engagement::disengaged: return "disengaged";
  }
  return "?";
}

std::string_view to_string(EngagementCue c) noexcept {
  switch (c) {
    case EngagementCue::lookingAt: return "lookingAt";
    case EngagementCue::movingToward: return "movingToward";
    case EngagementCue::idle: return "idle";
    case EngagementCue::movingAway: return "movingAway";
  }
  return "?";
}

std::string_view to_string(HandoverState::Phase p) noexcept {
  switch (p) {
    case HandoverState::Phase::approach: return "approach";
    case HandoverState::Phase::extend: return "extend";
    case HandoverState::Phase::waiting: return "waiting";
    case HandoverState::Phase::done: return "done";
    case HandoverState::Phase::aborted: return "aborted";
  }
  return "?";
}

EngagementCue observe_cue(const GridWorld& before, const GridWorld& after, const FactBase& facts,
                          const EntityId& human, const EntityId& robot) {
  if (facts.contains(human, Predicate::builtin(PredKind::isLookingAt), robot))
    return EngagementCue::lookingAt;
  if (facts.contains(human, Predicate::builtin(PredKind::isMovingToward), robot))
    return EngagementCue::movingToward;
  const Cell h0 = before.agent(human).position;
  const Cell h1 = after.agent(human).position;
  if (h0 == h1) return EngagementCue::idle;
  const Cell r = after.agent(robot).position;
  return euclidean(h1, r) < euclidean(h0, r) ? EngagementCue::movingToward : EngagementCue::movingAway;
}

EngagementBelief engagement_update(const EngagementParams& params, const EngagementBelief& belief,
                                   EngagementCue cue) {
  const double stay = params.stickiness;
  const double move = (1.0 - stay) / 2.0;
  EngagementBelief predicted{};
  for (std::size_t to = 0; to < 3; ++to)
    for (std::size_t from = 0; from < 3; ++from)
      predicted[to] += (from == to ? stay : move) * belief[from];
  EngagementBelief out{};
  double z = 0.0;
  const auto c = static_cast<std::size_t>(cue);
  for (std::size_t s = 0; s < 3; ++s) {
    out[s] = predicted[s] * params.likelihood[s][c];
    z += out[s];
  }
  if (!(z > 0.0)) return predicted;
  for (auto& p : out) p /= z;
  return out;
}

HandoverDecision handover_step(HandoverState& state, const EngagementParams& params,
                               const GridWorld& world, const EntityId& robot,
                               const EntityId& partner, const EntityId& object,
                               const EngagementBelief& engagement, Tick tick) {
  HandoverDecision d{PrimitiveAction::wait(), std::nullopt};
  if (state.finished()) return d;
  const Agent& r = world.agent(robot);
  const Agent& p = world.agent(partner);
  if (p.holding == object) {
    state.phase = HandoverState::Phase::done;
    return d;
  }
  if (r.holding != object) {
    const bool loose = world.is_object(object) &&
                       world.object(object).placement.kind != Placement::Kind::held_by;
    if (state.phase == HandoverState::Phase::approach && loose) {
      d.action = skill_action(world, robot, SkillSpec{"pick", {{"object", object}}});
      return d;
    }
    state.phase = HandoverState::Phase::aborted;
    state.abort_reason = "OBJECT_LOST";
    return d;
  }
  const auto dis = static_cast<std::size_t>(Engagement::disengaged);
  const auto eng = static_cast<std::size_t>(Engagement::engaged);
  state.disengaged_streak = engagement[dis] > params.disengaged_threshold ? state.disengaged_streak + 1 : 0;
  if (state.disengaged_streak >= params.abort_ticks) {
    state.phase = HandoverState::Phase::aborted;
    state.abort_reason = "PARTNER_DISENGAGED";
    return d;
  }
  if (chebyshev(r.position, p.position) <= 1) {
    if (engagement[eng] > params.engaged_threshold) {
      state.phase = HandoverState::Phase::extend;
      d.action = PrimitiveAction::give(object, partner);
      return d;
    }
    state.phase = HandoverState::Phase::waiting;
  } else {
    state.phase = HandoverState::Phase::approach;
    auto h = next_move(world, robot, [&](Cell c) { return chebyshev(c, p.position) <= 1; });
    if (h) {
      d.action = PrimitiveAction::move(*h);
      return d;
    }
  }
  ++state.waiting_ticks;
  if (params.signal_period > 0 && state.waiting_ticks % params.signal_period == 0) {
    d.signal = CommAct::signal_act(robot, partner, ActionKind::LookAt, partner, tick);
    d.action = express(*d.signal);
  }
  return d;
}

std::string workspace_key(const GridWorld& world, Cell c) {
  if (!world.in_bounds(c)) return {};
  return world.cell(c).workspace;
}

SafetyVerdict safety_gate(const GridWorld& world, const EntityId& robot, const PrimitiveAction& action,
                          const std::set<std::string>& human_workspaces_last_tick,
                          const std::map<EntityId, PrimitiveAction>* human_actions_this_tick) {
  if (!action.is_manipulation()) return {};
  const auto target = manipulation_target(world, robot, action);
  if (!target) return {};
  const auto ws = workspace_key(world, *target);
  if (ws.empty()) return {};
  if (human_workspaces_last_tick.contains(ws))
    return {true, "human manipulated in " + ws + " last tick"};
  if (!human_actions_this_tick) return {};
  for (const auto& [id, a] : *human_actions_this_tick) {
    if (!world.is_agent(id) || world.agent(id).kind != AgentKind::human || !a.is_manipulation()) continue;
    const auto c = manipulation_target(world, id, a);
    if (c && workspace_key(world, *c) == ws) return {true, id + " is manipulating in " + ws};
  }
  return {};
}

PrimitiveAction express(const CommAct& signal) {
  return signal.signal == ActionKind::PointAt ? PrimitiveAction::point_at(signal.signal_target)
                                              : PrimitiveAction::look_at(signal.signal_target);
}

}  // namespace coact
