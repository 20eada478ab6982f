#pragma once

#include <nlohmann/json.hpp>

#include "coact/comm_act.hpp"
#include "coact/htn.hpp"
#include "coact/human_models.hpp"
#include "coact/session.hpp"
#include "coact/world.hpp"

namespace coact {

using nlohmann::json;

json to_json(const Event& e);
Event event_from_json(const json& j);

json to_json(const CommAct& act);
CommAct comm_from_json(const json& j);

json to_json(const NegotiationConstraints& c);
NegotiationConstraints constraints_from_json(const json& j);

json to_json(const SharedPlan& plan);
json to_json(const HumanDecision& d);
HumanDecision decision_from_json(const json& j);

json to_json(const TickRecord& rec);
json to_json(const RunReport& report);

/// Full world snapshot: grid, agents and objects.
json to_json(const GridWorld& world);

}  // namespace coact
