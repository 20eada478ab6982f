#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "coact/htn.hpp"
#include "coact/intention.hpp"
#include "coact/mdp.hpp"
#include "coact/scenario.hpp"
#include "coact/world.hpp"
#include "support/oracles.hpp"

namespace coact::fixtures {

std::string scenario_path(const std::string& name);
Scenario load(const std::string& name);
nlohmann::json document(const std::string& name);

/// Grid from row strings: '#' blocks, every other character is looked up in
/// `legend`; '.' defaults to room ROOM.
GridWorld make_grid(const std::vector<std::string>& rows, std::map<char, CellInfo> legend = {});
Agent make_agent(const EntityId& id, AgentKind kind, Cell at, Heading heading = Heading::E);
/// Object on the cell, as a surface placement when the cell is a surface.
void add_object(GridWorld& world, const EntityId& id, const std::string& type, Cell at,
                std::map<std::string, std::string> props = {});

/// Random 5x5 world: walls, a KITCHEN table (workspace TABLE_WS) and LIVING
/// floor, agents ALICE BOB ROBOT and objects CUP MUG PLATE where space allows.
/// Every object declares isFull in {TRUE, FALSE}.
GridWorld random_world(std::mt19937_64& rng);

/// Corridor rooms W2 W1 C E1 E2. Two intentions: FETCH_MUG walks to the room
/// holding the mug, READ walks to E2. Actions are west, stay, east.
/// beta = 10, context "evening" prior {FETCH_MUG .45, READ .45, none .1}.
IntentionModel moved_mug_model();
/// Facts placing BOB and the mug in corridor rooms.
FactBase corridor_facts(const std::string& bob_room, const std::string& mug_room);

/// Goal A at the east end, goal B at the west end, uniform prior over A and B.
IntentionModel two_goal_corridor(double beta = 5.0);

/// Random intention network: 1-3 goals over 2-3 actions, MDPs of 2-4
/// states, two contexts and a random confusion matrix.
IntentionModel random_intention_model(std::mt19937_64& rng);

/// Random MDP with up to six states, a reachable goal and stochastic rows.
Mdp random_mdp(std::mt19937_64& rng);

/// Table-serving domain over one to three of MUG, CUP and PLATE, which start
/// on a shelf, a counter or a high shelf. Anyone may fetch; items on the high
/// shelf must first be lowered by the human. Costs, knowledge and the social
/// policy are random. Point `request.domain` at `domain` before planning.
struct RandomDomain {
  HtnDomain domain;
  PlanRequest request;
};
RandomDomain random_domain(std::mt19937_64& rng);

/// Planner request for the goal of a scenario from its initial state.
PlanRequest request_for(const Scenario& sc, const std::string& goal_id);

}  // namespace coact::fixtures
