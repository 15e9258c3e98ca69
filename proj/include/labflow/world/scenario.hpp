#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "labflow/world/world_state.hpp"

namespace labflow::world {

struct Scenario {
  std::string name;
  WorldState initial_world;
  std::string protocol_text;
  std::vector<Condition> expected_final;
};

// SchemaError on unknown object kinds or references to undeclared objects;
// UnknownPredicate on predicates outside the vocabulary.
Scenario scenario_from_json(const Json& j);
Json to_json(const Scenario& scenario);
Scenario load_scenario(const std::filesystem::path& path);

// Deep copy of the scenario's initial world with tick reset to 0.
WorldState init_world(const Scenario& scenario);

bool satisfies_all(const WorldState& world, const std::vector<Condition>& conditions);

}  // namespace labflow::world
