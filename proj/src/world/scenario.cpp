#include "labflow/world/scenario.hpp"

#include "labflow/core/errors.hpp"
#include "labflow/core/json_io.hpp"

namespace labflow::world {

Scenario scenario_from_json(const Json& j) {
  Scenario s;
  s.name = require_string(j, "name", "scenario");
  s.protocol_text = j.value("protocol", "");
  Json world = Json::object();
  world["objects"] = j.value("objects", Json::array());
  world["predicates"] = j.value("predicates", Json::array());
  s.initial_world = world_from_json(world);
  for (const auto& c : j.value("expected_final", Json::array())) {
    auto cond = condition_from_json(c);
    if (!predicate_arity(cond.predicate)) {
      fail(ErrorCode::kUnknownPredicate, "expected_final uses unknown predicate '" + cond.predicate + "'");
    }
    s.expected_final.push_back(std::move(cond));
  }
  return s;
}

Json to_json(const Scenario& scenario) {
  Json world = to_json(scenario.initial_world);
  Json j;
  j["name"] = scenario.name;
  j["protocol"] = scenario.protocol_text;
  j["objects"] = world["objects"];
  j["predicates"] = world["predicates"];
  j["expected_final"] = Json::array();
  for (const auto& c : scenario.expected_final) j["expected_final"].push_back(to_json(c));
  return j;
}

Scenario load_scenario(const std::filesystem::path& path) { return scenario_from_json(read_json_file(path)); }

WorldState init_world(const Scenario& scenario) {
  WorldState w = scenario.initial_world;
  w.tick = 0;
  return w;
}

bool satisfies_all(const WorldState& world, const std::vector<Condition>& conditions) {
  for (const auto& c : conditions) {
    if (!eval_condition(world, c)) return false;
  }
  return true;
}

}  // namespace labflow::world
