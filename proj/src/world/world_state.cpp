#include "labflow/world/world_state.hpp"

#include <stdexcept>

#include "labflow/core/errors.hpp"
#include "labflow/core/json_io.hpp"

namespace labflow::world {

std::string_view object_kind_name(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::kCentrifuge: return "centrifuge";
    case ObjectKind::kWaterBath: return "water_bath";
    case ObjectKind::kTube15ml: return "tube_15ml";
    case ObjectKind::kCryotube: return "cryotube_1_8ml";
    case ObjectKind::kTubeRackOrange: return "tube_rack_orange";
    case ObjectKind::kCryoRackRed: return "cryo_rack_red";
    case ObjectKind::kFloat: return "float";
    case ObjectKind::kSerumBottle: return "serum_bottle";
    case ObjectKind::kTrashBin: return "trash_bin";
  }
  return "?";
}

std::optional<ObjectKind> parse_object_kind(std::string_view name) {
  for (auto kind : kAllObjectKinds) {
    if (object_kind_name(kind) == name) return kind;
  }
  return std::nullopt;
}

bool has_lid(ObjectKind kind) { return kind == ObjectKind::kCentrifuge || kind == ObjectKind::kWaterBath; }

bool is_transparent(ObjectKind kind) {
  return kind == ObjectKind::kTube15ml || kind == ObjectKind::kCryotube || kind == ObjectKind::kSerumBottle;
}

bool is_movable(ObjectKind kind) {
  return kind == ObjectKind::kTube15ml || kind == ObjectKind::kCryotube || kind == ObjectKind::kFloat;
}

void WorldState::add_object(const std::string& name, ObjectKind kind) {
  objects[name] = LabObject{name, kind, is_transparent(kind)};
}

bool WorldState::has_object(std::string_view name) const { return objects.find(std::string(name)) != objects.end(); }

const LabObject& WorldState::object(std::string_view name) const {
  auto it = objects.find(std::string(name));
  if (it == objects.end()) fail(ErrorCode::kPreconditionViolated, "no object named '" + std::string(name) + "'");
  return it->second;
}

bool WorldState::holds(const std::string& predicate, const std::vector<std::string>& args) const {
  auto it = predicates.find(Fact{predicate, args});
  return it != predicates.end() && it->second;
}

void WorldState::set(const std::string& predicate, const std::vector<std::string>& args, bool value) {
  if (!is_known_predicate(predicate) || predicate == "always") {
    fail(ErrorCode::kUnknownPredicate, "'" + predicate + "' is not a world predicate");
  }
  if (args.size() != *predicate_arity(predicate)) {
    fail(ErrorCode::kSchema, predicate + " takes " + std::to_string(*predicate_arity(predicate)) + " arguments");
  }
  if (value) {
    predicates[Fact{predicate, args}] = true;
  } else {
    predicates.erase(Fact{predicate, args});
  }
}

std::optional<std::string> WorldState::location_of(const std::string& name) const {
  for (const auto& [fact, value] : predicates) {
    if (value && fact.predicate == "in" && fact.args[0] == name) return fact.args[1];
  }
  return std::nullopt;
}

void WorldState::clear_placement(const std::string& name) {
  for (auto it = predicates.begin(); it != predicates.end();) {
    const auto& f = it->first;
    if ((f.predicate == "in" || f.predicate == "held") && f.args[0] == name) {
      it = predicates.erase(it);
    } else {
      ++it;
    }
  }
}

void WorldState::check_invariants() const {
  std::map<std::string, int> locations;
  for (const auto& [fact, value] : predicates) {
    if (!value) continue;
    if (!is_known_predicate(fact.predicate) || fact.predicate == "always") {
      throw std::logic_error("predicate outside vocabulary: " + fact.predicate);
    }
    if (fact.predicate == "in" && ++locations[fact.args[0]] > 1) {
      throw std::logic_error("object in more than one location: " + fact.args[0]);
    }
  }
  for (const auto& [fact, value] : predicates) {
    if (!value || fact.predicate != "discarded") continue;
    const auto& x = fact.args[0];
    for (const auto& [other, v] : predicates) {
      if (v && (other.predicate == "in" || other.predicate == "held") && other.args[0] == x) {
        throw std::logic_error("discarded object still placed or held: " + x);
      }
    }
  }
}

bool eval_condition(const WorldState& world, const Condition& condition) {
  auto arity = predicate_arity(condition.predicate);
  if (!arity) fail(ErrorCode::kUnknownPredicate, "'" + condition.predicate + "' is not in the predicate vocabulary");
  if (condition.args.size() != *arity) {
    fail(ErrorCode::kUnknownPredicate, condition.predicate + " expects " + std::to_string(*arity) + " arguments");
  }
  if (condition.predicate == "always") return condition.expected;
  return world.holds(condition.predicate, condition.args) == condition.expected;
}

Json to_json(const WorldState& world) {
  Json j;
  j["tick"] = world.tick;
  j["objects"] = Json::array();
  for (const auto& [name, obj] : world.objects) {
    j["objects"].push_back(Json{{"name", name}, {"kind", std::string(object_kind_name(obj.kind))}});
  }
  j["predicates"] = Json::array();
  for (const auto& [fact, value] : world.predicates) {
    j["predicates"].push_back(Json{{"predicate", fact.predicate}, {"args", fact.args}, {"value", value}});
  }
  return j;
}

WorldState world_from_json(const Json& j) {
  WorldState world;
  if (j.contains("tick")) world.tick = j["tick"].get<std::uint64_t>();
  for (const auto& o : require(j, "objects", "world")) {
    auto kind_name = require_string(o, "kind", "world.objects");
    auto kind = parse_object_kind(kind_name);
    if (!kind) fail(ErrorCode::kSchema, "unknown object kind '" + kind_name + "'");
    world.add_object(require_string(o, "name", "world.objects"), *kind);
  }
  for (const auto& p : require(j, "predicates", "world")) {
    auto name = require_string(p, "predicate", "world.predicates");
    std::vector<std::string> args = require(p, "args", "world.predicates").get<std::vector<std::string>>();
    bool value = p.value("value", true);
    for (const auto& a : args) {
      if (name == "held" && &a == &args.back()) continue;  // second held() arg names an arm
      if (!world.has_object(a)) fail(ErrorCode::kSchema, name + " references unknown object '" + a + "'");
    }
    world.set(name, args, value);
  }
  return world;
}

}  // namespace labflow::world
