#include "labflow/core/vocabulary.hpp"

#include <algorithm>

#include "labflow/core/errors.hpp"

namespace labflow {

std::string_view action_kind_name(ActionKind kind) {
  switch (kind) {
    case ActionKind::kOpenLid: return "OpenLid";
    case ActionKind::kCloseLid: return "CloseLid";
    case ActionKind::kPlace: return "Place";
    case ActionKind::kRemove: return "Remove";
    case ActionKind::kGrasp: return "Grasp";
    case ActionKind::kMove: return "Move";
    case ActionKind::kPressButton: return "PressButton";
    case ActionKind::kWait: return "Wait";
  }
  return "?";
}

std::optional<ActionKind> parse_action_kind(std::string_view name) {
  for (auto kind : kAllActionKinds) {
    if (action_kind_name(kind) == name) return kind;
  }
  return std::nullopt;
}

void check_action_shape(const AtomicAction& action) {
  const bool has_target = action.target && !action.target->empty();
  switch (action.kind) {
    case ActionKind::kWait:
      if (!action.subject.empty() || action.target) fail(ErrorCode::kSchema, "Wait takes neither subject nor target");
      return;
    case ActionKind::kPlace:
    case ActionKind::kMove:
      if (!has_target) fail(ErrorCode::kSchema, std::string(action_kind_name(action.kind)) + " requires a target");
      break;
    default:
      break;
  }
  if (action.subject.empty()) fail(ErrorCode::kSchema, std::string(action_kind_name(action.kind)) + " requires a subject");
  if (action.target && action.target->empty()) fail(ErrorCode::kSchema, "target must be null or non-empty");
}

std::string describe(const AtomicAction& action) {
  std::string out(action_kind_name(action.kind));
  out += "(";
  out += action.subject;
  if (action.target) out += " -> " + *action.target;
  out += ")";
  return out;
}

bool is_known_predicate(std::string_view name) {
  return std::find(kPredicateVocabulary.begin(), kPredicateVocabulary.end(), name) != kPredicateVocabulary.end();
}

std::optional<std::size_t> predicate_arity(std::string_view name) {
  if (name == "in" || name == "held") return 2;
  if (name == "always") return 0;
  if (is_known_predicate(name)) return 1;
  return std::nullopt;
}

std::string describe(const Condition& condition) {
  std::string out = condition.predicate + "(";
  for (std::size_t i = 0; i < condition.args.size(); ++i) {
    if (i) out += ", ";
    out += condition.args[i];
  }
  out += ") = ";
  out += condition.expected ? "true" : "false";
  return out;
}

Condition always_condition() { return Condition{"always", {}, true}; }

Json to_json(const AtomicAction& action) {
  Json j;
  j["kind"] = std::string(action_kind_name(action.kind));
  j["subject"] = action.subject.empty() ? Json(nullptr) : Json(action.subject);
  j["target"] = action.target ? Json(*action.target) : Json(nullptr);
  return j;
}

AtomicAction action_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::kSchema, "action must be an object");
  AtomicAction action;
  if (!j.contains("kind") || !j["kind"].is_string()) fail(ErrorCode::kSchema, "action.kind must be a string");
  auto kind = parse_action_kind(j["kind"].get<std::string>());
  if (!kind) fail(ErrorCode::kSchema, "action.kind '" + j["kind"].get<std::string>() + "' is not in the atomic action set");
  action.kind = *kind;
  auto field = [&](const char* name) -> std::optional<std::string> {
    if (!j.contains(name) || j[name].is_null()) return std::nullopt;
    if (!j[name].is_string()) fail(ErrorCode::kSchema, std::string("action.") + name + " must be string or null");
    return j[name].get<std::string>();
  };
  action.subject = field("subject").value_or("");
  action.target = field("target");
  check_action_shape(action);
  return action;
}

Json to_json(const Condition& condition) {
  Json j;
  j["predicate"] = condition.predicate;
  j["args"] = condition.args;
  j["expected"] = condition.expected;
  return j;
}

Condition condition_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::kSchema, "condition must be an object");
  if (!j.contains("predicate") || !j["predicate"].is_string()) fail(ErrorCode::kSchema, "condition.predicate must be a string");
  if (!j.contains("args") || !j["args"].is_array()) fail(ErrorCode::kSchema, "condition.args must be an array");
  if (!j.contains("expected") || !j["expected"].is_boolean()) fail(ErrorCode::kSchema, "condition.expected must be a boolean");
  Condition c;
  c.predicate = j["predicate"].get<std::string>();
  for (const auto& a : j["args"]) {
    if (!a.is_string()) fail(ErrorCode::kSchema, "condition.args entries must be strings");
    c.args.push_back(a.get<std::string>());
  }
  c.expected = j["expected"].get<bool>();
  return c;
}

}  // namespace labflow
