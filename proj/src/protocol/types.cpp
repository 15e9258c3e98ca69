#include "labflow/protocol/types.hpp"

#include <algorithm>
#include <set>

#include "labflow/core/errors.hpp"
#include "labflow/core/json_io.hpp"

namespace labflow::protocol {

std::string_view category_name(IntentCategory category) {
  switch (category) {
    case IntentCategory::kLoading: return "loading";
    case IntentCategory::kUnloading: return "unloading";
    case IntentCategory::kSorting: return "sorting";
    case IntentCategory::kDisposal: return "disposal";
    case IntentCategory::kTwisting: return "twisting";
    case IntentCategory::kPouring: return "pouring";
    case IntentCategory::kOther: return "other";
  }
  return "other";
}

std::optional<IntentCategory> parse_category(std::string_view name) {
  for (auto c : {IntentCategory::kLoading, IntentCategory::kUnloading, IntentCategory::kSorting, IntentCategory::kDisposal,
                 IntentCategory::kTwisting, IntentCategory::kPouring, IntentCategory::kOther}) {
    if (category_name(c) == name) return c;
  }
  return std::nullopt;
}

const SubtaskUnit* TaskPlan::find(int id) const {
  for (const auto& s : subtasks) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

PromptSet PromptSet::defaults() {
  PromptSet p;
  p.role =
      "You are an embodied-intelligence protocol parsing expert for biological laboratory automation. "
      "Read the protocol as instructions for a robotic manipulator working at a wet-lab bench.";
  p.intent = "Identify the high-level experimental intent and classify it as one of: loading, unloading, sorting, "
             "disposal, twisting, pouring, other.";
  p.entities = "List the laboratory equipment, consumables, target objects and location references mentioned.";
  p.action_space =
      "Map every action predicate to exactly one atomic action from this closed set: {vocabulary}. Never invent "
      "actions outside the set; discarding is Place with target trash_bin.";
  p.granularity = "Emit one subtask per atomic action. Each subtask states its instruction, the precondition that "
                  "must hold before execution and the completion condition that must hold afterwards.";
  p.output_rules =
      "Reply with JSON only: {\"intent\":{\"goal\":str,\"category\":str},\"subtasks\":[{\"id\":int,"
      "\"instruction\":str,\"action\":{\"kind\":str,\"subject\":str|null,\"target\":str|null},\"precondition\":"
      "{\"predicate\":str,\"args\":[str],\"expected\":bool},\"postcondition\":{...},\"knowledge_index\":str,"
      "\"entities\":{\"equipment\":[str],\"consumables\":[str],\"targets\":[str],\"locations\":[str]}}]}. "
      "Predicates: lid_open, in, cap_on, cap_tight, contains_liquid, discarded, held, always.";
  return p;
}

bool ParserConfig::allows(ActionKind kind) const {
  return std::find(action_vocabulary.begin(), action_vocabulary.end(), kind) != action_vocabulary.end();
}

Json to_json(const EntitySet& e) {
  Json j;
  j["equipment"] = e.equipment;
  j["consumables"] = e.consumables;
  j["targets"] = e.targets;
  j["locations"] = e.locations;
  return j;
}

Json to_json(const SubtaskUnit& s) {
  Json j;
  j["id"] = s.id;
  j["instruction"] = s.instruction;
  j["action"] = to_json(s.action);
  j["precondition"] = to_json(s.precondition);
  j["postcondition"] = to_json(s.postcondition);
  j["knowledge_index"] = s.knowledge_index;
  j["entities"] = to_json(s.entities);
  return j;
}

Json to_json(const TaskPlan& plan) {
  Json j;
  j["intent"] = Json{{"goal", plan.intent.goal}, {"category", std::string(category_name(plan.intent.category))}};
  j["subtasks"] = Json::array();
  for (const auto& s : plan.subtasks) j["subtasks"].push_back(to_json(s));
  if (!plan.tags.empty()) j["tags"] = plan.tags;
  return j;
}

namespace {

std::vector<std::string> string_array(const Json& j, const char* field, const std::string& where) {
  const auto& v = require(j, field, where);
  if (!v.is_array()) fail(ErrorCode::kSchema, where + "." + field + " must be an array");
  std::vector<std::string> out;
  for (const auto& s : v) {
    if (!s.is_string()) fail(ErrorCode::kSchema, where + "." + field + " must contain strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

Condition checked_condition(const Json& j, const std::string& where) {
  auto c = condition_from_json(j);
  auto arity = predicate_arity(c.predicate);
  if (!arity) fail(ErrorCode::kSchema, where + ": unknown predicate '" + c.predicate + "'");
  if (*arity != c.args.size()) fail(ErrorCode::kSchema, where + ": " + c.predicate + " takes " + std::to_string(*arity) + " args");
  return c;
}

}  // namespace

SubtaskUnit subtask_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::kSchema, "subtask must be an object");
  SubtaskUnit s;
  const auto& id = require(j, "id", "subtask");
  if (!id.is_number_integer()) fail(ErrorCode::kSchema, "subtask.id must be an integer");
  s.id = id.get<int>();
  const std::string where = "subtask " + std::to_string(s.id);
  s.instruction = require_string(j, "instruction", where);
  if (s.instruction.empty()) fail(ErrorCode::kSchema, where + ": instruction must be non-empty");
  s.action = action_from_json(require(j, "action", where));
  s.precondition = checked_condition(require(j, "precondition", where), where + ".precondition");
  s.postcondition = checked_condition(require(j, "postcondition", where), where + ".postcondition");
  s.knowledge_index = require_string(j, "knowledge_index", where);
  if (s.knowledge_index.empty()) fail(ErrorCode::kSchema, where + ": knowledge_index must be non-empty");
  const auto& e = require(j, "entities", where);
  s.entities.equipment = string_array(e, "equipment", where + ".entities");
  s.entities.consumables = string_array(e, "consumables", where + ".entities");
  s.entities.targets = string_array(e, "targets", where + ".entities");
  s.entities.locations = string_array(e, "locations", where + ".entities");
  return s;
}

TaskPlan plan_from_json(const Json& j, const std::vector<ActionKind>& vocabulary) {
  if (!j.is_object()) fail(ErrorCode::kSchema, "plan must be a JSON object");
  TaskPlan plan;
  const auto& intent = require(j, "intent", "plan");
  plan.intent.goal = require_string(intent, "goal", "intent");
  auto category = parse_category(require_string(intent, "category", "intent"));
  if (!category) fail(ErrorCode::kSchema, "intent.category is not a known category");
  plan.intent.category = *category;

  const auto& subtasks = require(j, "subtasks", "plan");
  if (!subtasks.is_array() || subtasks.empty()) fail(ErrorCode::kSchema, "plan.subtasks must be a non-empty array");
  std::set<int> ids;
  for (const auto& s : subtasks) {
    auto unit = subtask_from_json(s);
    if (std::find(vocabulary.begin(), vocabulary.end(), unit.action.kind) == vocabulary.end()) {
      fail(ErrorCode::kSchema, "subtask " + std::to_string(unit.id) + ": action kind " +
                                   std::string(action_kind_name(unit.action.kind)) + " is outside the configured vocabulary");
    }
    if (!ids.insert(unit.id).second) fail(ErrorCode::kSchema, "duplicate subtask id " + std::to_string(unit.id));
    plan.subtasks.push_back(std::move(unit));
  }
  if (*ids.begin() != 1 || *ids.rbegin() != static_cast<int>(ids.size())) {
    fail(ErrorCode::kSchema, "subtask ids must be consecutive from 1");
  }
  if (j.contains("tags")) plan.tags = string_array(j, "tags", "plan");
  return plan;
}

TaskPlan plan_from_text(const std::string& text, const std::vector<ActionKind>& vocabulary) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::kSchema, std::string("plan is not valid JSON: ") + e.what());
  }
  auto plan = plan_from_json(j, vocabulary);
  plan.raw_parser_output = text;
  return plan;
}

}  // namespace labflow::protocol
