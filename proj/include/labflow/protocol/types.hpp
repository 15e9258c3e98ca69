#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "labflow/core/vocabulary.hpp"

namespace labflow::protocol {

struct Protocol {
  std::string text;
  std::string source_id;
};

enum class IntentCategory { kLoading, kUnloading, kSorting, kDisposal, kTwisting, kPouring, kOther };

std::string_view category_name(IntentCategory category);
std::optional<IntentCategory> parse_category(std::string_view name);

struct Intent {
  std::string goal;
  IntentCategory category = IntentCategory::kOther;

  friend bool operator==(const Intent&, const Intent&) = default;
};

// Deduplicated, lowercase entity mentions.
struct EntitySet {
  std::vector<std::string> equipment;
  std::vector<std::string> consumables;
  std::vector<std::string> targets;
  std::vector<std::string> locations;

  bool empty() const { return equipment.empty() && consumables.empty() && targets.empty() && locations.empty(); }
  friend bool operator==(const EntitySet&, const EntitySet&) = default;
};

struct SubtaskUnit {
  int id = 0;
  std::string instruction;
  Condition precondition;
  Condition postcondition;
  std::string knowledge_index;
  AtomicAction action;
  EntitySet entities;

  friend bool operator==(const SubtaskUnit&, const SubtaskUnit&) = default;
};

struct TaskPlan {
  Intent intent;
  std::vector<SubtaskUnit> subtasks;
  // Plan-level flags such as "capability:bimanual"; serialized only when present.
  std::vector<std::string> tags;
  // Verbatim structured output the plan was read from.
  std::string raw_parser_output;

  const SubtaskUnit* find(int id) const;
  friend bool operator==(const TaskPlan&, const TaskPlan&) = default;
};

inline constexpr std::string_view kBimanualTag = "capability:bimanual";

enum class ParserBackend { kRuleBased, kRemote };

// The six rule sections of the protocol-parsing prompt, sent to remote
// backends as one combined template.
struct PromptSet {
  std::string role;
  std::string intent;
  std::string entities;
  std::string action_space;
  std::string granularity;
  std::string output_rules;

  static PromptSet defaults();
};

struct ParserConfig {
  ParserBackend backend = ParserBackend::kRuleBased;
  PromptSet prompt_set = PromptSet::defaults();
  std::optional<std::string> remote_endpoint;
  std::vector<ActionKind> action_vocabulary{kAllActionKinds.begin(), kAllActionKinds.end()};
  int timeout_seconds = 30;

  bool allows(ActionKind kind) const;
};

// Normative external schema. Field order is fixed so serialization of the
// same plan is byte-identical.
Json to_json(const TaskPlan& plan);
Json to_json(const SubtaskUnit& subtask);
Json to_json(const EntitySet& entities);

// Validates a structured document against the plan schema: SchemaError on
// any violation, including kinds outside `vocabulary` and non-consecutive ids.
TaskPlan plan_from_json(const Json& j, const std::vector<ActionKind>& vocabulary);
TaskPlan plan_from_text(const std::string& text, const std::vector<ActionKind>& vocabulary);
SubtaskUnit subtask_from_json(const Json& j);

}  // namespace labflow::protocol
