#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace labflow {

using Json = nlohmann::ordered_json;

// The closed atomic action set every parsed step must map into.
enum class ActionKind { kOpenLid, kCloseLid, kPlace, kRemove, kGrasp, kMove, kPressButton, kWait };

inline constexpr std::array<ActionKind, 8> kAllActionKinds{
    ActionKind::kOpenLid, ActionKind::kCloseLid, ActionKind::kPlace,       ActionKind::kRemove,
    ActionKind::kGrasp,   ActionKind::kMove,     ActionKind::kPressButton, ActionKind::kWait};

std::string_view action_kind_name(ActionKind kind);
std::optional<ActionKind> parse_action_kind(std::string_view name);

struct AtomicAction {
  ActionKind kind = ActionKind::kWait;
  std::string subject;  // empty for Wait
  std::optional<std::string> target;

  friend bool operator==(const AtomicAction&, const AtomicAction&) = default;
};

// Throws Error(kSchema) when the action violates the per-kind arity rules.
void check_action_shape(const AtomicAction& action);
std::string describe(const AtomicAction& action);

// World predicates. `always` is a zero-arity constant used by steps that
// touch no object (Wait) and is never stored in a world.
inline constexpr std::array<std::string_view, 8> kPredicateVocabulary{
    "lid_open", "in", "cap_on", "cap_tight", "contains_liquid", "discarded", "held", "always"};

bool is_known_predicate(std::string_view name);
// Number of object arguments the predicate takes; nullopt if unknown.
std::optional<std::size_t> predicate_arity(std::string_view name);

struct Condition {
  std::string predicate;
  std::vector<std::string> args;
  bool expected = true;

  friend bool operator==(const Condition&, const Condition&) = default;
};

// "lid_open(centrifuge) = false"
std::string describe(const Condition& condition);
Condition always_condition();

Json to_json(const AtomicAction& action);
AtomicAction action_from_json(const Json& j);
Json to_json(const Condition& condition);
Condition condition_from_json(const Json& j);

// Canonical single-arm gripper name used in held(x, arm).
inline constexpr std::string_view kDefaultArm = "right";

}  // namespace labflow
