#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "labflow/protocol/types.hpp"

namespace labflow::protocol {

// ParseError on blank text or when no action verb is recognized.
Intent extract_intent(const Protocol& protocol, const ParserConfig& cfg);

// Lexicon matches only; unknown nouns are dropped. Tube mentions imply their
// storage rack.
EntitySet extract_entities(const Protocol& protocol, const Intent& intent, const ParserConfig& cfg);

// Maps one verb phrase with its objects to an action from `vocabulary`.
// UnmappableAction when no table row matches or the kind is not allowed.
AtomicAction map_action(std::string_view predicate, const std::vector<ActionKind>& vocabulary);

// One entry per atomic step, in protocol order.
std::vector<std::string> segment_protocol(std::string_view text);

// ParseError, UnmappableAction; remote backend adds SchemaError, BackendError.
TaskPlan parse_protocol(const Protocol& protocol, const ParserConfig& cfg);

// Action kind of the first verb phrase in `text`, if any.
std::optional<ActionKind> classify_verb(std::string_view text);

// The combined prompt template sent to remote parser backends.
std::string build_parser_prompt(const ParserConfig& cfg);

}  // namespace labflow::protocol
