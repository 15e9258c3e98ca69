#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "labflow/knowledge/knowledge_base.hpp"
#include "labflow/protocol/types.hpp"
#include "labflow/world/world_state.hpp"

namespace labflow::protocol {

enum class IssueKind { kDanglingKnowledgeIndex, kUnknownPredicate, kUnknownObject, kOrdering, kEmptyEntities };
enum class Severity { kWarning, kError };

std::string_view issue_kind_name(IssueKind kind);

struct ValidationIssue {
  IssueKind kind;
  Severity severity;
  int subtask_id;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool has_errors() const;
  std::size_t count(IssueKind kind) const;
  bool flags(IssueKind kind, int subtask_id) const;
};

// Never throws. Dangling keys and unknown predicates are errors; ordering,
// unknown objects and empty entity sets are warnings because the
// orchestrator can still recover from them.
ValidationReport validate_plan(const TaskPlan& plan, const knowledge::KnowledgeBase& kb, const world::WorldState& world);

Json to_json(const ValidationReport& report);

}  // namespace labflow::protocol
