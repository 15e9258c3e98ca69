#include "labflow/protocol/validate.hpp"

#include <algorithm>

namespace labflow::protocol {

std::string_view issue_kind_name(IssueKind kind) {
  switch (kind) {
    case IssueKind::kDanglingKnowledgeIndex: return "dangling_knowledge_index";
    case IssueKind::kUnknownPredicate: return "unknown_predicate";
    case IssueKind::kUnknownObject: return "unknown_object";
    case IssueKind::kOrdering: return "ordering";
    case IssueKind::kEmptyEntities: return "empty_entities";
  }
  return "unknown";
}

bool ValidationReport::has_errors() const {
  return std::any_of(issues.begin(), issues.end(), [](const auto& i) { return i.severity == Severity::kError; });
}

std::size_t ValidationReport::count(IssueKind kind) const {
  return static_cast<std::size_t>(std::count_if(issues.begin(), issues.end(), [&](const auto& i) { return i.kind == kind; }));
}

bool ValidationReport::flags(IssueKind kind, int subtask_id) const {
  return std::any_of(issues.begin(), issues.end(),
                     [&](const auto& i) { return i.kind == kind && i.subtask_id == subtask_id; });
}

ValidationReport validate_plan(const TaskPlan& plan, const knowledge::KnowledgeBase& kb, const world::WorldState& world) {
  ValidationReport report;
  auto add = [&](IssueKind kind, Severity sev, int id, std::string msg) {
    report.issues.push_back({kind, sev, id, std::move(msg)});
  };

  std::vector<Condition> established;
  for (const auto& s : plan.subtasks) {
    if (!kb.contains(s.knowledge_index)) {
      add(IssueKind::kDanglingKnowledgeIndex, Severity::kError, s.id, "knowledge index '" + s.knowledge_index + "' is not in the knowledge base");
    }
    bool known = true;
    for (const auto* c : {&s.precondition, &s.postcondition}) {
      auto arity = predicate_arity(c->predicate);
      if (!arity || *arity != c->args.size()) {
        known = false;
        add(IssueKind::kUnknownPredicate, Severity::kError, s.id, "condition " + describe(*c) + " uses an unknown predicate");
        continue;
      }
      for (std::size_t i = 0; i < c->args.size(); ++i) {
        bool arm_slot = c->predicate == "held" && i == 1;
        if (!arm_slot && !world.has_object(c->args[i])) {
          add(IssueKind::kUnknownObject, Severity::kWarning, s.id, "object '" + c->args[i] + "' is not in the world");
        }
      }
    }
    if (s.action.kind != ActionKind::kWait && s.entities.empty()) {
      add(IssueKind::kEmptyEntities, Severity::kWarning, s.id, "no entities recognized in '" + s.instruction + "'");
    }
    if (known) {
      bool initially = false;
      try {
        initially = world::eval_condition(world, s.precondition);
      } catch (const std::exception&) {
        initially = false;
      }
      bool earlier = std::find(established.begin(), established.end(), s.precondition) != established.end();
      if (!initially && !earlier) {
        add(IssueKind::kOrdering, Severity::kWarning, s.id,
            "precondition " + describe(s.precondition) + " is neither true initially nor established by an earlier subtask");
      }
    }
    established.push_back(s.postcondition);
  }
  return report;
}

Json to_json(const ValidationReport& report) {
  Json arr = Json::array();
  for (const auto& i : report.issues) {
    arr.push_back({{"kind", std::string(issue_kind_name(i.kind))},
                   {"severity", i.severity == Severity::kError ? "error" : "warning"},
                   {"subtask_id", i.subtask_id},
                   {"message", i.message}});
  }
  return arr;
}

}  // namespace labflow::protocol
