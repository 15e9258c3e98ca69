#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "labflow/core/rng.hpp"
#include "labflow/exec/executor.hpp"
#include "labflow/knowledge/knowledge_base.hpp"
#include "labflow/orchestrator/config.hpp"
#include "labflow/orchestrator/events.hpp"
#include "labflow/protocol/types.hpp"
#include "labflow/verify/verifier.hpp"
#include "labflow/world/robot_state.hpp"
#include "labflow/world/scenario.hpp"
#include "labflow/world/world_state.hpp"

namespace labflow::orch {

enum class SubtaskStatus { kPending, kPreCheck, kExecuting, kPostCheck, kDone, kSuspended, kAborted };

std::string_view status_name(SubtaskStatus status);
std::optional<SubtaskStatus> parse_status(std::string_view name);
bool transition_allowed(SubtaskStatus from, SubtaskStatus to);

enum class DecisionKind { kProceed, kReorder, kReverify, kRetry, kEscalate, kAbort };

std::string_view decision_kind_name(DecisionKind kind);

struct SchedulingDecision {
  DecisionKind kind = DecisionKind::kProceed;
  std::optional<int> front_id;  // set for kReorder
  std::string rationale;
};

struct Suspension {
  int subtask_id = 0;
  verify::CheckPhase phase = verify::CheckPhase::kPre;
  std::string reason;
};

struct SystemState {
  std::string run_id;
  SystemConfig config;
  protocol::TaskPlan plan;
  std::string scenario_name;
  std::vector<Condition> expected_final;
  world::WorldState world;
  world::RobotState robot;

  std::vector<int> order;  // execution order of subtask ids
  std::map<int, SubtaskStatus> subtask_status;
  std::map<int, int> retry_counts;
  std::map<int, int> pre_attempts;  // pre-verifications in the current check
  std::map<int, int> executions;
  std::set<int> reorder_used;
  std::set<int> forced_retry_used;
  std::optional<Suspension> suspension;

  Rng verify_rng;
  Rng exec_rng;
  RunRecord record;

  std::uint64_t event_seq() const { return record.events.size(); }
  bool finished() const { return record.final_status && *record.final_status != FinalStatus::kSuspended; }
  const protocol::SubtaskUnit& subtask(int id) const;
};

struct Backends {
  std::shared_ptr<const knowledge::KnowledgeBase> kb;
  std::shared_ptr<verify::VerifierBackend> verifier;
  std::shared_ptr<exec::ExecutorBackend> executor;
};

// Local or remote backends per the config's model selection.
Backends make_backends(const SystemConfig& cfg, std::shared_ptr<const knowledge::KnowledgeBase> kb);
protocol::ParserConfig parser_config(const SystemConfig& cfg);

std::string new_run_id();

// Parses and validates the plan, then builds the initial state with every
// subtask pending. ParseError, ValidationFatal, BackendError.
SystemState init_system(const protocol::Protocol& protocol, const SystemConfig& cfg, const world::Scenario& scenario,
                        const knowledge::KnowledgeBase& kb, std::optional<std::string> run_id = std::nullopt);
// Same, starting from an already parsed plan.
SystemState init_system_with_plan(protocol::TaskPlan plan, const SystemConfig& cfg, const world::Scenario& scenario,
                                  const knowledge::KnowledgeBase& kb, std::optional<std::string> run_id = std::nullopt);

// Returns the plan with subtasks listed in `ids` order; ids are kept.
protocol::TaskPlan permute_plan(const protocol::TaskPlan& plan, const std::vector<int>& ids);

// Reorder when a pending subtask's postcondition equals the failed
// precondition (once per subtask), else reverify on the first attempt,
// else escalate.
SchedulingDecision handle_pre_failure(const SystemState& state, int subtask_id, const verify::Verdict& verdict, int attempt);
// Retry while retry_counts[id] <= max_retries, else escalate.
SchedulingDecision handle_post_failure(const SystemState& state, int subtask_id, const verify::Verdict& verdict);

// Drives the loop until completion, abort or suspension. Every step appends
// one event to state.record and notifies `observer`.
RunRecord run_workflow(SystemState& state, const Backends& backends, const EventObserver& observer = {});

enum class InterventionKind { kResumeRetry, kSkipSubtask, kReorder, kAbort };

std::string_view intervention_kind_name(InterventionKind kind);

struct Intervention {
  InterventionKind kind = InterventionKind::kResumeRetry;
  std::optional<int> front_id;
};

// {"decision": "resume_retry"|"skip_subtask"|"reorder"|"abort", "front_id": int}
Intervention intervention_from_json(const Json& j);

// NoSuspendedSubtask, InvalidReorderTarget. Call run_workflow afterwards to
// continue a resumed run.
SystemState& submit_intervention(SystemState& state, const Intervention& decision, const std::string& operator_name,
                                 const EventObserver& observer = {});

// Full state including rng positions, for persisting suspended runs.
Json state_to_json(const SystemState& state);
SystemState state_from_json(const Json& j);

}  // namespace labflow::orch
