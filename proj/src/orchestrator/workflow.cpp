#include "labflow/orchestrator/workflow.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "labflow/core/errors.hpp"
#include "labflow/core/json_io.hpp"
#include "labflow/protocol/parser.hpp"
#include "labflow/protocol/validate.hpp"
#include "labflow/world/render.hpp"

namespace labflow::orch {

using verify::CheckPhase;

namespace {

constexpr std::pair<SubtaskStatus, std::string_view> kStatusNames[] = {
    {SubtaskStatus::kPending, "pending"},       {SubtaskStatus::kPreCheck, "pre_check"},
    {SubtaskStatus::kExecuting, "executing"},   {SubtaskStatus::kPostCheck, "post_check"},
    {SubtaskStatus::kDone, "done"},             {SubtaskStatus::kSuspended, "suspended"},
    {SubtaskStatus::kAborted, "aborted"},
};

}  // namespace

std::string_view status_name(SubtaskStatus status) {
  for (const auto& [s, n] : kStatusNames) {
    if (s == status) return n;
  }
  return "pending";
}

std::optional<SubtaskStatus> parse_status(std::string_view name) {
  for (const auto& [s, n] : kStatusNames) {
    if (n == name) return s;
  }
  return std::nullopt;
}

bool transition_allowed(SubtaskStatus from, SubtaskStatus to) {
  using S = SubtaskStatus;
  switch (from) {
    case S::kPending: return to == S::kPreCheck;
    case S::kPreCheck: return to == S::kExecuting || to == S::kPending || to == S::kSuspended || to == S::kAborted;
    case S::kExecuting: return to == S::kPostCheck;
    case S::kPostCheck: return to == S::kDone || to == S::kPreCheck || to == S::kSuspended || to == S::kAborted;
    case S::kSuspended: return to == S::kPreCheck || to == S::kPending || to == S::kAborted;
    case S::kDone:
    case S::kAborted: return false;
  }
  return false;
}

std::string_view decision_kind_name(DecisionKind kind) {
  switch (kind) {
    case DecisionKind::kProceed: return "proceed";
    case DecisionKind::kReorder: return "reorder";
    case DecisionKind::kReverify: return "reverify";
    case DecisionKind::kRetry: return "retry";
    case DecisionKind::kEscalate: return "escalate";
    case DecisionKind::kAbort: return "abort";
  }
  return "proceed";
}

std::string_view intervention_kind_name(InterventionKind kind) {
  switch (kind) {
    case InterventionKind::kResumeRetry: return "resume_retry";
    case InterventionKind::kSkipSubtask: return "skip_subtask";
    case InterventionKind::kReorder: return "reorder";
    case InterventionKind::kAbort: return "abort";
  }
  return "abort";
}

Intervention intervention_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::kSchema, "intervention must be a JSON object");
  auto name = require_string(j, "decision", "intervention");
  Intervention iv;
  if (name == "resume_retry") iv.kind = InterventionKind::kResumeRetry;
  else if (name == "skip_subtask") iv.kind = InterventionKind::kSkipSubtask;
  else if (name == "reorder") iv.kind = InterventionKind::kReorder;
  else if (name == "abort") iv.kind = InterventionKind::kAbort;
  else fail(ErrorCode::kSchema, "unknown intervention decision '" + name + "'");
  if (iv.kind == InterventionKind::kReorder) {
    const auto& f = require(j, "front_id", "intervention");
    if (!f.is_number_integer()) fail(ErrorCode::kSchema, "intervention front_id must be an integer");
    iv.front_id = f.get<int>();
  }
  return iv;
}

const protocol::SubtaskUnit& SystemState::subtask(int id) const {
  const auto* s = plan.find(id);
  if (!s) throw std::out_of_range("no subtask with id " + std::to_string(id));
  return *s;
}

protocol::ParserConfig parser_config(const SystemConfig& cfg) {
  protocol::ParserConfig p;
  p.backend = cfg.model_selection.llm.kind == "remote" ? protocol::ParserBackend::kRemote : protocol::ParserBackend::kRuleBased;
  p.remote_endpoint = cfg.model_selection.llm.endpoint;
  p.action_vocabulary = cfg.action_vocabulary;
  p.timeout_seconds = cfg.timeout_seconds;
  return p;
}

Backends make_backends(const SystemConfig& cfg, std::shared_ptr<const knowledge::KnowledgeBase> kb) {
  Backends b;
  b.kb = std::move(kb);
  const auto& vlm = cfg.model_selection.vlm;
  if (vlm.kind == "remote") {
    b.verifier = std::make_shared<verify::RemoteVerifier>(vlm.endpoint.value_or(""), cfg.timeout_seconds);
  } else {
    b.verifier = std::make_shared<verify::OracleVerifier>(cfg.noise_rate);
  }
  const auto& vla = cfg.model_selection.vla;
  if (vla.kind == "remote") {
    b.executor = std::make_shared<exec::RemotePolicy>(vla.endpoint.value_or(""), cfg.timeout_seconds);
  } else {
    b.executor = std::make_shared<exec::ScriptedExecutor>();
  }
  return b;
}

std::string new_run_id() {
  static thread_local std::mt19937_64 gen{std::random_device{}()};
  char buf[32];
  std::snprintf(buf, sizeof buf, "run-%016llx", static_cast<unsigned long long>(gen()));
  return buf;
}

SystemState init_system_with_plan(protocol::TaskPlan plan, const SystemConfig& cfg, const world::Scenario& scenario,
                                  const knowledge::KnowledgeBase& kb, std::optional<std::string> run_id) {
  cfg.validate();
  auto world = world::init_world(scenario);
  auto report = protocol::validate_plan(plan, kb, world);
  if (report.has_errors()) {
    std::string msg;
    for (const auto& issue : report.issues) {
      if (issue.severity != protocol::Severity::kError) continue;
      if (!msg.empty()) msg += "; ";
      msg += "subtask " + std::to_string(issue.subtask_id) + ": " + issue.message;
    }
    fail(ErrorCode::kValidationFatal, msg);
  }
  if (kb.empty() && !cfg.allow_empty_retrieval && !plan.subtasks.empty()) {
    fail(ErrorCode::kEmptyKnowledgeBase, "knowledge base is empty and empty retrieval is not allowed");
  }

  SystemState s;
  s.run_id = run_id.value_or(new_run_id());
  s.config = cfg;
  s.plan = std::move(plan);
  s.scenario_name = scenario.name;
  s.expected_final = scenario.expected_final;
  s.world = std::move(world);
  s.robot = cfg.manipulator;
  for (const auto& st : s.plan.subtasks) {
    s.order.push_back(st.id);
    s.subtask_status[st.id] = SubtaskStatus::kPending;
    s.retry_counts[st.id] = 0;
    s.pre_attempts[st.id] = 0;
    s.executions[st.id] = 0;
  }
  s.verify_rng = Rng(cfg.seed, 1);
  s.exec_rng = Rng(cfg.seed, 2);
  s.record.run_id = s.run_id;
  s.record.scenario = scenario.name;
  return s;
}

SystemState init_system(const protocol::Protocol& protocol, const SystemConfig& cfg, const world::Scenario& scenario,
                        const knowledge::KnowledgeBase& kb, std::optional<std::string> run_id) {
  cfg.validate();
  auto plan = protocol::parse_protocol(protocol, parser_config(cfg));
  return init_system_with_plan(std::move(plan), cfg, scenario, kb, std::move(run_id));
}

protocol::TaskPlan permute_plan(const protocol::TaskPlan& plan, const std::vector<int>& ids) {
  if (ids.size() != plan.subtasks.size()) throw std::invalid_argument("permutation must list every subtask once");
  protocol::TaskPlan out = plan;
  out.subtasks.clear();
  for (int id : ids) {
    const auto* s = plan.find(id);
    if (!s) throw std::invalid_argument("permutation names unknown subtask " + std::to_string(id));
    if (out.find(id)) throw std::invalid_argument("permutation repeats subtask " + std::to_string(id));
    out.subtasks.push_back(*s);
  }
  out.raw_parser_output = to_json(out).dump();
  return out;
}

SchedulingDecision handle_pre_failure(const SystemState& state, int subtask_id, const verify::Verdict& verdict, int attempt) {
  const auto& failed = state.subtask(subtask_id).precondition;
  if (!state.reorder_used.count(subtask_id)) {
    for (int other : state.order) {
      if (other == subtask_id) continue;
      auto it = state.subtask_status.find(other);
      if (it == state.subtask_status.end() || it->second != SubtaskStatus::kPending) continue;
      if (state.subtask(other).postcondition == failed) {
        return {DecisionKind::kReorder, other,
                "subtask " + std::to_string(other) + " establishes " + describe(failed)};
      }
    }
  }
  if (attempt <= 1) return {DecisionKind::kReverify, std::nullopt, "first precondition failure: " + verdict.reason};
  return {DecisionKind::kEscalate, std::nullopt, "precondition still failing after re-verification: " + verdict.reason};
}

SchedulingDecision handle_post_failure(const SystemState& state, int subtask_id, const verify::Verdict& verdict) {
  auto it = state.retry_counts.find(subtask_id);
  int rc = it == state.retry_counts.end() ? 0 : it->second;
  if (rc <= state.config.max_retries) {
    return {DecisionKind::kRetry, std::nullopt,
            "retry " + std::to_string(rc) + " of " + std::to_string(state.config.max_retries) + ": " + verdict.reason};
  }
  return {DecisionKind::kEscalate, std::nullopt, "retries exhausted: " + verdict.reason};
}

namespace {

class Runner {
 public:
  Runner(SystemState& s, const Backends& b, const EventObserver& observer) : s_(s), b_(b), observer_(observer) {}

  void emit(EventKind kind, Json payload) {
    Event e{s_.run_id, s_.event_seq() + 1, s_.world.tick, kind, std::move(payload)};
    s_.record.events.push_back(e);
    if (observer_) observer_(s_.record.events.back());
  }

  void set_status(int id, SubtaskStatus to) {
    auto& cur = s_.subtask_status.at(id);
    if (!transition_allowed(cur, to)) {
      throw std::logic_error("illegal status transition " + std::string(status_name(cur)) + " -> " + std::string(status_name(to)));
    }
    cur = to;
  }

  void finish(FinalStatus status) {
    int done = 0, aborted = 0;
    for (const auto& [id, st] : s_.subtask_status) {
      done += st == SubtaskStatus::kDone;
      aborted += st == SubtaskStatus::kAborted;
    }
    emit(EventKind::kRunFinished, Json{{"status", std::string(final_status_name(status))},
                                       {"done", done},
                                       {"aborted", aborted},
                                       {"total", s_.plan.subtasks.size()}});
    s_.record.final_status = status;
  }

  void start() {
    Json order = s_.order;
    emit(EventKind::kRunStarted, Json{{"scenario", s_.scenario_name},
                                      {"subtasks", s_.plan.subtasks.size()},
                                      {"order", order},
                                      {"seed", s_.config.seed},
                                      {"intervention_mode", std::string(intervention_mode_name(s_.config.intervention_mode))}});
  }

  void run() {
    if (s_.finished()) return;
    if (s_.record.events.empty()) start();
    while (true) {
      if (s_.suspension) {
        s_.record.final_status = FinalStatus::kSuspended;
        return;
      }
      if (s_.finished()) return;
      auto next = next_subtask();
      if (!next) {
        finish(FinalStatus::kCompleted);
        return;
      }
      step(*next);
    }
  }

  void escalate(int id, CheckPhase phase, const std::string& reason) {
    const auto mode = s_.config.intervention_mode;
    emit(EventKind::kEscalation, Json{{"subtask_id", id},
                                      {"phase", std::string(verify::phase_name(phase))},
                                      {"reason", reason},
                                      {"mode", std::string(intervention_mode_name(mode))}});
    switch (mode) {
      case InterventionMode::kAutoRetry:
        if (!s_.forced_retry_used.count(id)) {
          s_.forced_retry_used.insert(id);
          emit(EventKind::kDecision, Json{{"subtask_id", id},
                                          {"decision", "retry"},
                                          {"rationale", "automatic retry after escalation"},
                                          {"forced", true}});
          if (phase == CheckPhase::kPost) set_status(id, SubtaskStatus::kPreCheck);
          s_.pre_attempts[id] = 0;
          return;
        }
        [[fallthrough]];
      case InterventionMode::kAutoAbort:
        emit(EventKind::kDecision, Json{{"subtask_id", id}, {"decision", "abort"}, {"rationale", reason}});
        set_status(id, SubtaskStatus::kAborted);
        finish(FinalStatus::kAborted);
        return;
      case InterventionMode::kConsole:
      case InterventionMode::kApi:
        set_status(id, SubtaskStatus::kSuspended);
        s_.suspension = Suspension{id, phase, reason};
        s_.record.final_status = FinalStatus::kSuspended;
        return;
    }
  }

 private:
  std::optional<int> next_subtask() const {
    for (int id : s_.order) {
      auto st = s_.subtask_status.at(id);
      if (st == SubtaskStatus::kPending || st == SubtaskStatus::kPreCheck) return id;
    }
    return std::nullopt;
  }

  verify::Verdict check(int id, CheckPhase phase, int attempt) {
    const auto& st = s_.subtask(id);
    auto request = verify::build_request(st, phase);
    auto obs = world::render_observation(s_.world);
    knowledge::RetrievedSet retrieved;
    const auto query = verify::retrieval_query(request, s_.config.retrieval_keying);
    if (!b_.kb || b_.kb->empty()) {
      retrieved.query_echo = query;
    } else {
      retrieved = knowledge::retrieve_topk(*b_.kb, query, s_.config.retrieval_k);
    }
    auto input = verify::fuse_prompt(obs, s_.robot, request, retrieved, s_.config.allow_empty_retrieval);
    verify::VerifyContext ctx{&s_.world, &s_.verify_rng};
    verify::Verdict v;
    try {
      v = verify::verify(input, *b_.verifier, ctx, attempt);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kBackend) throw;
      v.passed = false;
      v.reason = std::string("verifier unavailable: ") + e.what();
      v.phase = phase;
      v.subtask_id = id;
      v.attempt = attempt;
    }
    Json keys = Json::array();
    for (const auto& e : retrieved.entries) keys.push_back(e.key);
    emit(phase == CheckPhase::kPre ? EventKind::kPreVerdict : EventKind::kPostVerdict,
         Json{{"subtask_id", id},
              {"attempt", attempt},
              {"passed", v.passed},
              {"reason", v.reason},
              {"condition", describe(request.condition)},
              {"knowledge", keys}});
    return v;
  }

  void step(int id) {
    if (s_.subtask_status.at(id) == SubtaskStatus::kPending) set_status(id, SubtaskStatus::kPreCheck);
    while (true) {
      int attempt = ++s_.pre_attempts[id];
      auto v = check(id, CheckPhase::kPre, attempt);
      if (v.passed) break;
      auto d = handle_pre_failure(s_, id, v, attempt);
      if (d.kind == DecisionKind::kReorder) {
        int front = *d.front_id;
        s_.reorder_used.insert(id);
        s_.order.erase(std::find(s_.order.begin(), s_.order.end(), front));
        s_.order.insert(std::find(s_.order.begin(), s_.order.end(), id), front);
        set_status(id, SubtaskStatus::kPending);
        s_.pre_attempts[id] = 0;
        Json order = s_.order;
        emit(EventKind::kReorder, Json{{"subtask_id", id}, {"front_id", front}, {"rationale", d.rationale}, {"order", order}});
        return;
      }
      if (d.kind == DecisionKind::kReverify) {
        emit(EventKind::kDecision, Json{{"subtask_id", id}, {"decision", "reverify"}, {"rationale", d.rationale}});
        continue;
      }
      escalate(id, CheckPhase::kPre, v.reason);
      return;
    }

    set_status(id, SubtaskStatus::kExecuting);
    const auto& st = s_.subtask(id);
    const int execution = ++s_.executions[id];
    Json payload{{"subtask_id", id}, {"attempt", execution}, {"action", describe(st.action)}};
    try {
      auto r = exec::execute(st, s_.world, s_.robot, *b_.executor, s_.config.success_prob, s_.exec_rng, s_.config.horizon);
      s_.world = std::move(r.world_after);
      s_.robot = std::move(r.robot_state_after);
      payload["succeeded"] = r.outcome.succeeded;
      payload["failure_mode"] =
          r.outcome.failure_mode ? Json(std::string(world::failure_mode_name(*r.outcome.failure_mode))) : Json(nullptr);
      payload["frames"] = r.chunk.actions.size();
    } catch (const Error& e) {
      // A noisy pre-check can admit an inapplicable action; treat it as an aborted motion.
      if (e.code() != ErrorCode::kPreconditionViolated && e.code() != ErrorCode::kBackend &&
          e.code() != ErrorCode::kUnknownInstruction) {
        throw;
      }
      payload["succeeded"] = false;
      payload["failure_mode"] = std::string(world::failure_mode_name(world::FailureMode::kCollisionAbort));
      payload["frames"] = 0;
      payload["error"] = e.what();
    }
    emit(EventKind::kExecution, std::move(payload));

    set_status(id, SubtaskStatus::kPostCheck);
    auto v = check(id, CheckPhase::kPost, execution);
    if (v.passed) {
      set_status(id, SubtaskStatus::kDone);
      emit(EventKind::kSubtaskDone, Json{{"subtask_id", id}});
      return;
    }
    auto& rc = s_.retry_counts[id];
    rc = std::min(rc + 1, s_.config.max_retries + 1);
    auto d = handle_post_failure(s_, id, v);
    if (d.kind == DecisionKind::kRetry) {
      emit(EventKind::kDecision, Json{{"subtask_id", id}, {"decision", "retry"}, {"rationale", d.rationale}, {"retry_count", rc}});
      set_status(id, SubtaskStatus::kPreCheck);
      s_.pre_attempts[id] = 0;
      return;
    }
    escalate(id, CheckPhase::kPost, v.reason);
  }

  SystemState& s_;
  const Backends& b_;
  const EventObserver& observer_;
};

}  // namespace

RunRecord run_workflow(SystemState& state, const Backends& backends, const EventObserver& observer) {
  Runner(state, backends, observer).run();
  return state.record;
}

SystemState& submit_intervention(SystemState& s, const Intervention& decision, const std::string& operator_name,
                                 const EventObserver& observer) {
  if (!s.suspension) fail(ErrorCode::kNoSuspendedSubtask, "run " + s.run_id + " has no suspended subtask");
  const int id = s.suspension->subtask_id;
  if (decision.kind == InterventionKind::kReorder) {
    auto front = decision.front_id;
    auto it = front ? s.subtask_status.find(*front) : s.subtask_status.end();
    if (it == s.subtask_status.end() || it->second != SubtaskStatus::kPending) {
      fail(ErrorCode::kInvalidReorderTarget, "reorder target must be a pending subtask");
    }
  }
  Backends none;
  Runner r(s, none, observer);
  Json payload{{"subtask_id", id},
               {"decision", std::string(intervention_kind_name(decision.kind))},
               {"operator", operator_name},
               {"reason", s.suspension->reason}};
  if (decision.front_id && decision.kind == InterventionKind::kReorder) payload["front_id"] = *decision.front_id;
  r.emit(EventKind::kIntervention, std::move(payload));
  s.suspension.reset();
  s.record.final_status.reset();

  switch (decision.kind) {
    case InterventionKind::kResumeRetry: {
      auto& rc = s.retry_counts[id];
      rc = std::min(rc + 1, s.config.max_retries + 1);
      r.set_status(id, SubtaskStatus::kPreCheck);
      s.pre_attempts[id] = 0;
      break;
    }
    case InterventionKind::kSkipSubtask:
      r.set_status(id, SubtaskStatus::kAborted);
      break;
    case InterventionKind::kReorder: {
      int front = *decision.front_id;
      s.order.erase(std::find(s.order.begin(), s.order.end(), front));
      s.order.insert(std::find(s.order.begin(), s.order.end(), id), front);
      r.set_status(id, SubtaskStatus::kPending);
      s.pre_attempts[id] = 0;
      break;
    }
    case InterventionKind::kAbort:
      r.set_status(id, SubtaskStatus::kAborted);
      r.finish(FinalStatus::kAborted);
      break;
  }
  return s;
}

Json state_to_json(const SystemState& s) {
  Json j;
  j["run_id"] = s.run_id;
  j["scenario"] = s.scenario_name;
  Json expected = Json::array();
  for (const auto& c : s.expected_final) expected.push_back(to_json(c));
  j["expected_final"] = expected;
  j["config"] = to_json(s.config);
  j["plan"] = to_json(s.plan);
  j["raw_parser_output"] = s.plan.raw_parser_output;
  j["world"] = world::to_json(s.world);
  j["robot"] = world::to_json(s.robot);
  j["order"] = s.order;
  Json subtasks = Json::array();
  for (int id : s.order) {
    subtasks.push_back(Json{{"id", id},
                            {"status", std::string(status_name(s.subtask_status.at(id)))},
                            {"retry_count", s.retry_counts.at(id)},
                            {"pre_attempts", s.pre_attempts.at(id)},
                            {"executions", s.executions.at(id)}});
  }
  j["subtasks"] = subtasks;
  j["reorder_used"] = s.reorder_used;
  j["forced_retry_used"] = s.forced_retry_used;
  if (s.suspension) {
    j["suspension"] = Json{{"subtask_id", s.suspension->subtask_id},
                           {"phase", std::string(verify::phase_name(s.suspension->phase))},
                           {"reason", s.suspension->reason}};
  } else {
    j["suspension"] = nullptr;
  }
  j["rng"] = Json{{"verify", Json{{"state", s.verify_rng.save()}, {"draws", s.verify_rng.draws()}}},
                  {"exec", Json{{"state", s.exec_rng.save()}, {"draws", s.exec_rng.draws()}}}};
  j["final_status"] = s.record.final_status ? Json(std::string(final_status_name(*s.record.final_status))) : Json(nullptr);
  Json events = Json::array();
  for (const auto& e : s.record.events) events.push_back(to_json(e));
  j["events"] = events;
  return j;
}

SystemState state_from_json(const Json& j) {
  SystemState s;
  s.run_id = require_string(j, "run_id", "state");
  s.scenario_name = require_string(j, "scenario", "state");
  for (const auto& c : require(j, "expected_final", "state")) s.expected_final.push_back(condition_from_json(c));
  s.config = config_from_json(require(j, "config", "state"));
  const auto& plan = require(j, "plan", "state");
  if (plan.contains("subtasks") && plan["subtasks"].is_array() && plan["subtasks"].empty()) {
    s.plan.intent.goal = require_string(require(plan, "intent", "plan"), "goal", "intent");
    auto cat = protocol::parse_category(require_string(require(plan, "intent", "plan"), "category", "intent"));
    if (!cat) fail(ErrorCode::kSchema, "unknown intent category");
    s.plan.intent.category = *cat;
  } else {
    s.plan = protocol::plan_from_json(plan, s.config.action_vocabulary);
  }
  s.plan.raw_parser_output = require_string(j, "raw_parser_output", "state");
  s.world = world::world_from_json(require(j, "world", "state"));
  s.robot = world::robot_state_from_json(require(j, "robot", "state"));
  s.order = require(j, "order", "state").get<std::vector<int>>();
  for (const auto& st : require(j, "subtasks", "state")) {
    int id = require(st, "id", "subtask state").get<int>();
    auto status = parse_status(require_string(st, "status", "subtask state"));
    if (!status) fail(ErrorCode::kSchema, "unknown subtask status");
    s.subtask_status[id] = *status;
    s.retry_counts[id] = require(st, "retry_count", "subtask state").get<int>();
    s.pre_attempts[id] = require(st, "pre_attempts", "subtask state").get<int>();
    s.executions[id] = require(st, "executions", "subtask state").get<int>();
  }
  for (int id : require(j, "reorder_used", "state")) s.reorder_used.insert(id);
  for (int id : require(j, "forced_retry_used", "state")) s.forced_retry_used.insert(id);
  const auto& susp = require(j, "suspension", "state");
  if (!susp.is_null()) {
    auto phase = verify::parse_phase(require_string(susp, "phase", "suspension"));
    if (!phase) fail(ErrorCode::kSchema, "unknown suspension phase");
    s.suspension = Suspension{require(susp, "subtask_id", "suspension").get<int>(), *phase, require_string(susp, "reason", "suspension")};
  }
  const auto& rng = require(j, "rng", "state");
  s.verify_rng.restore(require_string(rng["verify"], "state", "rng"), require(rng["verify"], "draws", "rng").get<std::uint64_t>());
  s.exec_rng.restore(require_string(rng["exec"], "state", "rng"), require(rng["exec"], "draws", "rng").get<std::uint64_t>());
  const auto& fs = require(j, "final_status", "state");
  if (!fs.is_null()) s.record.final_status = parse_final_status(fs.get<std::string>());
  s.record.run_id = s.run_id;
  s.record.scenario = s.scenario_name;
  for (const auto& e : require(j, "events", "state")) s.record.events.push_back(event_from_json(e));
  return s;
}

}  // namespace labflow::orch
