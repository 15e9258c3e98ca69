#include <gtest/gtest.h>

#include <cstdlib>

#include "labflow/core/json_io.hpp"
#include "labflow/orchestrator/workflow.hpp"
#include "labflow/protocol/parser.hpp"
#include "support.hpp"

using namespace labflow;
using namespace labflow::orch;
using verify::CheckPhase;
namespace lt = labflow::testing;

namespace {

const std::vector<std::string> kComposites = {"loading_centrifuge_tube", "unload_centrifuge_tube", "tidy_up_the_desktop",
                                              "clean_up_waste_materials", "loading_float", "unload_the_float"};

struct Harness {
  world::Scenario scenario;
  SystemState state;
  Backends backends;
};

// Builds a run over `name`, optionally permuting the parsed plan and wrapping
// the verifier with forced failures.
Harness make(const std::string& name, SystemConfig cfg = {}, std::vector<int> order = {},
             std::set<std::pair<int, CheckPhase>> faults = {}) {
  auto scenario = lt::scenario(name);
  auto plan = protocol::parse_protocol({scenario.protocol_text, name}, parser_config(cfg));
  if (!order.empty()) plan = permute_plan(plan, order);
  auto kb = lt::default_kb();
  auto state = init_system_with_plan(plan, cfg, scenario, *kb, "run-test");
  auto backends = make_backends(cfg, kb);
  if (!faults.empty()) backends.verifier = std::make_shared<verify::FaultInjectingVerifier>(backends.verifier, faults);
  return Harness{std::move(scenario), std::move(state), std::move(backends)};
}

std::vector<Event> events_of(const RunRecord& r, EventKind kind, std::optional<int> subtask = std::nullopt) {
  std::vector<Event> out;
  for (const auto& e : r.events) {
    if (e.kind != kind) continue;
    if (subtask && e.payload.value("subtask_id", -1) != *subtask) continue;
    out.push_back(e);
  }
  return out;
}

std::string payload_log(const RunRecord& r) {
  std::string out;
  for (const auto& e : r.events) {
    out += Json{{"seq", e.seq}, {"tick", e.tick}, {"kind", std::string(event_kind_name(e.kind))}, {"payload", e.payload}}.dump();
    out += '\n';
  }
  return out;
}

// Every execution must follow a passed pre_verdict for the same subtask with
// no execution of that subtask in between.
std::optional<std::string> safety_violation(const RunRecord& r) {
  std::map<int, bool> armed;
  for (const auto& e : r.events) {
    if (e.kind == EventKind::kPreVerdict) armed[e.payload["subtask_id"].get<int>()] = e.payload["passed"].get<bool>();
    if (e.kind == EventKind::kExecution) {
      int id = e.payload["subtask_id"].get<int>();
      if (!armed[id]) return "execution of subtask " + std::to_string(id) + " at seq " + std::to_string(e.seq);
      armed[id] = false;
    }
  }
  return std::nullopt;
}

}  // namespace

TEST(Config, JsonRoundTripAndValidation) {
  SystemConfig cfg;
  cfg.max_retries = 4;
  cfg.noise_rate = 0.25;
  cfg.seed = 77;
  cfg.intervention_mode = InterventionMode::kApi;
  cfg.success_prob.set(ActionKind::kPlace, 0.5);
  cfg.manipulator = world::RobotState::home(world::ArmMode::kDual);
  cfg.retrieval_keying = verify::RetrievalKeying::kIndexOnly;
  EXPECT_EQ(config_from_json(to_json(cfg)), cfg);
  EXPECT_EQ(config_from_json(Json::object()), SystemConfig{});
  EXPECT_CODE(config_from_json(Json{{"max_retries", -1}}), kSchema);
  EXPECT_CODE(config_from_json(Json{{"noise_rate", 2.0}}), kSchema);
  EXPECT_CODE(config_from_json(Json{{"intervention_mode", "panic"}}), kSchema);
  EXPECT_CODE(config_from_json(Json{{"model_selection", {{"vlm", {{"kind", "gpt"}}}}}}), kSchema);
  EXPECT_EQ(parse_intervention_mode("auto_retry"), InterventionMode::kAutoRetry);
}

TEST(Events, JsonRoundTripAndLogParsing) {
  Event e{"r1", 3, 9, EventKind::kEscalation, Json{{"subtask_id", 2}, {"reason", "x"}}};
  auto j = to_json(e);
  EXPECT_EQ(j.dump(), R"({"run_id":"r1","seq":3,"tick":9,"kind":"escalation","payload":{"subtask_id":2,"reason":"x"}})");
  auto back = event_from_json(j);
  EXPECT_EQ(to_json(back), j);
  for (int k = 0; k <= static_cast<int>(EventKind::kRunFinished); ++k) {
    auto kind = static_cast<EventKind>(k);
    EXPECT_EQ(parse_event_kind(event_kind_name(kind)), kind);
  }
  auto parsed = parse_event_log(j.dump() + "\n\n" + j.dump() + "\n");
  EXPECT_EQ(parsed.size(), 2u);
  EXPECT_CODE(parse_event_log("{\"run_id\": 1}\n"), kParse);
  EXPECT_CODE(parse_event_log("nope\n"), kParse);
  EXPECT_CODE(read_event_log("/nonexistent.jsonl"), kIo);

  lt::TempDir dir;
  {
    JsonlEventWriter w(dir / "log.jsonl");
    w.write(e);
    w.write(back);
  }
  EXPECT_EQ(read_event_log(dir / "log.jsonl").size(), 2u);
}

TEST(StateMachine, TransitionTable) {
  using S = SubtaskStatus;
  EXPECT_TRUE(transition_allowed(S::kPending, S::kPreCheck));
  EXPECT_FALSE(transition_allowed(S::kPending, S::kExecuting));
  EXPECT_TRUE(transition_allowed(S::kPreCheck, S::kExecuting));
  EXPECT_FALSE(transition_allowed(S::kExecuting, S::kDone));
  EXPECT_TRUE(transition_allowed(S::kPostCheck, S::kPreCheck));
  EXPECT_TRUE(transition_allowed(S::kSuspended, S::kPreCheck));
  for (auto to : {S::kPending, S::kPreCheck, S::kExecuting, S::kPostCheck, S::kDone, S::kSuspended, S::kAborted}) {
    EXPECT_FALSE(transition_allowed(S::kDone, to));
    EXPECT_FALSE(transition_allowed(S::kAborted, to));
  }
}

TEST(Policy, PreFailurePrefersReorderThenReverifyThenEscalate) {
  auto h = make("loading_centrifuge_tube", {}, {2, 1, 3});
  verify::Verdict v{false, "lid closed"};
  auto d = handle_pre_failure(h.state, 2, v, 1);
  EXPECT_EQ(d.kind, DecisionKind::kReorder);
  EXPECT_EQ(d.front_id, 1);
  h.state.reorder_used.insert(2);
  EXPECT_EQ(handle_pre_failure(h.state, 2, v, 1).kind, DecisionKind::kReverify);
  EXPECT_EQ(handle_pre_failure(h.state, 2, v, 2).kind, DecisionKind::kEscalate);
}

TEST(Policy, PostFailureRetriesUpToBound) {
  SystemConfig cfg;
  cfg.max_retries = 2;
  auto h = make("open_centrifuge_lid", cfg);
  verify::Verdict v{false, "still closed"};
  for (int rc = 0; rc <= 2; ++rc) {
    h.state.retry_counts[1] = rc;
    EXPECT_EQ(handle_post_failure(h.state, 1, v).kind, DecisionKind::kRetry) << rc;
  }
  h.state.retry_counts[1] = 3;
  EXPECT_EQ(handle_post_failure(h.state, 1, v).kind, DecisionKind::kEscalate);
}

TEST(Workflow, PerfectLoadingRunIsLiveAndMatchesGolden) {
  auto a = make("loading_centrifuge_tube");
  auto ra = run_workflow(a.state, a.backends);
  EXPECT_EQ(ra.final_status, FinalStatus::kCompleted);
  EXPECT_EQ(ra.count(EventKind::kExecution), 3u);
  EXPECT_EQ(ra.count(EventKind::kPreVerdict) + ra.count(EventKind::kPostVerdict), 6u);
  EXPECT_TRUE(world::satisfies_all(a.state.world, a.scenario.expected_final));
  for (std::size_t i = 0; i < ra.events.size(); ++i) EXPECT_EQ(ra.events[i].seq, i + 1);

  auto b = make("loading_centrifuge_tube");
  auto rb = run_workflow(b.state, b.backends);
  EXPECT_EQ(payload_log(ra), payload_log(rb));

  auto golden = lt::golden_dir() / "loading_perfect_payloads.jsonl";
  if (std::getenv("LABFLOW_UPDATE_GOLDEN")) write_text_file(golden, payload_log(ra));
  ASSERT_TRUE(std::filesystem::exists(golden));
  EXPECT_EQ(lt::read_file(golden), payload_log(ra));
}

TEST(Workflow, ObserverSeesEveryEventInOrder) {
  auto h = make("unload_centrifuge_tube");
  std::vector<std::uint64_t> seen;
  auto r = run_workflow(h.state, h.backends, [&](const Event& e) { seen.push_back(e.seq); });
  ASSERT_EQ(seen.size(), r.events.size());
  for (std::size_t i = 0; i < seen.size(); ++i) EXPECT_EQ(seen[i], i + 1);
  EXPECT_EQ(r.events.front().kind, EventKind::kRunStarted);
  EXPECT_EQ(r.events.back().kind, EventKind::kRunFinished);
  EXPECT_EQ(r.events.back().payload["status"], "completed");
}

TEST(Workflow, ScrambledLoadingReordersOnce) {
  auto h = make("loading_centrifuge_tube", {}, {2, 1, 3});
  auto r = run_workflow(h.state, h.backends);
  EXPECT_EQ(r.final_status, FinalStatus::kCompleted);
  EXPECT_EQ(r.count(EventKind::kReorder), 1u);
  auto reorder = events_of(r, EventKind::kReorder).at(0);
  EXPECT_EQ(reorder.payload["subtask_id"], 2);
  EXPECT_EQ(reorder.payload["front_id"], 1);
  EXPECT_EQ(h.state.order, (std::vector<int>{1, 2, 3}));
  EXPECT_TRUE(world::satisfies_all(h.state.world, h.scenario.expected_final));
}

TEST(Workflow, CompositesCompleteInOrderAndWithFirstPairSwapped) {
  for (const auto& name : kComposites) {
    auto in_order = make(name);
    EXPECT_EQ(run_workflow(in_order.state, in_order.backends).final_status, FinalStatus::kCompleted) << name;
    EXPECT_TRUE(world::satisfies_all(in_order.state.world, in_order.scenario.expected_final)) << name;

    std::vector<int> order;
    for (const auto& s : in_order.state.plan.subtasks) order.push_back(s.id);
    std::swap(order[0], order[1]);
    auto swapped = make(name, {}, order);
    auto r = run_workflow(swapped.state, swapped.backends);
    EXPECT_EQ(r.final_status, FinalStatus::kCompleted) << name;
    EXPECT_LE(r.count(EventKind::kReorder), 1u) << name;
    EXPECT_TRUE(world::satisfies_all(swapped.state.world, swapped.scenario.expected_final)) << name;
  }
}

TEST(Workflow, PersistentPreFailureEscalatesThenAborts) {
  auto h = make("loading_centrifuge_tube", {}, {}, {{3, CheckPhase::kPre}});
  auto r = run_workflow(h.state, h.backends);
  auto pre = events_of(r, EventKind::kPreVerdict, 3);
  ASSERT_EQ(pre.size(), 2u);
  for (const auto& e : pre) EXPECT_FALSE(e.payload["passed"].get<bool>());
  auto esc = events_of(r, EventKind::kEscalation);
  ASSERT_EQ(esc.size(), 1u);
  EXPECT_GT(esc[0].seq, pre[1].seq);
  EXPECT_EQ(esc[0].payload["phase"], "pre");
  EXPECT_EQ(r.count(EventKind::kReorder), 0u);
  EXPECT_EQ(r.final_status, FinalStatus::kAborted);
  EXPECT_EQ(h.state.subtask_status.at(3), SubtaskStatus::kAborted);
  EXPECT_EQ(events_of(r, EventKind::kExecution, 3).size(), 0u);
}

TEST(Workflow, RetryBoundLimitsExecutions) {
  SystemConfig cfg;
  cfg.max_retries = 2;
  auto h = make("loading_centrifuge_tube", cfg, {}, {{2, CheckPhase::kPost}});
  auto r = run_workflow(h.state, h.backends);
  EXPECT_EQ(events_of(r, EventKind::kExecution, 2).size(), 3u);
  auto esc = events_of(r, EventKind::kEscalation, 2);
  ASSERT_EQ(esc.size(), 1u);
  EXPECT_EQ(esc[0].payload["phase"], "post");
  EXPECT_GT(esc[0].seq, events_of(r, EventKind::kExecution, 2).back().seq);
  EXPECT_EQ(r.final_status, FinalStatus::kAborted);
  EXPECT_EQ(events_of(r, EventKind::kExecution, 3).size(), 0u);
}

TEST(Workflow, AutoRetryGrantsOneExtraRound) {
  SystemConfig cfg;
  cfg.max_retries = 0;
  cfg.intervention_mode = InterventionMode::kAutoRetry;
  auto h = make("loading_centrifuge_tube", cfg, {}, {{2, CheckPhase::kPost}});
  auto r = run_workflow(h.state, h.backends);
  EXPECT_EQ(r.count(EventKind::kEscalation), 2u);
  EXPECT_EQ(events_of(r, EventKind::kExecution, 2).size(), 2u);
  EXPECT_EQ(r.final_status, FinalStatus::kAborted);
}

TEST(Intervention, SuspendResumeSkipReorderAbort) {
  SystemConfig cfg;
  cfg.intervention_mode = InterventionMode::kApi;
  auto h = make("loading_centrifuge_tube", cfg, {}, {{3, CheckPhase::kPre}});
  auto r = run_workflow(h.state, h.backends);
  EXPECT_EQ(r.final_status, FinalStatus::kSuspended);
  ASSERT_TRUE(h.state.suspension);
  EXPECT_EQ(h.state.suspension->subtask_id, 3);
  EXPECT_EQ(h.state.subtask_status.at(3), SubtaskStatus::kSuspended);
  EXPECT_FALSE(h.state.finished());

  EXPECT_CODE(submit_intervention(h.state, {InterventionKind::kReorder, 1}, "op"), kInvalidReorderTarget);
  EXPECT_CODE(submit_intervention(h.state, {InterventionKind::kReorder, std::nullopt}, "op"), kInvalidReorderTarget);

  auto before = h.state.record.events.size();
  submit_intervention(h.state, {InterventionKind::kResumeRetry, std::nullopt}, "alice");
  EXPECT_FALSE(h.state.suspension);
  auto iv = h.state.record.events.at(before);
  EXPECT_EQ(iv.kind, EventKind::kIntervention);
  EXPECT_EQ(iv.payload["operator"], "alice");
  EXPECT_EQ(iv.payload["decision"], "resume_retry");
  EXPECT_EQ(h.state.retry_counts.at(3), 1);
  run_workflow(h.state, h.backends);
  auto next = h.state.record.events.at(before + 1);
  EXPECT_EQ(next.kind, EventKind::kPreVerdict);
  EXPECT_EQ(next.payload["subtask_id"], 3);
  EXPECT_EQ(h.state.record.final_status, FinalStatus::kSuspended);  // the fault persists

  submit_intervention(h.state, {InterventionKind::kSkipSubtask, std::nullopt}, "alice");
  auto done = run_workflow(h.state, h.backends);
  EXPECT_EQ(done.final_status, FinalStatus::kCompleted);
  EXPECT_EQ(h.state.subtask_status.at(3), SubtaskStatus::kAborted);
  EXPECT_CODE(submit_intervention(h.state, {InterventionKind::kAbort, std::nullopt}, "alice"), kNoSuspendedSubtask);

  auto g = make("loading_centrifuge_tube", cfg, {}, {{3, CheckPhase::kPre}});
  run_workflow(g.state, g.backends);
  submit_intervention(g.state, {InterventionKind::kAbort, std::nullopt}, "bob");
  EXPECT_EQ(g.state.record.final_status, FinalStatus::kAborted);
  EXPECT_EQ(g.state.record.events.back().kind, EventKind::kRunFinished);
}

TEST(Intervention, OperatorReorderMovesPendingSubtaskForward) {
  SystemConfig cfg;
  cfg.intervention_mode = InterventionMode::kApi;
  // Close before Insert: Insert's precondition fails with nothing left to reorder.
  auto h = make("loading_centrifuge_tube", cfg, {1, 3, 2}, {{2, CheckPhase::kPre}});
  run_workflow(h.state, h.backends);
  ASSERT_TRUE(h.state.suspension);
  EXPECT_EQ(h.state.suspension->subtask_id, 2);
  EXPECT_CODE(submit_intervention(h.state, {InterventionKind::kReorder, 1}, "op"), kInvalidReorderTarget);
  EXPECT_EQ(intervention_from_json(Json{{"decision", "reorder"}, {"front_id", 3}}).front_id, 3);
  EXPECT_CODE(intervention_from_json(Json{{"decision", "reorder"}}), kSchema);
  EXPECT_CODE(intervention_from_json(Json{{"decision", "pray"}}), kSchema);
}

TEST(Persistence, SuspendedStateRoundTripsAndResumesIdentically) {
  SystemConfig cfg;
  cfg.intervention_mode = InterventionMode::kApi;
  cfg.noise_rate = 0.1;
  cfg.success_prob = world::SuccessTable(0.7);
  cfg.seed = 5;
  auto h = make("loading_centrifuge_tube", cfg, {}, {{3, CheckPhase::kPre}});
  run_workflow(h.state, h.backends);
  ASSERT_TRUE(h.state.suspension);

  auto text = state_to_json(h.state).dump();
  auto restored = state_from_json(Json::parse(text));
  EXPECT_EQ(state_to_json(restored).dump(), text);

  submit_intervention(h.state, {InterventionKind::kSkipSubtask, std::nullopt}, "op");
  submit_intervention(restored, {InterventionKind::kSkipSubtask, std::nullopt}, "op");
  auto a = run_workflow(h.state, h.backends);
  auto b = run_workflow(restored, h.backends);
  EXPECT_EQ(payload_log(a), payload_log(b));
  EXPECT_CODE(state_from_json(Json::object()), kSchema);
}

TEST(Workflow, SameSeedSameLog) {
  SystemConfig cfg;
  cfg.noise_rate = 0.2;
  cfg.success_prob = world::SuccessTable(0.6);
  cfg.max_retries = 3;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    cfg.seed = seed;
    auto a = make("unload_the_float", cfg);
    auto b = make("unload_the_float", cfg);
    EXPECT_EQ(payload_log(run_workflow(a.state, a.backends)), payload_log(run_workflow(b.state, b.backends)));
  }
}

TEST(Workflow, InitRejectsBadPlans) {
  auto s = lt::scenario("open_centrifuge_lid");
  auto kb = lt::default_kb();
  auto plan = protocol::parse_protocol({s.protocol_text, "t"}, {});
  plan.subtasks[0].knowledge_index = "missing";
  EXPECT_CODE(init_system_with_plan(plan, {}, s, *kb), kValidationFatal);
  EXPECT_CODE(init_system({"", "t"}, {}, s, *kb), kParse);
  knowledge::KnowledgeBase empty({}, std::make_shared<knowledge::HashBowEmbedder>());
  auto ok = protocol::parse_protocol({s.protocol_text, "t"}, {});
  EXPECT_CODE(init_system_with_plan(ok, {}, s, empty), kValidationFatal);  // keys dangle in an empty base
  EXPECT_THROW(permute_plan(ok, {1, 1}), std::invalid_argument);
}

// Property: no execution without a passed readiness check, under noise,
// flaky actions and scrambled plans.
TEST(Safety, NoExecutionWithoutPassedPreVerdict) {
  Rng gen(2718);
  for (int i = 0; i < 300; ++i) {
    SystemConfig cfg;
    cfg.noise_rate = 0.3 * gen.uniform();
    cfg.success_prob = world::SuccessTable(0.5 + 0.5 * gen.uniform());
    cfg.max_retries = static_cast<int>(gen.index(4));
    cfg.seed = gen.index(1u << 30);
    cfg.intervention_mode = gen.uniform() < 0.5 ? InterventionMode::kAutoAbort : InterventionMode::kAutoRetry;
    const auto& name = kComposites[gen.index(kComposites.size())];
    auto base = make(name, cfg);
    std::vector<int> order;
    for (const auto& s : base.state.plan.subtasks) order.push_back(s.id);
    for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[gen.index(k)]);
    auto h = make(name, cfg, order);
    auto r = run_workflow(h.state, h.backends);
    ASSERT_TRUE(r.final_status) << i;
    EXPECT_NE(*r.final_status, FinalStatus::kSuspended);
    auto bad = safety_violation(r);
    EXPECT_FALSE(bad) << name << " #" << i << ": " << bad.value_or("");
  }
}
