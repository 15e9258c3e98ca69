// Acceptance checks 1-12. Prints one PASS/FAIL line per check and exits
// nonzero when any check fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "labflow/augment/augment.hpp"
#include "labflow/core/json_io.hpp"
#include "labflow/core/rng.hpp"
#include "labflow/gateway/simulate.hpp"
#include "labflow/knowledge/knowledge_base.hpp"
#include "labflow/metrics/metrics.hpp"
#include "labflow/orchestrator/workflow.hpp"
#include "labflow/protocol/parser.hpp"
#include "labflow/world/scenario.hpp"

using namespace labflow;
using orch::EventKind;
using orch::FinalStatus;

namespace {

const std::filesystem::path kData = LABFLOW_TEST_DATA_DIR;
const std::filesystem::path kGolden = LABFLOW_TEST_GOLDEN_DIR;

// Collects failure notes for one check.
struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 5) failures.push_back(what);
  }
};

world::Scenario scenario(const std::string& name) { return world::load_scenario(kData / "scenarios" / (name + ".json")); }

std::shared_ptr<const knowledge::KnowledgeBase> default_kb() {
  static auto kb = std::make_shared<const knowledge::KnowledgeBase>(knowledge::load_knowledge_base(kData / "knowledge_base.json"));
  return kb;
}

const std::vector<std::string> kComposites = {"loading_centrifuge_tube", "unload_centrifuge_tube", "tidy_up_the_desktop",
                                              "clean_up_waste_materials", "loading_float", "unload_the_float"};

struct Harness {
  world::Scenario scenario;
  orch::SystemState state;
  orch::Backends backends;
};

Harness make(const std::string& name, orch::SystemConfig cfg = {}, std::vector<int> order = {},
             std::set<std::pair<int, verify::CheckPhase>> faults = {}) {
  auto sc = scenario(name);
  auto plan = protocol::parse_protocol({sc.protocol_text, name}, orch::parser_config(cfg));
  if (!order.empty()) plan = orch::permute_plan(plan, order);
  auto state = orch::init_system_with_plan(plan, cfg, sc, *default_kb(), "run-acceptance");
  auto backends = orch::make_backends(cfg, default_kb());
  if (!faults.empty()) backends.verifier = std::make_shared<verify::FaultInjectingVerifier>(backends.verifier, faults);
  return Harness{std::move(sc), std::move(state), std::move(backends)};
}

std::vector<orch::Event> events_of(const orch::RunRecord& r, EventKind kind, int subtask) {
  std::vector<orch::Event> out;
  for (const auto& e : r.events) {
    if (e.kind == kind && e.payload.value("subtask_id", -1) == subtask) out.push_back(e);
  }
  return out;
}

std::string payload_log(const orch::RunRecord& r) {
  std::string out;
  for (const auto& e : r.events) {
    out += Json{{"seq", e.seq}, {"tick", e.tick}, {"kind", std::string(orch::event_kind_name(e.kind))}, {"payload", e.payload}}.dump();
    out += '\n';
  }
  return out;
}

// 1: mean of per-trial completion equals the pooled step proportion.
void metric_identity(Check& c) {
  Rng rng(26);
  for (int set = 0; set < 1000; ++set) {
    const int m = 2 + static_cast<int>(rng.index(2));
    std::vector<metrics::CompositeTrial> trials;
    long done = 0;
    for (int t = 0; t < 20; ++t) {
      std::vector<bool> steps;
      for (int k = 0; k < m; ++k) {
        steps.push_back(rng.uniform() < rng.uniform());
        done += steps.back();
      }
      trials.emplace_back(steps);
    }
    const double pooled = 100.0 * static_cast<double>(done) / (20.0 * m);
    auto r = metrics::cr_report(trials);
    c.expect(std::abs(r.mean - pooled) <= 1e-9, "set " + std::to_string(set) + ": mean " + std::to_string(r.mean));
  }
}

// 2: SR report strings.
void sr_format(Check& c) {
  auto batches = [](std::vector<int> s) {
    std::vector<metrics::TrialBatch> out;
    for (int x : s) out.emplace_back(x, 20);
    return out;
  };
  const std::pair<std::vector<int>, std::string> cases[] = {
      {{20, 20, 20}, "100.00% \xC2\xB1 0.00"},
      {{11, 11, 12}, "56.67% \xC2\xB1 1.67"},
      {{7, 8, 9}, "40.00% \xC2\xB1 2.89"},
  };
  for (const auto& [succ, want] : cases) {
    auto got = metrics::sr_report(batches(succ)).formatted;
    c.expect(got == want, "got '" + got + "', want '" + want + "'");
  }
}

// 3: perfect loading run, and a byte-identical payload log across runs.
void liveness(Check& c) {
  std::string first;
  for (int i = 0; i < 2; ++i) {
    auto h = make("loading_centrifuge_tube");
    auto r = orch::run_workflow(h.state, h.backends);
    c.expect(r.final_status == FinalStatus::kCompleted, "run did not complete");
    c.expect(r.count(EventKind::kExecution) == 3, "executions " + std::to_string(r.count(EventKind::kExecution)));
    const auto verdicts = r.count(EventKind::kPreVerdict) + r.count(EventKind::kPostVerdict);
    c.expect(verdicts == 6, "verdicts " + std::to_string(verdicts));
    auto log = payload_log(r);
    if (i == 0) first = log;
    else c.expect(log == first, "payload logs differ between runs");
  }
  c.expect(first == read_text_file(kGolden / "loading_perfect_payloads.jsonl"), "payload log differs from the golden file");
}

// 4: a swapped leading pair is recovered with one reorder.
void reorder_policy(Check& c) {
  auto h = make("loading_centrifuge_tube", {}, {2, 1, 3});
  auto r = orch::run_workflow(h.state, h.backends);
  c.expect(r.final_status == FinalStatus::kCompleted, "[Insert, Open, Close] did not complete");
  c.expect(r.count(EventKind::kReorder) == 1, "reorders " + std::to_string(r.count(EventKind::kReorder)));
  c.expect(world::satisfies_all(h.state.world, h.scenario.expected_final), "expected final state not reached");
  for (const auto& name : kComposites) {
    auto in_order = make(name);
    std::vector<int> swapped;
    for (const auto& s : in_order.state.plan.subtasks) swapped.push_back(s.id);
    std::swap(swapped[0], swapped[1]);
    auto scrambled = make(name, {}, swapped);
    for (auto* run : {&in_order, &scrambled}) {
      auto rr = orch::run_workflow(run->state, run->backends);
      c.expect(rr.final_status == FinalStatus::kCompleted, name + " did not complete");
      c.expect(world::satisfies_all(run->state.world, run->scenario.expected_final), name + " final state wrong");
    }
  }
}

// 5: a precondition nobody can repair is re-verified once, then escalated.
void escalation_policy(Check& c) {
  auto h = make("loading_centrifuge_tube", {}, {}, {{3, verify::CheckPhase::kPre}});
  auto r = orch::run_workflow(h.state, h.backends);
  auto pre = events_of(r, EventKind::kPreVerdict, 3);
  c.expect(pre.size() == 2, "pre_verdicts for subtask 3: " + std::to_string(pre.size()));
  for (const auto& e : pre) c.expect(!e.payload["passed"].get<bool>(), "a pre_verdict for subtask 3 passed");
  auto esc = events_of(r, EventKind::kEscalation, 3);
  c.expect(esc.size() == 1, "escalations: " + std::to_string(esc.size()));
  if (pre.size() == 2 && esc.size() == 1) c.expect(esc[0].seq > pre[1].seq, "escalation precedes the second verdict");
  c.expect(r.count(EventKind::kExecution) == 2, "subtask 3 must never execute");
  c.expect(r.final_status == FinalStatus::kAborted, "run not aborted");
}

// 6: max_retries = 2 allows three attempts.
void retry_bound(Check& c) {
  orch::SystemConfig cfg;
  cfg.max_retries = 2;
  auto h = make("loading_centrifuge_tube", cfg, {}, {{2, verify::CheckPhase::kPost}});
  auto r = orch::run_workflow(h.state, h.backends);
  auto exec = events_of(r, EventKind::kExecution, 2);
  c.expect(exec.size() == 3, "executions of subtask 2: " + std::to_string(exec.size()));
  auto esc = events_of(r, EventKind::kEscalation, 2);
  c.expect(esc.size() == 1, "escalations: " + std::to_string(esc.size()));
  if (exec.size() == 3 && esc.size() == 1) c.expect(esc[0].seq > exec[2].seq, "escalation before the last attempt");
}

// Independent bag-of-words embedding used as the retrieval oracle.
std::vector<double> oracle_embed(const std::string& text) {
  std::vector<double> v(256, 0.0);
  std::string tok;
  auto flush = [&] {
    if (tok.empty()) return;
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : tok) h = (h ^ ch) * 1099511628211ULL;
    v[h % 256] += 1.0;
    tok.clear();
  };
  for (char ch : text) {
    if (std::isalnum(static_cast<unsigned char>(ch))) tok += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    else flush();
  }
  flush();
  double n = 0;
  for (double x : v) n += x * x;
  for (double& x : v) x /= std::sqrt(n);
  return v;
}

// 7: top-k equals a brute-force cosine ranking.
void retrieval_oracle(Check& c) {
  static const char* kWords[] = {"open", "close", "lid",  "tube",    "rack",  "centrifuge", "float",  "water", "bath", "cap",
                                 "pour", "liquid", "discard", "trash", "red", "orange", "place", "remove", "check", "verify"};
  Rng rng(1212);
  auto text = [&](int lo, int hi) {
    int n = lo + static_cast<int>(rng.index(static_cast<std::size_t>(hi - lo + 1)));
    std::string s;
    for (int i = 0; i < n; ++i) s += (i ? " " : "") + std::string(kWords[rng.index(std::size(kWords))]);
    return s;
  };
  for (int base = 0; base < 200; ++base) {
    const std::size_t n = 1 + rng.index(1000);
    std::vector<knowledge::KnowledgeItem> items;
    for (std::size_t i = 0; i < n; ++i) {
      knowledge::KnowledgeItem it;
      it.key = "k" + std::to_string(i);
      it.task_description = text(1, 6);
      it.verification_prompt = text(1, 4);
      items.push_back(std::move(it));
    }
    knowledge::KnowledgeBase kb(items, std::make_shared<knowledge::HashBowEmbedder>());
    std::vector<std::pair<std::string, std::vector<double>>> vecs;
    for (const auto& item : kb.items()) vecs.emplace_back(item->key, oracle_embed(item->indexed_text()));

    const auto query = text(1, 8);
    const std::size_t k = 1 + rng.index(10);
    auto qv = oracle_embed(query);
    std::vector<std::pair<double, std::string>> scored;
    for (const auto& [key, v] : vecs) {
      double dot = 0;
      for (std::size_t i = 0; i < 256; ++i) dot += qv[i] * v[i];
      scored.emplace_back(std::clamp(dot, -1.0, 1.0), key);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    auto got = knowledge::retrieve_topk(kb, query, k);
    c.expect(got.entries.size() == std::min(k, n), "base " + std::to_string(base) + ": wrong count");
    for (std::size_t i = 0; i < got.entries.size() && i < scored.size(); ++i) {
      // Ties within rounding may legitimately swap; compare similarity first.
      c.expect(std::abs(got.entries[i].similarity - scored[i].first) <= 1e-12, "base " + std::to_string(base) + " rank " +
                                                                                  std::to_string(i) + " similarity");
      if (std::abs(scored[i].first - (i + 1 < scored.size() ? scored[i + 1].first : -2.0)) > 1e-12 &&
          (i == 0 || std::abs(scored[i].first - scored[i - 1].first) > 1e-12)) {
        c.expect(got.entries[i].key == scored[i].second, "base " + std::to_string(base) + " rank " + std::to_string(i) + " key");
      }
    }
    const auto& probe = kb.items()[rng.index(n)];
    auto self = knowledge::retrieve_topk(kb, probe->indexed_text(), 1);
    c.expect(!self.entries.empty() && self.entries[0].similarity == 1.0, "self-retrieval below 1.0 in base " + std::to_string(base));
  }
}

// 8: pixel operators against an integer oracle, plus curriculum endpoints.
void augmentation_algebra(Check& c) {
  using augment::OpKind;
  constexpr std::int64_t kOne = 65536;
  auto floor_div = [](std::int64_t a, std::int64_t b) { return a >= 0 ? a / b : -((-a + b - 1) / b); };
  auto round_half = [&](std::int64_t num) { return floor_div(num + kOne / 2, kOne); };
  auto clamp = [](std::int64_t v) { return static_cast<int>(std::clamp<std::int64_t>(v, 0, 255)); };
  auto oracle = [&](int p, OpKind kind, std::int64_t k) {
    switch (kind) {
      case OpKind::kBrightness: return clamp(p + round_half(64 * k));
      case OpKind::kContrast: return clamp(round_half((p - 128) * (kOne + k) + 128 * kOne));
      case OpKind::kLowIllumination: return clamp(round_half(p * (kOne - k)));
      case OpKind::kOverexposure: return clamp(round_half(p * (kOne - k) + 255 * k));
    }
    return -1;
  };
  Rng rng(1618);
  int mismatches = 0;
  for (int i = 0; i < 10000; ++i) {
    const int p = static_cast<int>(rng.index(256));
    const auto k = static_cast<std::int64_t>(rng.index(kOne + 1));
    for (auto kind : augment::kAllOpKinds) {
      augment::AugmentationOp op{kind, static_cast<double>(k) / kOne};
      mismatches += augment::apply_pixel(static_cast<std::uint8_t>(p), op) != oracle(p, kind, k);
    }
  }
  c.expect(mismatches == 0, std::to_string(mismatches) + " pixel mismatches");

  Image img(16, 9, 0);
  for (std::size_t j = 0; j < img.rgb.size(); ++j) img.rgb[j] = static_cast<std::uint8_t>((j * 97) % 256);
  for (auto kind : augment::kAllOpKinds) {
    c.expect(augment::apply_op(img, {kind, 0.0}) == img, "alpha 0 is not the identity");
  }
  auto white = augment::apply_op(img, {OpKind::kOverexposure, 1.0});
  c.expect(std::all_of(white.rgb.begin(), white.rgb.end(), [](std::uint8_t v) { return v == 255; }), "overexposure at 1 is not white");

  augment::CurriculumSchedule sched;
  Rng draws(3);
  for (int e = 0; e < sched.stage1_end; ++e) c.expect(augment::curriculum_sample(img, e, sched, draws).image == img, "stage 1 not pure");
  c.expect(draws.draws() == 0, "stage 1 consumed randomness");
  for (double lambda : {0.0, 1.0}) {
    sched.lambda = lambda;
    Rng r(8);
    for (int i = 0; i < 20; ++i) {
      auto s = augment::curriculum_sample(img, sched.stage2_end, sched, r);
      const auto want = lambda == 1.0 ? img : augment::apply_op(img, *s.op);
      c.expect(s.image == want, "stage 3 endpoint not exact");
    }
  }
  double prev = -1.0;
  for (int e = 0; e < sched.total_epochs; ++e) {
    double a = augment::alpha_schedule(e, sched);
    c.expect(a >= prev, "alpha decreases at epoch " + std::to_string(e));
    prev = a;
  }
}

// 9: action chunk loss.
void loss(Check& c) {
  auto chunk = [](std::vector<exec::ActionFrame> f) {
    auto h = f.size();
    return exec::ActionChunk{std::move(f), h, "x"};
  };
  auto a = chunk({{0.5, -1.0, 2.0}, {1.0, 1.0, 0.0}});
  c.expect(augment::action_mse_loss(a, a) == 0.0, "identical chunks give nonzero loss");
  // ((0.5)^2 + (-2)^2 + 0 + 0 + (0.25)^2 + 1) / 6
  auto b = chunk({{0.0, 1.0, 2.0}, {1.0, 0.75, 1.0}});
  const double want = (0.25 + 4.0 + 0.0 + 0.0 + 0.0625 + 1.0) / 6.0;
  c.expect(std::abs(augment::action_mse_loss(a, b) - want) <= 1e-12, "fixture loss mismatch");
}

// 10: no-retry loading at p = 0.8 against the truncated-chain expectation.
void analytic_cr(Check& c) {
  // Step k completes only if steps 1..k all succeed: P = p^k.
  const double p = 0.8;
  const double expected = 100.0 * (p + p * p + p * p * p) / 3.0;
  c.expect(metrics::format_percent_value(expected) == "65.07", "expectation is not 65.07");

  gateway::SimulationRequest req;
  req.scenario = scenario("loading_centrifuge_tube");
  req.config.success_prob = world::SuccessTable(p);
  req.config.max_retries = 0;
  req.config.noise_rate = 0.0;
  req.trials = 2000;
  req.base_seed = 1;
  auto records = gateway::simulate(req, default_kb());
  auto h = metrics::harvest_from_logs(records, 3);
  long done = 0, total = 0;
  for (const auto& t : h.trials) {
    for (bool s : t.steps) done += s;
    total += static_cast<long>(t.steps.size());
  }
  const double pooled = 100.0 * static_cast<double>(done) / static_cast<double>(total);
  c.expect(total == 6000, "harvested " + std::to_string(total) + " steps");
  c.expect(std::abs(pooled - expected) <= 2.0, "pooled CR " + std::to_string(pooled));
  std::printf("      pooled CR %.2f, expectation %.2f\n", pooled, expected);
}

// 11: the corpus parses to the expected action kinds and round-trips.
void parser_corpus(Check& c) {
  using K = ActionKind;
  const std::map<std::string, std::vector<ActionKind>> expected = {
      {"open_centrifuge_lid", {K::kOpenLid}},
      {"close_centrifuge_lid", {K::kCloseLid}},
      {"insert_tube_to_centrifuge", {K::kPlace}},
      {"remove_tube_from_centrifuge", {K::kRemove}},
      {"place_centrifuge_tube_to_orange_rack", {K::kPlace}},
      {"place_cryotube_to_red_rack", {K::kPlace}},
      {"discard_centrifuge_tube", {K::kPlace}},
      {"discard_cryotube", {K::kPlace}},
      {"open_water_bath_lid", {K::kOpenLid}},
      {"close_water_bath_lid", {K::kCloseLid}},
      {"place_float_to_water_bath", {K::kPlace}},
      {"remove_float_from_water_bath", {K::kRemove}},
      {"unscrew_tube_cap", {K::kGrasp}},
      {"tighten_tube_cap", {K::kGrasp}},
      {"pour_waste_liquid", {K::kMove}},
      {"loading_centrifuge_tube", {K::kOpenLid, K::kPlace, K::kCloseLid}},
      {"unload_centrifuge_tube", {K::kOpenLid, K::kRemove, K::kCloseLid}},
      {"tidy_up_the_desktop", {K::kPlace, K::kPlace}},
      {"clean_up_waste_materials", {K::kPlace, K::kPlace}},
      {"loading_float", {K::kOpenLid, K::kPlace, K::kCloseLid}},
      {"unload_the_float", {K::kOpenLid, K::kRemove, K::kCloseLid}},
  };
  for (const auto& [name, kinds] : expected) {
    auto plan = protocol::parse_protocol({scenario(name).protocol_text, name}, {});
    std::vector<ActionKind> got;
    for (const auto& s : plan.subtasks) got.push_back(s.action.kind);
    c.expect(got == kinds, name + " parsed to the wrong kinds");
    auto text = protocol::to_json(plan).dump();
    auto back = protocol::plan_from_json(Json::parse(text), {kAllActionKinds.begin(), kAllActionKinds.end()});
    back.raw_parser_output = plan.raw_parser_output;
    c.expect(back == plan && protocol::to_json(back).dump() == text, name + " does not round-trip");
  }
}

// 12: no execution without a passed readiness verdict, across random runs.
void safety_fuzz(Check& c) {
  Rng gen(500);
  std::vector<std::string> names = kComposites;
  for (const char* single : {"open_centrifuge_lid", "discard_cryotube", "pour_waste_liquid"}) names.emplace_back(single);
  for (int i = 0; i < 500; ++i) {
    orch::SystemConfig cfg;
    cfg.noise_rate = 0.3 * gen.uniform();
    cfg.success_prob = world::SuccessTable(0.5 + 0.5 * gen.uniform());
    cfg.max_retries = static_cast<int>(gen.index(4));
    cfg.seed = gen.index(1u << 30);
    cfg.intervention_mode = gen.uniform() < 0.5 ? orch::InterventionMode::kAutoAbort : orch::InterventionMode::kAutoRetry;
    const auto& name = names[gen.index(names.size())];
    auto base = make(name, cfg);
    std::vector<int> order;
    for (const auto& s : base.state.plan.subtasks) order.push_back(s.id);
    for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[gen.index(k)]);
    auto h = make(name, cfg, order);
    auto r = orch::run_workflow(h.state, h.backends);
    std::map<int, bool> armed;
    for (const auto& e : r.events) {
      if (e.kind == EventKind::kPreVerdict) armed[e.payload["subtask_id"].get<int>()] = e.payload["passed"].get<bool>();
      if (e.kind == EventKind::kExecution) {
        const int id = e.payload["subtask_id"].get<int>();
        c.expect(armed[id], name + " config " + std::to_string(i) + ": unguarded execution at seq " + std::to_string(e.seq));
        armed[id] = false;
      }
    }
  }
}

struct Criterion {
  int number;
  const char* title;
  std::function<void(Check&)> run;
  double budget_seconds;  // 0: no runtime limit
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "completion-rate identity", metric_identity, 5},
      {2, "success-rate report format", sr_format, 0},
      {3, "closed-loop liveness and replay", liveness, 1},
      {4, "reorder policy", reorder_policy, 2},
      {5, "escalation policy", escalation_policy, 0},
      {6, "retry bound", retry_bound, 0},
      {7, "retrieval oracle equivalence", retrieval_oracle, 10},
      {8, "augmentation algebra", augmentation_algebra, 0},
      {9, "action chunk loss", loss, 0},
      {10, "analytic completion-rate simulation", analytic_cr, 30},
      {11, "parser corpus", parser_corpus, 0},
      {12, "safety invariant fuzz", safety_fuzz, 0},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      cr.run(check);
    } catch (const std::exception& e) {
      check.failures.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (cr.budget_seconds > 0 && secs > cr.budget_seconds) {
      check.failures.push_back("took " + std::to_string(secs) + " s, budget " + std::to_string(cr.budget_seconds) + " s");
    }
    const bool ok = check.failures.empty();
    failed += !ok;
    std::printf("%s  %2d  %s (%.2f s)\n", ok ? "PASS" : "FAIL", cr.number, cr.title, secs);
    for (const auto& f : check.failures) std::printf("      %s\n", f.c_str());
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
