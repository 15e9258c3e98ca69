#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>

#include "labflow/core/rng.hpp"
#include "labflow/metrics/metrics.hpp"
#include "support.hpp"

using namespace labflow;
using namespace labflow::metrics;
using orch::Event;
using orch::EventKind;

namespace {

std::vector<TrialBatch> batches(std::initializer_list<int> successes) {
  std::vector<TrialBatch> out;
  for (int s : successes) out.emplace_back(s, 20);
  return out;
}

// Parses "XX.XX% ± Y.YY" back into its two numbers.
std::pair<double, double> parse_formatted(const std::string& s) {
  double mean = 0, se = 0;
  EXPECT_EQ(std::sscanf(s.c_str(), "%lf%% \xC2\xB1 %lf", &mean, &se), 2) << s;
  return {mean, se};
}

Event ev(const std::string& run, std::uint64_t seq, EventKind kind, Json payload) {
  return Event{run, seq, 0, kind, std::move(payload)};
}

std::vector<Event> run_events(const std::string& run, const std::string& scenario, int subtasks, std::vector<int> done,
                              const char* status) {
  std::vector<Event> out;
  std::uint64_t seq = 0;
  out.push_back(ev(run, ++seq, EventKind::kRunStarted, Json{{"scenario", scenario}, {"subtasks", subtasks}}));
  for (int id : done) out.push_back(ev(run, ++seq, EventKind::kSubtaskDone, Json{{"subtask_id", id}}));
  if (status) out.push_back(ev(run, ++seq, EventKind::kRunFinished, Json{{"status", status}}));
  return out;
}

}  // namespace

TEST(SuccessRate, BatchPercentages) {
  EXPECT_EQ(success_rate({20, 20}), 100.0);
  EXPECT_EQ(success_rate({0, 20}), 0.0);
  EXPECT_EQ(success_rate({13, 20}), 65.0);
  EXPECT_CODE(TrialBatch(21, 20), kSchema);
  EXPECT_CODE(TrialBatch(-1, 20), kSchema);
  EXPECT_CODE(TrialBatch(0, 0), kSchema);
}

TEST(SrReport, ReferenceStrings) {
  EXPECT_EQ(sr_report(batches({20, 20, 20})).formatted, "100.00% \xC2\xB1 0.00");
  EXPECT_EQ(sr_report(batches({11, 11, 12})).formatted, "56.67% \xC2\xB1 1.67");
  EXPECT_EQ(sr_report(batches({7, 8, 9})).formatted, "40.00% \xC2\xB1 2.89");
  auto r = sr_report(batches({7, 8, 9}));
  EXPECT_DOUBLE_EQ(r.mean, 40.0);
  EXPECT_DOUBLE_EQ(r.sample_std, 5.0);
  EXPECT_NEAR(r.std_error, 5.0 / std::sqrt(3.0), 1e-12);
  EXPECT_CODE(sr_report(batches({1, 2})), kArity);
  EXPECT_CODE(sr_report_from_rates({1, 2, 3, 4}), kArity);
}

TEST(SrReport, FormatRounding) {
  EXPECT_EQ(format_percent_value(56.666666), "56.67");
  EXPECT_EQ(format_percent_value(0.005), "0.01");
  EXPECT_EQ(format_percent_value(-1.5), "-1.50");
  EXPECT_EQ(format_percent_value(0.0), "0.00");
}

// Property: the report is invariant under permutation of repetitions and its
// string parses back to the rounded mean and standard error.
TEST(SrReport, PermutationInvariantAndParsesBack) {
  Rng rng(12);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> rates{100.0 * rng.uniform(), 100.0 * rng.uniform(), 100.0 * rng.uniform()};
    auto a = sr_report_from_rates(rates);
    std::vector<double> shuffled{rates[2], rates[0], rates[1]};
    EXPECT_EQ(sr_report_from_rates(shuffled).formatted, a.formatted);
    auto [mean, se] = parse_formatted(a.formatted);
    EXPECT_NEAR(mean, a.mean, 0.005 + 1e-9);
    EXPECT_NEAR(se, a.std_error, 0.005 + 1e-9);
  }
}

TEST(Completion, RatesAndErrors) {
  EXPECT_NEAR(completion_rate(CompositeTrial({true, true, false})), 200.0 / 3.0, 1e-12);
  EXPECT_EQ(completion_rate(CompositeTrial({true, false})), 50.0);
  EXPECT_CODE(CompositeTrial(std::vector<bool>{}), kSchema);

  // 34 completed steps out of 60 over twenty 3-step trials.
  std::vector<CompositeTrial> trials;
  int remaining = 34;
  for (int t = 0; t < 20; ++t) {
    std::vector<bool> steps(3, false);
    for (int k = 0; k < 3 && remaining > 0; ++k, --remaining) steps[k] = true;
    trials.emplace_back(steps);
  }
  auto r = cr_report(trials);
  EXPECT_EQ(format_percent_value(r.mean), "56.67");
  EXPECT_NEAR(r.pooled_check, 34.0 / 60.0 * 100.0, 1e-9);
  EXPECT_EQ(r.per_trial.size(), 20u);

  trials.pop_back();
  EXPECT_CODE(cr_report(trials), kArity);
  trials.emplace_back(std::vector<bool>{true, true});
  EXPECT_CODE(cr_report(trials), kMixedM);
}

// Property: mean of per-trial rates equals the pooled step proportion.
TEST(Completion, MeanEqualsPooledProportion) {
  Rng rng(99);
  for (int set = 0; set < 1000; ++set) {
    const int m = 2 + static_cast<int>(rng.index(2));
    std::vector<CompositeTrial> trials;
    int done = 0;
    for (int t = 0; t < 20; ++t) {
      std::vector<bool> steps;
      for (int k = 0; k < m; ++k) {
        steps.push_back(rng.uniform() < 0.6);
        done += steps.back();
      }
      trials.emplace_back(steps);
    }
    auto r = cr_report(trials);
    const double pooled = 100.0 * done / (20.0 * m);
    ASSERT_NEAR(r.mean, pooled, 1e-9);
    ASSERT_NEAR(r.pooled_check, pooled, 1e-9);
  }
}

TEST(Harvest, RecordsFromInterleavedEvents) {
  auto a = run_events("a", "loading", 3, {1, 2, 3}, "completed");
  auto b = run_events("b", "loading", 3, {1}, nullptr);
  b.push_back(ev("b", 3, EventKind::kEscalation, Json{{"subtask_id", 2}}));
  std::vector<Event> all;
  for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
    if (i < a.size()) all.push_back(a[i]);
    if (i < b.size()) all.push_back(b[i]);
  }
  auto recs = records_from_events(all);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].run_id, "a");
  EXPECT_EQ(recs[0].final_status, orch::FinalStatus::kCompleted);
  EXPECT_EQ(recs[1].final_status, orch::FinalStatus::kSuspended);
  EXPECT_EQ(plan_length(recs[0]), 3);
}

TEST(Harvest, CompositeStepsFromSubtaskDone) {
  auto events = run_events("r1", "loading", 3, {1}, "aborted");
  auto more = run_events("r2", "loading", 3, {1, 2, 3}, "completed");
  events.insert(events.end(), more.begin(), more.end());
  auto h = harvest_from_logs(records_from_events(events), 3);
  ASSERT_TRUE(h.composite);
  ASSERT_EQ(h.trials.size(), 2u);
  EXPECT_EQ(h.trials[0].steps, (std::vector<bool>{true, false, false}));
  EXPECT_EQ(h.trials[1].steps, (std::vector<bool>{true, true, true}));
  auto report = report_json(h);
  EXPECT_EQ(report["task"], "loading");
  EXPECT_NEAR(report["cr"]["mean"].get<double>(), (100.0 / 3.0 + 100.0) / 2.0, 1e-9);
  EXPECT_EQ(report["cr"]["trials"], 2);
}

TEST(Harvest, SingleTaskBatchesAndErrors) {
  std::vector<Event> events;
  const char* statuses[] = {"completed", "aborted", "completed", "completed", "completed", "aborted"};
  for (int i = 0; i < 6; ++i) {
    auto r = run_events("r" + std::to_string(i), "open", 1, {}, statuses[i]);
    events.insert(events.end(), r.begin(), r.end());
  }
  auto recs = records_from_events(events);
  auto h = harvest_from_logs(recs, 1);
  ASSERT_EQ(h.batches.size(), 3u);
  EXPECT_EQ(h.batches[0].successes, 1);
  EXPECT_EQ(h.batches[1].successes, 2);
  EXPECT_EQ(h.batches[2].successes, 1);
  EXPECT_EQ(h.batches[2].total, 2);
  auto report = report_json(h);
  EXPECT_EQ(report["sr"]["formatted"], sr_report(h.batches).formatted);
  EXPECT_NE(report_table(report).find("SR"), std::string::npos);

  recs.pop_back();
  EXPECT_CODE(harvest_from_logs(recs, 1), kArity);
  auto other = records_from_events(run_events("x", "close", 1, {}, "completed"));
  recs.push_back(other[0]);
  EXPECT_CODE(harvest_from_logs(recs, 1), kInconsistentScenario);
  EXPECT_CODE(harvest_from_logs({}, 1), kArity);
}
