#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "labflow/core/vocabulary.hpp"
#include "labflow/orchestrator/events.hpp"

namespace labflow::metrics {

// One repetition: successes out of total trials. SchemaError when invalid.
struct TrialBatch {
  int successes = 0;
  int total = 1;

  TrialBatch() = default;
  TrialBatch(int successes, int total);
};

double success_rate(const TrialBatch& batch);  // percent

// Two decimals, halves rounded away from zero.
std::string format_percent_value(double x);

struct SrReport {
  std::array<double, 3> per_rep{};
  double mean = 0.0;
  double sample_std = 0.0;  // divisor n - 1
  double std_error = 0.0;   // sample_std / sqrt(3)
  std::string formatted;    // "XX.XX% ± Y.YY"
};

SrReport sr_report(const std::vector<TrialBatch>& reps);  // ArityError unless 3
SrReport sr_report_from_rates(const std::vector<double>& rates);

struct CompositeTrial {
  std::vector<bool> steps;
  int m = 0;

  CompositeTrial() = default;
  explicit CompositeTrial(std::vector<bool> steps);
};

double completion_rate(const CompositeTrial& trial);  // percent
// Mean of per-trial rates and the pooled step proportion, for any trial count.
double mean_completion_rate(const std::vector<CompositeTrial>& trials);
double pooled_completion_rate(const std::vector<CompositeTrial>& trials);

inline constexpr std::size_t kTrialsPerCrReport = 20;

struct CrReport {
  std::vector<double> per_trial;
  double mean = 0.0;
  double pooled_check = 0.0;
};

CrReport cr_report(const std::vector<CompositeTrial>& trials);  // ArityError, MixedM

struct Harvest {
  std::string scenario;
  bool composite = false;
  std::vector<TrialBatch> batches;     // single-task scenarios
  std::vector<CompositeTrial> trials;  // composite scenarios
};

// Groups events by run_id in first-seen order and recovers scenario and
// final status from run_started and run_finished.
std::vector<orch::RunRecord> records_from_events(const std::vector<orch::Event>& events);

// plan_len 1 counts completed runs in `repetitions` equal consecutive
// groups; plan_len >= 2 yields one trial per run with step k set when
// subtask k reached done. InconsistentScenario, ArityError.
Harvest harvest_from_logs(const std::vector<orch::RunRecord>& records, int plan_len, int repetitions = 3);

// Plan length taken from the run_started payload of the first record.
int plan_length(const orch::RunRecord& record);

// {"task", "sr": {...}} or {"task", "cr": {...}}. Composite reports carry
// the per-trial rates, their mean and the pooled proportion.
Json report_json(const Harvest& harvest);
std::string report_table(const Json& report);

}  // namespace labflow::metrics
