#include "labflow/metrics/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>

#include "labflow/core/errors.hpp"

namespace labflow::metrics {

TrialBatch::TrialBatch(int s, int t) : successes(s), total(t) {
  if (t < 1 || s < 0 || s > t) {
    fail(ErrorCode::kSchema, "trial batch needs 0 <= successes <= total and total >= 1, got " + std::to_string(s) + "/" +
                                 std::to_string(t));
  }
}

double success_rate(const TrialBatch& b) { return static_cast<double>(b.successes) / b.total * 100.0; }

std::string format_percent_value(double x) {
  long long hundredths = std::llround(x * 100.0);
  const char* sign = hundredths < 0 ? "-" : "";
  long long a = std::llabs(hundredths);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%lld.%02lld", sign, a / 100, a % 100);
  return buf;
}

SrReport sr_report_from_rates(const std::vector<double>& rates) {
  if (rates.size() != 3) fail(ErrorCode::kArity, "sr_report needs exactly 3 repetitions, got " + std::to_string(rates.size()));
  SrReport r;
  double sum = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    r.per_rep[i] = rates[i];
    sum += rates[i];
  }
  r.mean = sum / 3.0;
  double ss = 0.0;
  for (double v : r.per_rep) ss += (v - r.mean) * (v - r.mean);
  r.sample_std = std::sqrt(ss / 2.0);
  r.std_error = r.sample_std / std::sqrt(3.0);
  r.formatted = format_percent_value(r.mean) + "% ± " + format_percent_value(r.std_error);
  return r;
}

SrReport sr_report(const std::vector<TrialBatch>& reps) {
  if (reps.size() != 3) fail(ErrorCode::kArity, "sr_report needs exactly 3 repetitions, got " + std::to_string(reps.size()));
  std::vector<double> rates;
  for (const auto& b : reps) rates.push_back(success_rate(b));
  return sr_report_from_rates(rates);
}

CompositeTrial::CompositeTrial(std::vector<bool> s) : steps(std::move(s)), m(static_cast<int>(steps.size())) {
  if (m < 1) fail(ErrorCode::kSchema, "a composite trial needs at least one step");
}

double completion_rate(const CompositeTrial& t) {
  if (t.m < 1 || static_cast<std::size_t>(t.m) != t.steps.size()) fail(ErrorCode::kSchema, "trial step count does not match m");
  int done = 0;
  for (bool x : t.steps) done += x;
  return static_cast<double>(done) / t.m * 100.0;
}

double mean_completion_rate(const std::vector<CompositeTrial>& trials) {
  if (trials.empty()) fail(ErrorCode::kArity, "no trials");
  double sum = 0.0;
  for (const auto& t : trials) sum += completion_rate(t);
  return sum / static_cast<double>(trials.size());
}

double pooled_completion_rate(const std::vector<CompositeTrial>& trials) {
  if (trials.empty()) fail(ErrorCode::kArity, "no trials");
  long long done = 0, total = 0;
  for (const auto& t : trials) {
    for (bool x : t.steps) done += x;
    total += t.m;
  }
  return static_cast<double>(done) / static_cast<double>(total) * 100.0;
}

namespace {

void check_uniform_m(const std::vector<CompositeTrial>& trials) {
  for (const auto& t : trials) {
    if (t.m != trials.front().m) fail(ErrorCode::kMixedM, "trials mix step counts " + std::to_string(trials.front().m) + " and " + std::to_string(t.m));
  }
}

}  // namespace

CrReport cr_report(const std::vector<CompositeTrial>& trials) {
  if (trials.size() != kTrialsPerCrReport) {
    fail(ErrorCode::kArity, "cr_report needs exactly 20 trials, got " + std::to_string(trials.size()));
  }
  check_uniform_m(trials);
  CrReport r;
  for (const auto& t : trials) r.per_trial.push_back(completion_rate(t));
  r.mean = mean_completion_rate(trials);
  r.pooled_check = pooled_completion_rate(trials);
  return r;
}

std::vector<orch::RunRecord> records_from_events(const std::vector<orch::Event>& events) {
  std::vector<orch::RunRecord> out;
  std::map<std::string, std::size_t> index;
  for (const auto& e : events) {
    auto [it, fresh] = index.try_emplace(e.run_id, out.size());
    if (fresh) {
      out.emplace_back();
      out.back().run_id = e.run_id;
    }
    auto& rec = out[it->second];
    rec.events.push_back(e);
    if (e.kind == orch::EventKind::kRunStarted && e.payload.contains("scenario")) {
      rec.scenario = e.payload["scenario"].get<std::string>();
    }
    if (e.kind == orch::EventKind::kRunFinished && e.payload.contains("status")) {
      rec.final_status = orch::parse_final_status(e.payload["status"].get<std::string>());
    }
  }
  for (auto& rec : out) {
    if (!rec.final_status && !rec.events.empty() && rec.events.back().kind == orch::EventKind::kEscalation) {
      rec.final_status = orch::FinalStatus::kSuspended;
    }
  }
  return out;
}

int plan_length(const orch::RunRecord& record) {
  for (const auto& e : record.events) {
    if (e.kind == orch::EventKind::kRunStarted && e.payload.contains("subtasks")) return e.payload["subtasks"].get<int>();
  }
  fail(ErrorCode::kSchema, "run " + record.run_id + " has no run_started event");
}

Harvest harvest_from_logs(const std::vector<orch::RunRecord>& records, int plan_len, int repetitions) {
  if (records.empty()) fail(ErrorCode::kArity, "no runs to harvest");
  if (plan_len < 1) fail(ErrorCode::kSchema, "plan length must be >= 1");
  Harvest h;
  h.scenario = records.front().scenario;
  for (const auto& r : records) {
    if (r.scenario != h.scenario) {
      fail(ErrorCode::kInconsistentScenario, "runs mix scenarios '" + h.scenario + "' and '" + r.scenario + "'");
    }
  }
  h.composite = plan_len >= 2;
  if (!h.composite) {
    if (repetitions < 1 || records.size() % static_cast<std::size_t>(repetitions) != 0) {
      fail(ErrorCode::kArity, std::to_string(records.size()) + " runs do not split into " + std::to_string(repetitions) +
                                  " equal repetitions");
    }
    const int per = static_cast<int>(records.size()) / repetitions;
    for (int g = 0; g < repetitions; ++g) {
      int ok = 0;
      for (int i = 0; i < per; ++i) ok += records[g * per + i].final_status == orch::FinalStatus::kCompleted;
      h.batches.emplace_back(ok, per);
    }
    return h;
  }
  for (const auto& r : records) {
    std::vector<bool> steps(static_cast<std::size_t>(plan_len), false);
    for (const auto& e : r.events) {
      if (e.kind != orch::EventKind::kSubtaskDone) continue;
      int id = e.payload.at("subtask_id").get<int>();
      if (id >= 1 && id <= plan_len) steps[id - 1] = true;
    }
    h.trials.emplace_back(std::move(steps));
  }
  return h;
}

Json report_json(const Harvest& h) {
  Json out{{"task", h.scenario}};
  if (!h.composite) {
    auto r = sr_report(h.batches);
    out["sr"] = Json{{"mean", r.mean}, {"se", r.std_error}, {"formatted", r.formatted}, {"per_rep", r.per_rep}};
    return out;
  }
  check_uniform_m(h.trials);
  Json per = Json::array();
  for (const auto& t : h.trials) per.push_back(completion_rate(t));
  const double mean = mean_completion_rate(h.trials);
  out["cr"] = Json{{"mean", mean},
                   {"pooled", pooled_completion_rate(h.trials)},
                   {"formatted", format_percent_value(mean) + "%"},
                   {"trials", h.trials.size()},
                   {"per_trial", per}};
  return out;
}

std::string report_table(const Json& report) {
  std::string task = report.value("task", std::string());
  char line[256];
  std::string out;
  std::snprintf(line, sizeof line, "%-32s %-6s %s\n", "task", "metric", "value");
  out += line;
  if (report.contains("sr")) {
    std::snprintf(line, sizeof line, "%-32s %-6s %s\n", task.c_str(), "SR", report["sr"]["formatted"].get<std::string>().c_str());
  } else {
    const auto& cr = report["cr"];
    std::string v = cr["formatted"].get<std::string>() + " over " + std::to_string(cr["trials"].get<std::size_t>()) + " trials";
    std::snprintf(line, sizeof line, "%-32s %-6s %s\n", task.c_str(), "CR", v.c_str());
  }
  out += line;
  return out;
}

}  // namespace labflow::metrics
