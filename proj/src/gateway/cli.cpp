#include "labflow/gateway/cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "labflow/augment/augment.hpp"
#include "labflow/core/errors.hpp"
#include "labflow/core/json_io.hpp"
#include "labflow/gateway/service.hpp"
#include "labflow/gateway/simulate.hpp"
#include "labflow/metrics/metrics.hpp"
#include "labflow/orchestrator/workflow.hpp"
#include "labflow/protocol/parser.hpp"
#include "labflow/protocol/validate.hpp"
#include "labflow/world/scenario.hpp"

#ifndef LABFLOW_DEFAULT_DATA_DIR
#define LABFLOW_DEFAULT_DATA_DIR "data"
#endif

namespace labflow::gateway {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo:
    case ErrorCode::kSchema:
    case ErrorCode::kUnknownPredicate:
    case ErrorCode::kDecode:
    case ErrorCode::kLengthMismatch:
    case ErrorCode::kDuplicateKey:
    case ErrorCode::kEmptyKnowledgeBase: return kExitInput;
    case ErrorCode::kParse:
    case ErrorCode::kUnmappableAction:
    case ErrorCode::kValidationFatal:
    case ErrorCode::kEpochOutOfRange:
    case ErrorCode::kArity:
    case ErrorCode::kMixedM:
    case ErrorCode::kInconsistentScenario: return kExitData;
    case ErrorCode::kBind:
    case ErrorCode::kBackend: return kExitUnavailable;
    default: return kExitInternal;
  }
}

std::string default_kb() { return std::string(LABFLOW_DEFAULT_DATA_DIR) + "/knowledge_base.json"; }
std::string default_scenarios() { return std::string(LABFLOW_DEFAULT_DATA_DIR) + "/scenarios"; }

// Flags shared by run and simulate.
struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string kb_path = default_kb();
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON file mirroring SystemConfig");
  cmd->add_option("--seed", f.seed, "Seed for every stochastic component");
  cmd->add_option("--kb", f.kb_path, "Knowledge base JSON")->capture_default_str();
}

orch::SystemConfig load_config(const CommonFlags& f) {
  orch::SystemConfig cfg;
  if (!f.config_path.empty()) cfg = orch::config_from_json(read_json_file(f.config_path));
  if (f.seed) cfg.seed = *f.seed;
  return cfg;
}

std::shared_ptr<const knowledge::KnowledgeBase> load_kb(const std::string& path) {
  return std::make_shared<const knowledge::KnowledgeBase>(knowledge::load_knowledge_base(path));
}

enum class Format { kJson, kTable, kBoth };

void emit_report(const Json& report, Format format, std::ostream& out) {
  if (format != Format::kTable) out << report.dump() << "\n";
  if (format != Format::kJson) out << metrics::report_table(report);
}

Format parse_format(const std::string& s) {
  if (s == "json") return Format::kJson;
  if (s == "table") return Format::kTable;
  return Format::kBoth;
}

// Console mode: one decision per line, "resume_retry", "skip_subtask",
// "abort", "reorder <id>" or a JSON object. Empty optional on end of input.
std::optional<orch::Intervention> read_decision(std::istream& in, std::ostream& err) {
  std::string line;
  while (true) {
    err << "decision [resume_retry | skip_subtask | reorder <id> | abort]> " << std::flush;
    if (!std::getline(in, line)) return std::nullopt;
    try {
      Json j;
      if (!line.empty() && line.front() == '{') {
        j = Json::parse(line);
      } else {
        std::istringstream words(line);
        std::string decision;
        words >> decision;
        j = Json{{"decision", decision}};
        int front = 0;
        if (words >> front) j["front_id"] = front;
      }
      return orch::intervention_from_json(j);
    } catch (const std::exception& e) {
      err << "invalid decision: " << e.what() << "\n";
    }
  }
}

int exit_for(const orch::RunRecord& rec) {
  if (!rec.final_status) return kExitInternal;
  switch (*rec.final_status) {
    case orch::FinalStatus::kCompleted: return kExitCompleted;
    case orch::FinalStatus::kAborted: return kExitAborted;
    case orch::FinalStatus::kSuspended: return kExitSuspended;
  }
  return kExitInternal;
}

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted = true; }

}  // namespace

int cli_main(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Protocol-driven closed-loop lab automation"};
  app.require_subcommand(1);

  // parse
  std::string parse_protocol_path, parse_text, parse_scenario;
  CommonFlags parse_flags;
  auto* parse_cmd = app.add_subcommand("parse", "Parse a protocol into a task plan");
  auto* p_opt = parse_cmd->add_option("--protocol", parse_protocol_path, "Protocol text file");
  parse_cmd->add_option("--text", parse_text, "Protocol text")->excludes(p_opt);
  parse_cmd->add_option("--scenario", parse_scenario, "Also validate the plan against this scenario");
  add_common(parse_cmd, parse_flags);

  // run
  std::string run_protocol, run_scenario, run_log, run_state_out, run_mode, run_operator = "console";
  CommonFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "Execute one protocol in the simulated lab");
  run_cmd->add_option("--protocol", run_protocol, "Protocol text file")->required();
  run_cmd->add_option("--scenario", run_scenario, "Scenario JSON file")->required();
  run_cmd->add_option("--intervention", run_mode, "auto_abort | auto_retry | console | api");
  run_cmd->add_option("--log", run_log, "Append events to this JSONL file");
  run_cmd->add_option("--state-out", run_state_out, "Write the full state here if the run ends suspended");
  run_cmd->add_option("--operator", run_operator, "Name recorded with console decisions");
  add_common(run_cmd, run_flags);

  // simulate
  std::string sim_scenario, sim_protocol, sim_log, sim_format = "both";
  int sim_trials = 0, sim_reps = 3;
  std::optional<double> sim_success, sim_noise;
  std::optional<int> sim_retries;
  CommonFlags sim_flags;
  auto* sim_cmd = app.add_subcommand("simulate", "Run seeded trials and report SR or CR");
  sim_cmd->add_option("--trials", sim_trials, "Number of runs")->required();
  sim_cmd->add_option("--scenario", sim_scenario, "Scenario JSON file")->required();
  sim_cmd->add_option("--protocol", sim_protocol, "Protocol text file (default: the scenario's own)");
  sim_cmd->add_option("--success-prob", sim_success, "Execution success probability for every action kind");
  sim_cmd->add_option("--noise", sim_noise, "Verifier flip rate");
  sim_cmd->add_option("--max-retries", sim_retries, "Post-verification retries before escalation");
  sim_cmd->add_option("--repetitions", sim_reps, "Repetition groups for single-task scenarios")->capture_default_str();
  sim_cmd->add_option("--log", sim_log, "Write every run's events to this JSONL file");
  sim_cmd->add_option("--format", sim_format, "json | table | both")->check(CLI::IsMember({"json", "table", "both"}));
  add_common(sim_cmd, sim_flags);

  // augment
  std::string aug_episode, aug_schedule, aug_out;
  int aug_epoch = 0;
  std::uint64_t aug_seed = 0;
  auto* aug_cmd = app.add_subcommand("augment", "Apply the lighting curriculum to an episode");
  aug_cmd->add_option("--episode", aug_episode, "Episode directory")->required();
  aug_cmd->add_option("--epoch", aug_epoch, "Training epoch")->required();
  aug_cmd->add_option("--schedule", aug_schedule, "Curriculum schedule JSON")->required();
  aug_cmd->add_option("--seed", aug_seed, "Seed for operator choice");
  aug_cmd->add_option("--out", aug_out, "Output directory")->required();

  // report
  std::vector<std::string> rep_logs;
  std::string rep_format = "both", rep_scenario;
  int rep_reps = 3;
  std::optional<int> rep_plan_len;
  auto* rep_cmd = app.add_subcommand("report", "Compute SR or CR from saved event logs");
  rep_cmd->add_option("--log", rep_logs, "JSONL event log (repeatable)")->required();
  rep_cmd->add_option("--scenario", rep_scenario, "Only runs of this scenario");
  rep_cmd->add_option("--plan-len", rep_plan_len, "Subtasks per run (default: from run_started)");
  rep_cmd->add_option("--repetitions", rep_reps, "Repetition groups for single-task scenarios")->capture_default_str();
  rep_cmd->add_option("--format", rep_format, "json | table | both")->check(CLI::IsMember({"json", "table", "both"}));

  // serve
  std::string srv_host = "127.0.0.1", srv_state = "labflow-state", srv_scenarios = default_scenarios(), srv_kb = default_kb();
  std::string srv_token;
  int srv_port = 8080;
  auto* srv_cmd = app.add_subcommand("serve", "HTTP and event-stream service for runs and interventions");
  srv_cmd->add_option("--host", srv_host)->capture_default_str();
  srv_cmd->add_option("--port", srv_port, "0 picks a free port")->capture_default_str();
  srv_cmd->add_option("--state-dir", srv_state, "Event logs and suspended states")->capture_default_str();
  srv_cmd->add_option("--scenario-dir", srv_scenarios, "Resolves scenario names")->capture_default_str();
  srv_cmd->add_option("--kb", srv_kb, "Knowledge base JSON")->capture_default_str();
  srv_cmd->add_option("--token", srv_token, "Require this bearer token")->envname("LABFLOW_TOKEN");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*parse_cmd) {
      if (parse_protocol_path.empty() && parse_text.empty()) throw UsageError("parse needs --protocol or --text");
      auto cfg = load_config(parse_flags);
      std::string text = parse_text.empty() ? read_text_file(parse_protocol_path) : parse_text;
      auto plan = protocol::parse_protocol(protocol::Protocol{text, parse_protocol_path}, orch::parser_config(cfg));
      if (parse_scenario.empty()) {
        out << protocol::to_json(plan).dump(2) << "\n";
        return kExitCompleted;
      }
      auto scenario = world::load_scenario(parse_scenario);
      auto kb = load_kb(parse_flags.kb_path);
      auto report = protocol::validate_plan(plan, *kb, world::init_world(scenario));
      out << Json{{"plan", protocol::to_json(plan)}, {"validation", protocol::to_json(report)}}.dump(2) << "\n";
      return report.has_errors() ? kExitData : kExitCompleted;
    }

    if (*run_cmd) {
      auto cfg = load_config(run_flags);
      if (!run_mode.empty()) {
        auto mode = orch::parse_intervention_mode(run_mode);
        if (!mode) throw UsageError("unknown --intervention '" + run_mode + "'");
        cfg.intervention_mode = *mode;
      }
      auto text = read_text_file(run_protocol);
      auto scenario = world::load_scenario(run_scenario);
      auto kb = load_kb(run_flags.kb_path);
      auto state = orch::init_system(protocol::Protocol{text, run_protocol}, cfg, scenario, *kb);
      auto backends = orch::make_backends(cfg, kb);
      std::unique_ptr<orch::JsonlEventWriter> writer;
      if (!run_log.empty()) writer = std::make_unique<orch::JsonlEventWriter>(run_log);
      orch::EventObserver observer = [&](const orch::Event& e) {
        if (writer) writer->write(e);
      };
      orch::run_workflow(state, backends, observer);
      while (cfg.intervention_mode == orch::InterventionMode::kConsole && state.suspension) {
        err << "subtask " << state.suspension->subtask_id << " suspended (" << verify::phase_name(state.suspension->phase)
            << "): " << state.suspension->reason << "\n";
        auto decision = read_decision(in, err);
        if (!decision) break;
        try {
          orch::submit_intervention(state, *decision, run_operator, observer);
        } catch (const Error& e) {
          err << e.what() << "\n";
          continue;
        }
        if (!state.finished()) orch::run_workflow(state, backends, observer);
      }
      if (state.record.final_status == orch::FinalStatus::kSuspended && !run_state_out.empty()) {
        write_text_file(run_state_out, orch::state_to_json(state).dump() + "\n");
      }
      out << Json{{"run_id", state.run_id},
                  {"scenario", state.scenario_name},
                  {"status", std::string(orch::final_status_name(*state.record.final_status))},
                  {"events", state.record.events.size()},
                  {"expected_final_satisfied", world::satisfies_all(state.world, state.expected_final)}}
                 .dump()
          << "\n";
      return exit_for(state.record);
    }

    if (*sim_cmd) {
      if (sim_trials < 1) throw UsageError("--trials must be at least 1");
      SimulationRequest req;
      req.config = load_config(sim_flags);
      if (sim_success) req.config.success_prob = world::SuccessTable(*sim_success);
      if (sim_noise) req.config.noise_rate = *sim_noise;
      if (sim_retries) req.config.max_retries = *sim_retries;
      req.config.validate();
      req.scenario = world::load_scenario(sim_scenario);
      if (!sim_protocol.empty()) req.protocol = read_text_file(sim_protocol);
      req.trials = sim_trials;
      req.base_seed = req.config.seed;
      std::unique_ptr<orch::JsonlEventWriter> writer;
      if (!sim_log.empty()) {
        std::ofstream(sim_log, std::ios::trunc);
        writer = std::make_unique<orch::JsonlEventWriter>(sim_log);
      }
      auto records = simulate(req, load_kb(sim_flags.kb_path), [&](const orch::Event& e) {
        if (writer) writer->write(e);
      });
      auto harvest = metrics::harvest_from_logs(records, metrics::plan_length(records.front()), sim_reps);
      emit_report(metrics::report_json(harvest), parse_format(sim_format), out);
      return kExitCompleted;
    }

    if (*aug_cmd) {
      auto episode = augment::ingest_episode(aug_episode);
      auto sched = augment::schedule_from_json(read_json_file(aug_schedule));
      auto manifest = augment::augment_episode(episode, aug_epoch, sched, aug_seed, aug_out);
      out << manifest.dump() << "\n";
      return kExitCompleted;
    }

    if (*rep_cmd) {
      // Run ids are only unique within one log, so group runs per file.
      std::vector<orch::RunRecord> records;
      for (const auto& path : rep_logs) {
        auto part = metrics::records_from_events(orch::read_event_log(path));
        records.insert(records.end(), part.begin(), part.end());
      }
      if (!rep_scenario.empty()) {
        std::erase_if(records, [&](const orch::RunRecord& r) { return r.scenario != rep_scenario; });
      }
      if (records.empty()) fail(ErrorCode::kIo, "no runs found in the given logs");
      int m = rep_plan_len ? *rep_plan_len : metrics::plan_length(records.front());
      auto harvest = metrics::harvest_from_logs(records, m, rep_reps);
      emit_report(metrics::report_json(harvest), parse_format(rep_format), out);
      return kExitCompleted;
    }

    if (*srv_cmd) {
      RunManager runs(load_kb(srv_kb), ServiceOptions{srv_state, srv_scenarios, srv_token});
      HttpService service(runs, srv_token);
      int port = service.bind(srv_host, srv_port);
      out << "listening on http://" << srv_host << ":" << port << std::endl;
      g_interrupted = false;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::thread loop([&] { service.listen(); });
      while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      service.stop();
      loop.join();
      return kExitCompleted;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace labflow::gateway
