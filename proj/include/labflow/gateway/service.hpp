#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "labflow/core/image.hpp"
#include "labflow/knowledge/knowledge_base.hpp"
#include "labflow/orchestrator/workflow.hpp"

namespace httplib {
class Server;
}

namespace labflow::gateway {

enum class RunStatus { kRunning, kSuspended, kCompleted, kAborted };

std::string_view run_status_name(RunStatus status);

struct RunHandle {
  std::string run_id;
  RunStatus status = RunStatus::kRunning;
  std::string scenario;
  std::string created_at;  // ISO-8601 UTC
};

Json to_json(const RunHandle& handle);

std::string utc_timestamp();

// Builds the backends for a run; tests swap in fault-injecting verifiers.
using BackendFactory = std::function<orch::Backends(const orch::SystemConfig&)>;

struct ServiceOptions {
  std::filesystem::path state_dir = "labflow-state";  // logs and suspended states
  std::filesystem::path scenario_dir;                 // resolves scenario names
  std::string token;                                  // empty: no auth
};

// Owns every run started through the service. Each run executes on its own
// thread; its events go to <state_dir>/<run_id>.events.jsonl, which is also
// the source for event streams. Suspended runs are written to
// <state_dir>/<run_id>.state.json and reloaded on construction.
class RunManager {
 public:
  RunManager(std::shared_ptr<const knowledge::KnowledgeBase> kb, ServiceOptions options, BackendFactory factory = {});
  ~RunManager();
  RunManager(const RunManager&) = delete;
  RunManager& operator=(const RunManager&) = delete;

  // Body of POST /runs. SchemaError, ParseError, ValidationFatal, IoError.
  RunHandle create(const Json& request);
  std::vector<RunHandle> list() const;
  std::optional<RunHandle> get(const std::string& run_id) const;

  // Persisted events with seq > after_seq.
  std::vector<orch::Event> events_after(const std::string& run_id, std::uint64_t after_seq) const;
  // Blocks until the run has events past `seq`, the run stops running, or
  // the timeout passes. Returns true when new events exist.
  bool wait_for_events(const std::string& run_id, std::uint64_t seq, std::chrono::milliseconds timeout) const;

  // NoSuspendedSubtask when the run is not suspended (including when another
  // decision already won), InvalidReorderTarget, SchemaError.
  RunHandle intervene(const std::string& run_id, const Json& request);

  // Schematic view of the run's latest world state.
  Image latest_frame(const std::string& run_id) const;

  // Waits for every run thread to stop running.
  void wait_idle();

 private:
  struct Run;
  std::shared_ptr<Run> find(const std::string& run_id) const;
  void launch(const std::shared_ptr<Run>& run);
  void restore();

  std::shared_ptr<const knowledge::KnowledgeBase> kb_;
  ServiceOptions options_;
  BackendFactory factory_;
  mutable std::mutex mu_;
  std::vector<std::shared_ptr<Run>> runs_;
};

// HTTP front end over a RunManager.
class HttpService {
 public:
  explicit HttpService(RunManager& runs, std::string token = {});
  ~HttpService();

  // BindError when the port is taken. port 0 picks a free port.
  int bind(const std::string& host, int port);
  // Blocking accept loop; returns after stop().
  void listen();
  void stop();

 private:
  RunManager& runs_;
  std::string token_;
  std::shared_ptr<std::atomic<bool>> stopping_ = std::make_shared<std::atomic<bool>>(false);
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace labflow::gateway
