#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "labflow/core/vocabulary.hpp"

namespace labflow::orch {

enum class EventKind {
  kRunStarted,
  kPreVerdict,
  kExecution,
  kPostVerdict,
  kDecision,
  kReorder,
  kEscalation,
  kIntervention,
  kSubtaskDone,
  kRunFinished,
};

std::string_view event_kind_name(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view name);

struct Event {
  std::string run_id;
  std::uint64_t seq = 0;   // gapless from 1 within a run
  std::uint64_t tick = 0;  // world tick, never wall-clock time
  EventKind kind = EventKind::kRunStarted;
  Json payload = Json::object();
};

// {"run_id","seq","tick","kind","payload"}; dumped as one JSONL line.
Json to_json(const Event& event);
Event event_from_json(const Json& j);

enum class FinalStatus { kCompleted, kAborted, kSuspended };

std::string_view final_status_name(FinalStatus status);
std::optional<FinalStatus> parse_final_status(std::string_view name);

struct RunRecord {
  std::string run_id;
  std::string scenario;
  std::vector<Event> events;
  std::optional<FinalStatus> final_status;  // empty while the run is live

  std::size_t count(EventKind kind) const;
};

using EventObserver = std::function<void(const Event&)>;

// Appends one line per event and flushes, so readers can tail the file.
class JsonlEventWriter {
 public:
  explicit JsonlEventWriter(const std::filesystem::path& path);
  void write(const Event& event);

 private:
  std::mutex mu_;
  std::ofstream out_;
};

// IoError when unreadable, ParseError on malformed lines.
std::vector<Event> read_event_log(const std::filesystem::path& path);
std::vector<Event> parse_event_log(std::string_view text);

}  // namespace labflow::orch
