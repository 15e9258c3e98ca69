#include "labflow/orchestrator/events.hpp"

#include <algorithm>
#include <sstream>

#include "labflow/core/errors.hpp"
#include "labflow/core/json_io.hpp"

namespace labflow::orch {

namespace {

constexpr std::pair<EventKind, std::string_view> kEventNames[] = {
    {EventKind::kRunStarted, "run_started"},     {EventKind::kPreVerdict, "pre_verdict"},
    {EventKind::kExecution, "execution"},        {EventKind::kPostVerdict, "post_verdict"},
    {EventKind::kDecision, "decision"},          {EventKind::kReorder, "reorder"},
    {EventKind::kEscalation, "escalation"},      {EventKind::kIntervention, "intervention"},
    {EventKind::kSubtaskDone, "subtask_done"},   {EventKind::kRunFinished, "run_finished"},
};

}  // namespace

std::string_view event_kind_name(EventKind kind) {
  for (const auto& [k, name] : kEventNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<EventKind> parse_event_kind(std::string_view name) {
  for (const auto& [k, n] : kEventNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::string_view final_status_name(FinalStatus status) {
  switch (status) {
    case FinalStatus::kCompleted: return "completed";
    case FinalStatus::kAborted: return "aborted";
    case FinalStatus::kSuspended: return "suspended";
  }
  return "completed";
}

std::optional<FinalStatus> parse_final_status(std::string_view name) {
  for (auto s : {FinalStatus::kCompleted, FinalStatus::kAborted, FinalStatus::kSuspended}) {
    if (final_status_name(s) == name) return s;
  }
  return std::nullopt;
}

std::size_t RunRecord::count(EventKind kind) const {
  return static_cast<std::size_t>(std::count_if(events.begin(), events.end(), [&](const Event& e) { return e.kind == kind; }));
}

Json to_json(const Event& e) {
  Json j;
  j["run_id"] = e.run_id;
  j["seq"] = e.seq;
  j["tick"] = e.tick;
  j["kind"] = std::string(event_kind_name(e.kind));
  j["payload"] = e.payload;
  return j;
}

Event event_from_json(const Json& j) {
  Event e;
  e.run_id = require_string(j, "run_id", "event");
  const auto& seq = require(j, "seq", "event");
  const auto& tick = require(j, "tick", "event");
  if (!seq.is_number_unsigned() || !tick.is_number_unsigned()) fail(ErrorCode::kSchema, "event seq and tick must be non-negative integers");
  e.seq = seq.get<std::uint64_t>();
  e.tick = tick.get<std::uint64_t>();
  auto kind = parse_event_kind(require_string(j, "kind", "event"));
  if (!kind) fail(ErrorCode::kSchema, "unknown event kind");
  e.kind = *kind;
  e.payload = require(j, "payload", "event");
  return e;
}

JsonlEventWriter::JsonlEventWriter(const std::filesystem::path& path) : out_(path, std::ios::app) {
  if (!out_) fail(ErrorCode::kIo, "cannot open event log " + path.string());
}

void JsonlEventWriter::write(const Event& event) {
  std::lock_guard lock(mu_);
  out_ << to_json(event).dump() << '\n';
  out_.flush();
}

std::vector<Event> parse_event_log(std::string_view text) {
  std::vector<Event> events;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      events.push_back(event_from_json(Json::parse(line)));
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorCode::kParse, "event log line " + std::to_string(lineno) + ": " + e.what());
    } catch (const Error& e) {
      fail(ErrorCode::kParse, "event log line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return events;
}

std::vector<Event> read_event_log(const std::filesystem::path& path) { return parse_event_log(read_text_file(path)); }

}  // namespace labflow::orch
