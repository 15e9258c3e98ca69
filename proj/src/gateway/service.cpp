#include "labflow/gateway/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <ctime>

#include "labflow/core/errors.hpp"
#include "labflow/core/json_io.hpp"
#include "labflow/world/render.hpp"
#include "labflow/world/scenario.hpp"

namespace labflow::gateway {

namespace fs = std::filesystem;

std::string_view run_status_name(RunStatus status) {
  switch (status) {
    case RunStatus::kRunning: return "running";
    case RunStatus::kSuspended: return "suspended";
    case RunStatus::kCompleted: return "completed";
    case RunStatus::kAborted: return "aborted";
  }
  return "running";
}

namespace {

std::optional<RunStatus> parse_run_status(std::string_view name) {
  for (auto s : {RunStatus::kRunning, RunStatus::kSuspended, RunStatus::kCompleted, RunStatus::kAborted}) {
    if (run_status_name(s) == name) return s;
  }
  return std::nullopt;
}

RunStatus status_from(const std::optional<orch::FinalStatus>& fs) {
  if (!fs) return RunStatus::kRunning;
  switch (*fs) {
    case orch::FinalStatus::kCompleted: return RunStatus::kCompleted;
    case orch::FinalStatus::kAborted: return RunStatus::kAborted;
    case orch::FinalStatus::kSuspended: return RunStatus::kSuspended;
  }
  return RunStatus::kRunning;
}

}  // namespace

Json to_json(const RunHandle& h) {
  return Json{{"run_id", h.run_id},
              {"status", std::string(run_status_name(h.status))},
              {"scenario", h.scenario},
              {"created_at", h.created_at}};
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct RunManager::Run {
  mutable std::mutex mu;
  mutable std::condition_variable cv;
  RunHandle handle;
  fs::path log_path;
  fs::path state_path;
  fs::path meta_path;
  std::optional<orch::SystemState> state;
  orch::Backends backends;
  world::WorldState latest_world;
  std::uint64_t persisted_seq = 0;
  std::unique_ptr<orch::JsonlEventWriter> writer;
  std::thread worker;
  bool busy = false;

  void write_meta() const { write_text_file(meta_path, to_json(handle).dump() + "\n"); }

  orch::EventObserver observer() {
    return [this](const orch::Event& e) {
      writer->write(e);
      std::lock_guard lock(mu);
      latest_world = state->world;
      persisted_seq = e.seq;
      cv.notify_all();
    };
  }

  // Called with `mu` held once the orchestrator loop has returned.
  void settle() {
    handle.status = status_from(state->record.final_status);
    if (handle.status == RunStatus::kRunning) handle.status = RunStatus::kAborted;
    if (handle.status == RunStatus::kSuspended) {
      write_text_file(state_path, orch::state_to_json(*state).dump() + "\n");
    } else {
      std::error_code ec;
      fs::remove(state_path, ec);
    }
    write_meta();
  }
};

RunManager::RunManager(std::shared_ptr<const knowledge::KnowledgeBase> kb, ServiceOptions options, BackendFactory factory)
    : kb_(std::move(kb)), options_(std::move(options)), factory_(std::move(factory)) {
  if (!factory_) {
    factory_ = [kb = kb_](const orch::SystemConfig& cfg) { return orch::make_backends(cfg, kb); };
  }
  std::error_code ec;
  fs::create_directories(options_.state_dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create state directory " + options_.state_dir.string());
  restore();
}

RunManager::~RunManager() { wait_idle(); }

void RunManager::restore() {
  for (const auto& entry : fs::directory_iterator(options_.state_dir)) {
    const auto name = entry.path().filename().string();
    const std::string suffix = ".meta.json";
    if (name.size() <= suffix.size() || name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0) continue;
    auto meta = read_json_file(entry.path());
    auto run = std::make_shared<Run>();
    run->handle.run_id = require_string(meta, "run_id", "run meta");
    run->handle.scenario = require_string(meta, "scenario", "run meta");
    run->handle.created_at = require_string(meta, "created_at", "run meta");
    run->handle.status = parse_run_status(require_string(meta, "status", "run meta")).value_or(RunStatus::kAborted);
    run->meta_path = entry.path();
    run->log_path = options_.state_dir / (run->handle.run_id + ".events.jsonl");
    run->state_path = options_.state_dir / (run->handle.run_id + ".state.json");
    if (fs::exists(run->state_path)) {
      run->state = orch::state_from_json(read_json_file(run->state_path));
      run->backends = factory_(run->state->config);
      run->latest_world = run->state->world;
    } else if (run->handle.status == RunStatus::kRunning || run->handle.status == RunStatus::kSuspended) {
      // Interrupted mid-run with nothing to resume from.
      run->handle.status = RunStatus::kAborted;
    }
    if (fs::exists(run->log_path)) {
      auto events = orch::read_event_log(run->log_path);
      run->persisted_seq = events.empty() ? 0 : events.back().seq;
    }
    run->writer = std::make_unique<orch::JsonlEventWriter>(run->log_path);
    runs_.push_back(run);
  }
  std::sort(runs_.begin(), runs_.end(), [](const auto& a, const auto& b) {
    return a->handle.created_at != b->handle.created_at ? a->handle.created_at < b->handle.created_at
                                                        : a->handle.run_id < b->handle.run_id;
  });
}

std::shared_ptr<RunManager::Run> RunManager::find(const std::string& run_id) const {
  std::lock_guard lock(mu_);
  for (const auto& r : runs_) {
    if (r->handle.run_id == run_id) return r;
  }
  return nullptr;
}

void RunManager::launch(const std::shared_ptr<Run>& run) {
  if (run->worker.joinable()) run->worker.join();
  run->busy = true;
  run->worker = std::thread([run] {
    try {
      orch::run_workflow(*run->state, run->backends, run->observer());
    } catch (const std::exception&) {
      // An unexpected failure leaves the record unfinished; settle() marks it aborted.
    }
    std::lock_guard lock(run->mu);
    run->settle();
    run->busy = false;
    run->cv.notify_all();
  });
}

RunHandle RunManager::create(const Json& request) {
  if (!request.is_object()) fail(ErrorCode::kSchema, "run request must be a JSON object");
  if (!request.contains("scenario")) fail(ErrorCode::kSchema, "run request needs a scenario");
  const auto& sj = request["scenario"];
  world::Scenario scenario;
  if (sj.is_object()) {
    scenario = world::scenario_from_json(sj);
  } else if (sj.is_string()) {
    const auto name = sj.get<std::string>();
    fs::path by_name = options_.scenario_dir / (name + ".json");
    if (!options_.scenario_dir.empty() && fs::exists(by_name)) scenario = world::load_scenario(by_name);
    else if (fs::exists(name)) scenario = world::load_scenario(name);
    else fail(ErrorCode::kIo, "unknown scenario '" + name + "'");
  } else {
    fail(ErrorCode::kSchema, "scenario must be a name or an object");
  }
  std::string text = scenario.protocol_text;
  if (request.contains("protocol") && !request["protocol"].is_null()) text = require_string(request, "protocol", "run request");
  orch::SystemConfig cfg;
  if (request.contains("config") && !request["config"].is_null()) cfg = orch::config_from_json(request["config"]);

  auto run = std::make_shared<Run>();
  run->state = orch::init_system(protocol::Protocol{text, scenario.name}, cfg, scenario, *kb_);
  run->backends = factory_(cfg);
  run->handle = RunHandle{run->state->run_id, RunStatus::kRunning, scenario.name, utc_timestamp()};
  run->log_path = options_.state_dir / (run->handle.run_id + ".events.jsonl");
  run->state_path = options_.state_dir / (run->handle.run_id + ".state.json");
  run->meta_path = options_.state_dir / (run->handle.run_id + ".meta.json");
  run->latest_world = run->state->world;
  run->writer = std::make_unique<orch::JsonlEventWriter>(run->log_path);
  run->write_meta();
  {
    std::lock_guard lock(mu_);
    runs_.push_back(run);
  }
  std::lock_guard lock(run->mu);
  launch(run);
  return run->handle;
}

std::vector<RunHandle> RunManager::list() const {
  std::vector<std::shared_ptr<Run>> runs;
  {
    std::lock_guard lock(mu_);
    runs = runs_;
  }
  std::vector<RunHandle> out;
  for (const auto& r : runs) {
    std::lock_guard lock(r->mu);
    out.push_back(r->handle);
  }
  return out;
}

std::optional<RunHandle> RunManager::get(const std::string& run_id) const {
  auto run = find(run_id);
  if (!run) return std::nullopt;
  std::lock_guard lock(run->mu);
  return run->handle;
}

std::vector<orch::Event> RunManager::events_after(const std::string& run_id, std::uint64_t after_seq) const {
  auto run = find(run_id);
  if (!run) fail(ErrorCode::kIo, "unknown run '" + run_id + "'");
  std::uint64_t upto;
  {
    std::lock_guard lock(run->mu);
    upto = run->persisted_seq;
  }
  if (upto <= after_seq || !fs::exists(run->log_path)) return {};
  auto text = read_text_file(run->log_path);
  // A concurrent append may leave a partial last line.
  auto end = text.rfind('\n');
  text.resize(end == std::string::npos ? 0 : end + 1);
  std::vector<orch::Event> out;
  for (auto& e : orch::parse_event_log(text)) {
    if (e.seq > after_seq && e.seq <= upto) out.push_back(std::move(e));
  }
  return out;
}

bool RunManager::wait_for_events(const std::string& run_id, std::uint64_t seq, std::chrono::milliseconds timeout) const {
  auto run = find(run_id);
  if (!run) return false;
  std::unique_lock lock(run->mu);
  run->cv.wait_for(lock, timeout, [&] { return run->persisted_seq > seq || run->handle.status != RunStatus::kRunning; });
  return run->persisted_seq > seq;
}

RunHandle RunManager::intervene(const std::string& run_id, const Json& request) {
  auto run = find(run_id);
  if (!run) fail(ErrorCode::kIo, "unknown run '" + run_id + "'");
  auto decision = orch::intervention_from_json(request);
  auto op = require_string(request, "operator", "intervention");
  if (op.empty()) fail(ErrorCode::kSchema, "intervention operator must not be empty");
  {
    // Claiming the run here makes the first valid decision win.
    std::lock_guard lock(run->mu);
    if (run->handle.status != RunStatus::kSuspended || !run->state) {
      fail(ErrorCode::kNoSuspendedSubtask, "run '" + run_id + "' is " + std::string(run_status_name(run->handle.status)));
    }
    run->handle.status = RunStatus::kRunning;
  }
  try {
    orch::submit_intervention(*run->state, decision, op, run->observer());
  } catch (...) {
    std::lock_guard lock(run->mu);
    run->handle.status = RunStatus::kSuspended;
    throw;
  }
  std::lock_guard lock(run->mu);
  if (run->state->finished()) {
    run->settle();
  } else {
    run->write_meta();
    launch(run);
  }
  return run->handle;
}

Image RunManager::latest_frame(const std::string& run_id) const {
  auto run = find(run_id);
  if (!run) fail(ErrorCode::kIo, "unknown run '" + run_id + "'");
  world::WorldState w;
  {
    std::lock_guard lock(run->mu);
    w = run->latest_world;
  }
  return world::render_observation(w).image;
}

void RunManager::wait_idle() {
  std::vector<std::shared_ptr<Run>> runs;
  {
    std::lock_guard lock(mu_);
    runs = runs_;
  }
  for (const auto& r : runs) {
    std::unique_lock lock(r->mu);
    r->cv.wait(lock, [&] { return !r->busy; });
    if (r->worker.joinable()) r->worker.join();
  }
}

namespace {

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSchema: return 400;
    case ErrorCode::kIo: return 404;
    case ErrorCode::kNoSuspendedSubtask: return 409;
    case ErrorCode::kInvalidReorderTarget:
    case ErrorCode::kParse:
    case ErrorCode::kValidationFatal:
    case ErrorCode::kUnmappableAction:
    case ErrorCode::kUnknownPredicate:
    case ErrorCode::kEmptyKnowledgeBase: return 422;
    case ErrorCode::kBackend: return 502;
    default: return 500;
  }
}

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  send_json(res, status, Json{{"error", std::string(code)}, {"message", message}});
}

template <typename F>
void guarded(httplib::Response& res, F&& body) {
  try {
    body();
  } catch (const Error& e) {
    send_error(res, http_status_for(e.code()), error_code_name(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    send_error(res, 400, "SchemaError", e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, "InternalError", e.what());
  }
}

Json parse_body(const httplib::Request& req) {
  try {
    return Json::parse(req.body);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::kSchema, std::string("request body is not JSON: ") + e.what());
  }
}

std::string sse_frame(const orch::Event& e) {
  return "id: " + std::to_string(e.seq) + "\nevent: " + std::string(orch::event_kind_name(e.kind)) +
         "\ndata: " + orch::to_json(e).dump() + "\n\n";
}

}  // namespace

HttpService::HttpService(RunManager& runs, std::string token)
    : runs_(runs), token_(std::move(token)), server_(std::make_unique<httplib::Server>()) {
  auto& svr = *server_;

  svr.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  svr.Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Authorization, Content-Type, Last-Event-Id");
    res.status = 204;
  });
  svr.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
    if (token_.empty() || req.method == "OPTIONS") return httplib::Server::HandlerResponse::Unhandled;
    if (req.get_header_value("Authorization") == "Bearer " + token_) return httplib::Server::HandlerResponse::Unhandled;
    send_error(res, 401, "Unauthorized", "missing or wrong bearer token");
    return httplib::Server::HandlerResponse::Handled;
  });

  svr.Post("/runs", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 201, to_json(runs_.create(parse_body(req)))); });
  });
  svr.Get("/runs", [this](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] {
      Json arr = Json::array();
      for (const auto& h : runs_.list()) arr.push_back(to_json(h));
      send_json(res, 200, arr);
    });
  });
  svr.Get(R"(/runs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto h = runs_.get(req.matches[1]);
      if (!h) fail(ErrorCode::kIo, "unknown run");
      send_json(res, 200, to_json(*h));
    });
  });
  svr.Post(R"(/runs/([^/]+)/intervention)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      std::string id = req.matches[1];
      if (!runs_.get(id)) fail(ErrorCode::kIo, "unknown run");
      send_json(res, 200, to_json(runs_.intervene(id, parse_body(req))));
    });
  });
  svr.Get(R"(/runs/([^/]+)/frame)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      res.status = 200;
      res.set_content(encode_png(runs_.latest_frame(req.matches[1])), "image/png");
    });
  });
  svr.Get(R"(/runs/([^/]+)/events)", [this](const httplib::Request& req, httplib::Response& res) {
    std::string id = req.matches[1];
    if (!runs_.get(id)) {
      send_error(res, 404, "IoError", "unknown run");
      return;
    }
    std::uint64_t start = 0;
    std::string last = req.get_header_value("Last-Event-Id");
    if (last.empty() && req.has_param("last_event_id")) last = req.get_param_value("last_event_id");
    if (!last.empty()) {
      try {
        start = std::stoull(last);
      } catch (const std::exception&) {
        send_error(res, 400, "SchemaError", "Last-Event-Id must be an integer");
        return;
      }
    }
    const bool once = req.has_param("once") && req.get_param_value("once") != "0";
    auto cursor = std::make_shared<std::uint64_t>(start);
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider("text/event-stream", [this, id, cursor, once, stopping = stopping_](std::size_t, httplib::DataSink& sink) {
      if (*stopping) return false;
      auto status = runs_.get(id)->status;
      auto events = runs_.events_after(id, *cursor);
      for (const auto& e : events) {
        auto frame = sse_frame(e);
        if (!sink.write(frame.data(), frame.size())) return false;
        *cursor = e.seq;
      }
      if (events.empty()) {
        if (once || status == RunStatus::kCompleted || status == RunStatus::kAborted) {
          sink.done();
          return true;
        }
        if (!sink.is_writable()) return false;
        runs_.wait_for_events(id, *cursor, std::chrono::milliseconds(200));
      }
      return true;
    });
  });
}

HttpService::~HttpService() { stop(); }

int HttpService::bind(const std::string& host, int port) {
  int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) fail(ErrorCode::kBind, "cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpService::listen() { server_->listen_after_bind(); }

void HttpService::stop() {
  *stopping_ = true;
  if (server_) server_->stop();
}

}  // namespace labflow::gateway
