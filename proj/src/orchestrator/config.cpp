#include "labflow/orchestrator/config.hpp"

#include "labflow/core/errors.hpp"
#include "labflow/core/json_io.hpp"

namespace labflow::orch {

std::string_view intervention_mode_name(InterventionMode mode) {
  switch (mode) {
    case InterventionMode::kAutoAbort: return "auto_abort";
    case InterventionMode::kAutoRetry: return "auto_retry";
    case InterventionMode::kConsole: return "console";
    case InterventionMode::kApi: return "api";
  }
  return "auto_abort";
}

std::optional<InterventionMode> parse_intervention_mode(std::string_view name) {
  for (auto m : {InterventionMode::kAutoAbort, InterventionMode::kAutoRetry, InterventionMode::kConsole, InterventionMode::kApi}) {
    if (intervention_mode_name(m) == name) return m;
  }
  return std::nullopt;
}

namespace {

std::string_view keying_name(verify::RetrievalKeying k) {
  switch (k) {
    case verify::RetrievalKeying::kConditionAndIndex: return "condition_and_index";
    case verify::RetrievalKeying::kConditionOnly: return "condition";
    case verify::RetrievalKeying::kIndexOnly: return "index";
  }
  return "condition_and_index";
}

void check_backend(const BackendSpec& spec, std::string_view role, std::string_view local) {
  if (spec.kind == "remote") {
    if (!spec.endpoint || spec.endpoint->empty()) fail(ErrorCode::kSchema, std::string(role) + " remote backend requires an endpoint");
  } else if (spec.kind != local) {
    fail(ErrorCode::kSchema, std::string(role) + " backend must be '" + std::string(local) + "' or 'remote', got '" + spec.kind + "'");
  }
}

Json backend_json(const BackendSpec& spec) {
  Json j{{"kind", spec.kind}};
  j["endpoint"] = spec.endpoint ? Json(*spec.endpoint) : Json(nullptr);
  return j;
}

BackendSpec backend_from_json(const Json& j, const BackendSpec& fallback) {
  if (j.is_string()) return BackendSpec{j.get<std::string>(), std::nullopt};
  if (!j.is_object()) fail(ErrorCode::kSchema, "backend spec must be a string or an object");
  BackendSpec s = fallback;
  if (j.contains("kind")) s.kind = require_string(j, "kind", "backend spec");
  if (j.contains("endpoint")) {
    s.endpoint = j["endpoint"].is_null() ? std::nullopt : std::optional<std::string>(require_string(j, "endpoint", "backend spec"));
  }
  return s;
}

template <typename T>
T field(const Json& j, const char* name, T fallback) {
  if (!j.contains(name)) return fallback;
  try {
    return j[name].get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorCode::kSchema, std::string("config field '") + name + "' has the wrong type");
  }
}

}  // namespace

void SystemConfig::validate() const {
  if (max_retries < 0) fail(ErrorCode::kSchema, "max_retries must be >= 0");
  if (retrieval_k < 1) fail(ErrorCode::kSchema, "retrieval_k must be >= 1");
  if (horizon < 1) fail(ErrorCode::kSchema, "horizon must be >= 1");
  if (!(noise_rate >= 0.0 && noise_rate <= 1.0)) fail(ErrorCode::kSchema, "noise_rate must lie in [0, 1]");
  if (timeout_seconds < 1) fail(ErrorCode::kSchema, "timeout_seconds must be >= 1");
  if (action_vocabulary.empty()) fail(ErrorCode::kSchema, "action_vocabulary must not be empty");
  manipulator.check();
  check_backend(model_selection.llm, "llm", "rule_based");
  check_backend(model_selection.vlm, "vlm", "oracle");
  check_backend(model_selection.vla, "vla", "scripted");
}

Json to_json(const SystemConfig& c) {
  Json j;
  j["model_selection"] = Json{{"llm", backend_json(c.model_selection.llm)},
                              {"vlm", backend_json(c.model_selection.vlm)},
                              {"vla", backend_json(c.model_selection.vla)}};
  j["manipulator"] = world::to_json(c.manipulator);
  j["retrieval_k"] = c.retrieval_k;
  j["max_retries"] = c.max_retries;
  j["noise_rate"] = c.noise_rate;
  j["success_prob"] = c.success_prob.to_json();
  j["seed"] = c.seed;
  j["intervention_mode"] = std::string(intervention_mode_name(c.intervention_mode));
  j["horizon"] = c.horizon;
  j["retrieval_keying"] = std::string(keying_name(c.retrieval_keying));
  j["allow_empty_retrieval"] = c.allow_empty_retrieval;
  Json vocab = Json::array();
  for (auto k : c.action_vocabulary) vocab.push_back(std::string(action_kind_name(k)));
  j["action_vocabulary"] = vocab;
  j["timeout_seconds"] = c.timeout_seconds;
  return j;
}

SystemConfig config_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::kSchema, "config must be a JSON object");
  SystemConfig c;
  if (j.contains("model_selection")) {
    const auto& m = j["model_selection"];
    if (!m.is_object()) fail(ErrorCode::kSchema, "model_selection must be an object");
    if (m.contains("llm")) c.model_selection.llm = backend_from_json(m["llm"], c.model_selection.llm);
    if (m.contains("vlm")) c.model_selection.vlm = backend_from_json(m["vlm"], c.model_selection.vlm);
    if (m.contains("vla")) c.model_selection.vla = backend_from_json(m["vla"], c.model_selection.vla);
  }
  if (j.contains("manipulator")) {
    const auto& m = j["manipulator"];
    if (m.is_string()) {
      auto mode = m.get<std::string>();
      if (mode != "single" && mode != "dual") fail(ErrorCode::kSchema, "manipulator must be 'single', 'dual' or a robot state");
      c.manipulator = world::RobotState::home(mode == "dual" ? world::ArmMode::kDual : world::ArmMode::kSingle);
    } else {
      c.manipulator = world::robot_state_from_json(m);
    }
  }
  c.retrieval_k = field<std::size_t>(j, "retrieval_k", c.retrieval_k);
  c.max_retries = field<int>(j, "max_retries", c.max_retries);
  c.noise_rate = field<double>(j, "noise_rate", c.noise_rate);
  if (j.contains("success_prob")) c.success_prob = world::SuccessTable::from_json(j["success_prob"]);
  c.seed = field<std::uint64_t>(j, "seed", c.seed);
  if (j.contains("intervention_mode")) {
    auto mode = parse_intervention_mode(field<std::string>(j, "intervention_mode", ""));
    if (!mode) fail(ErrorCode::kSchema, "unknown intervention_mode");
    c.intervention_mode = *mode;
  }
  c.horizon = field<std::size_t>(j, "horizon", c.horizon);
  if (j.contains("retrieval_keying")) {
    auto k = field<std::string>(j, "retrieval_keying", "");
    if (k == "condition_and_index") c.retrieval_keying = verify::RetrievalKeying::kConditionAndIndex;
    else if (k == "condition") c.retrieval_keying = verify::RetrievalKeying::kConditionOnly;
    else if (k == "index") c.retrieval_keying = verify::RetrievalKeying::kIndexOnly;
    else fail(ErrorCode::kSchema, "unknown retrieval_keying '" + k + "'");
  }
  c.allow_empty_retrieval = field<bool>(j, "allow_empty_retrieval", c.allow_empty_retrieval);
  if (j.contains("action_vocabulary")) {
    c.action_vocabulary.clear();
    for (const auto& name : field<std::vector<std::string>>(j, "action_vocabulary", {})) {
      auto kind = parse_action_kind(name);
      if (!kind) fail(ErrorCode::kSchema, "unknown action kind '" + name + "' in action_vocabulary");
      c.action_vocabulary.push_back(*kind);
    }
  }
  c.timeout_seconds = field<int>(j, "timeout_seconds", c.timeout_seconds);
  c.validate();
  return c;
}

}  // namespace labflow::orch
