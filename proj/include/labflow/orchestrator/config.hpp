#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "labflow/core/vocabulary.hpp"
#include "labflow/verify/verifier.hpp"
#include "labflow/world/effects.hpp"
#include "labflow/world/robot_state.hpp"

namespace labflow::orch {

enum class InterventionMode { kAutoAbort, kAutoRetry, kConsole, kApi };

std::string_view intervention_mode_name(InterventionMode mode);
std::optional<InterventionMode> parse_intervention_mode(std::string_view name);

// kind: llm = rule_based | remote, vlm = oracle | remote, vla = scripted | remote.
struct BackendSpec {
  std::string kind;
  std::optional<std::string> endpoint;

  friend bool operator==(const BackendSpec&, const BackendSpec&) = default;
};

struct ModelSelection {
  BackendSpec llm{"rule_based", std::nullopt};
  BackendSpec vlm{"oracle", std::nullopt};
  BackendSpec vla{"scripted", std::nullopt};

  friend bool operator==(const ModelSelection&, const ModelSelection&) = default;
};

struct SystemConfig {
  ModelSelection model_selection;
  world::RobotState manipulator = world::RobotState::home();
  std::size_t retrieval_k = 3;
  int max_retries = 2;
  double noise_rate = 0.0;
  world::SuccessTable success_prob;
  std::uint64_t seed = 0;
  InterventionMode intervention_mode = InterventionMode::kAutoAbort;
  std::size_t horizon = 50;
  verify::RetrievalKeying retrieval_keying = verify::RetrievalKeying::kConditionAndIndex;
  bool allow_empty_retrieval = false;
  std::vector<ActionKind> action_vocabulary{kAllActionKinds.begin(), kAllActionKinds.end()};
  int timeout_seconds = 30;

  // SchemaError on out-of-range values or unknown backend kinds.
  void validate() const;
  friend bool operator==(const SystemConfig&, const SystemConfig&) = default;
};

Json to_json(const SystemConfig& cfg);
// Missing fields keep their defaults. SchemaError on malformed values.
SystemConfig config_from_json(const Json& j);

}  // namespace labflow::orch
