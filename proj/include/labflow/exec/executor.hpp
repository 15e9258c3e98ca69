#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "labflow/core/rng.hpp"
#include "labflow/protocol/types.hpp"
#include "labflow/world/effects.hpp"
#include "labflow/world/render.hpp"
#include "labflow/world/robot_state.hpp"
#include "labflow/world/world_state.hpp"

namespace labflow::exec {

inline constexpr std::size_t kDefaultHorizon = 50;

// Each frame holds, per arm, six joint targets followed by a gripper
// command (1 open, 0 closed).
using ActionFrame = std::vector<double>;

struct ActionChunk {
  std::vector<ActionFrame> actions;
  std::size_t horizon = 0;
  std::string instruction_echo;

  friend bool operator==(const ActionChunk&, const ActionChunk&) = default;
};

Json to_json(const ActionChunk& chunk);

class ExecutorBackend {
 public:
  virtual ~ExecutorBackend() = default;
  virtual ActionChunk predict_chunk(const world::Observation& obs, const world::RobotState& state, const std::string& instruction,
                                    std::size_t horizon) = 0;
};

// Canned waypoints per action kind, padded with the last frame or truncated
// to the horizon. UnknownInstruction when no verb is recognized.
class ScriptedExecutor : public ExecutorBackend {
 public:
  ActionChunk predict_chunk(const world::Observation& obs, const world::RobotState& state, const std::string& instruction,
                            std::size_t horizon) override;
};

class RemotePolicy : public ExecutorBackend {
 public:
  explicit RemotePolicy(std::string endpoint, int timeout_seconds = 30);
  ActionChunk predict_chunk(const world::Observation& obs, const world::RobotState& state, const std::string& instruction,
                            std::size_t horizon) override;

 private:
  std::string endpoint_;
  int timeout_seconds_;
};

// invalid_argument when horizon is 0.
ActionChunk predict_chunk(ExecutorBackend& backend, const world::Observation& obs, const world::RobotState& state,
                          const std::string& instruction, std::size_t horizon);

struct ExecutionResult {
  world::StepOutcome outcome;
  world::WorldState world_after;
  world::Observation observation_after;
  world::RobotState robot_state_after;
  ActionChunk chunk;
};

// Robot state after the step follows the final frame; pose "home" when every
// joint is zero, "active" otherwise. World and backend errors propagate.
ExecutionResult execute(const protocol::SubtaskUnit& subtask, const world::WorldState& world, const world::RobotState& state,
                        ExecutorBackend& backend, const world::SuccessTable& success, Rng& rng,
                        std::size_t horizon = kDefaultHorizon);

}  // namespace labflow::exec
