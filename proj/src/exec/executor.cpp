#include "labflow/exec/executor.hpp"

#include <algorithm>
#include <stdexcept>

#include "labflow/core/errors.hpp"
#include "labflow/core/http_client.hpp"
#include "labflow/core/image.hpp"
#include "labflow/protocol/parser.hpp"

namespace labflow::exec {

namespace {

constexpr std::size_t kWaypoints = 6;

// Arbitrary but fixed joint targets; only their shape matters downstream.
double waypoint_joint(std::size_t kind, std::size_t waypoint, std::size_t joint) {
  auto v = static_cast<int>(((kind + 1) * (joint + 1) * (waypoint + 1)) % 17) - 8;
  return v / 20.0;
}

bool ends_closed(ActionKind kind) { return kind == ActionKind::kGrasp || kind == ActionKind::kRemove; }

std::vector<ActionFrame> script_for(ActionKind kind, const world::RobotState& state) {
  const std::size_t arms = state.arms();
  std::vector<ActionFrame> frames;
  if (kind == ActionKind::kWait) {
    frames.push_back(state.flatten());
    return frames;
  }
  const auto k = static_cast<std::size_t>(kind);
  for (std::size_t w = 0; w < kWaypoints; ++w) {
    ActionFrame f;
    for (std::size_t a = 0; a < arms; ++a) {
      const double mirror = a == 0 ? 1.0 : -1.0;
      for (std::size_t j = 0; j < world::kJointsPerArm; ++j) f.push_back(mirror * waypoint_joint(k, w, j));
      bool open = w < kWaypoints / 2 || (w == kWaypoints - 1 && !ends_closed(kind));
      f.push_back(open ? 1.0 : 0.0);
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

}  // namespace

Json to_json(const ActionChunk& chunk) {
  return Json{{"horizon", chunk.horizon}, {"instruction", chunk.instruction_echo}, {"actions", chunk.actions}};
}

ActionChunk ScriptedExecutor::predict_chunk(const world::Observation&, const world::RobotState& state, const std::string& instruction,
                                            std::size_t horizon) {
  auto kind = protocol::classify_verb(instruction);
  if (!kind) fail(ErrorCode::kUnknownInstruction, "no action recognized in '" + instruction + "'");
  auto frames = script_for(*kind, state);
  frames.resize(std::min(frames.size(), horizon));
  while (frames.size() < horizon) frames.push_back(frames.back());
  return ActionChunk{std::move(frames), horizon, instruction};
}

RemotePolicy::RemotePolicy(std::string endpoint, int timeout_seconds)
    : endpoint_(std::move(endpoint)), timeout_seconds_(timeout_seconds) {}

ActionChunk RemotePolicy::predict_chunk(const world::Observation& obs, const world::RobotState& state, const std::string& instruction,
                                        std::size_t horizon) {
  Json request{{"image_b64", base64_encode(encode_png(obs.image))},
               {"state", state.flatten()},
               {"instruction", instruction},
               {"horizon", horizon}};
  auto body = post_json(endpoint_, request, timeout_seconds_);
  const std::size_t width = state.arms() * (world::kJointsPerArm + 1);
  ActionChunk chunk{{}, horizon, instruction};
  try {
    auto reply = Json::parse(body);
    for (const auto& frame : reply.at("actions")) chunk.actions.push_back(frame.get<ActionFrame>());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kBackend, std::string("policy response malformed: ") + e.what());
  }
  if (chunk.actions.size() != horizon) {
    fail(ErrorCode::kBackend, "policy returned " + std::to_string(chunk.actions.size()) + " frames, expected " + std::to_string(horizon));
  }
  for (const auto& f : chunk.actions) {
    if (f.size() != width) fail(ErrorCode::kBackend, "policy frame has " + std::to_string(f.size()) + " values, expected " + std::to_string(width));
  }
  return chunk;
}

ActionChunk predict_chunk(ExecutorBackend& backend, const world::Observation& obs, const world::RobotState& state,
                          const std::string& instruction, std::size_t horizon) {
  if (horizon == 0) throw std::invalid_argument("horizon must be at least 1");
  return backend.predict_chunk(obs, state, instruction, horizon);
}

ExecutionResult execute(const protocol::SubtaskUnit& subtask, const world::WorldState& world, const world::RobotState& state,
                        ExecutorBackend& backend, const world::SuccessTable& success, Rng& rng, std::size_t horizon) {
  auto obs = world::render_observation(world);
  auto chunk = predict_chunk(backend, obs, state, subtask.instruction, horizon);
  auto [after, outcome] = world::apply_action(world, subtask.action, success[subtask.action.kind], rng);

  world::RobotState robot = state;
  const auto& last = chunk.actions.back();
  if (last.size() < robot.arms() * (world::kJointsPerArm + 1)) fail(ErrorCode::kBackend, "action frame too short for the robot");
  bool all_zero = true;
  for (std::size_t a = 0; a < robot.arms(); ++a) {
    const std::size_t base = a * (world::kJointsPerArm + 1);
    for (std::size_t j = 0; j < world::kJointsPerArm; ++j) {
      robot.joint_positions[a][j] = last[base + j];
      all_zero = all_zero && last[base + j] == 0.0;
    }
    robot.gripper_open[a] = last[base + world::kJointsPerArm] >= 0.5;
  }
  robot.pose_tag = all_zero ? "home" : "active";

  ExecutionResult r;
  r.outcome = outcome;
  r.observation_after = world::render_observation(after);
  r.world_after = std::move(after);
  r.robot_state_after = std::move(robot);
  r.chunk = std::move(chunk);
  return r;
}

}  // namespace labflow::exec
