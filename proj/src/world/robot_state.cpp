#include "labflow/world/robot_state.hpp"

#include "labflow/core/errors.hpp"
#include "labflow/core/json_io.hpp"

namespace labflow::world {

std::string_view arm_mode_name(ArmMode mode) { return mode == ArmMode::kDual ? "dual" : "single"; }

RobotState RobotState::home(ArmMode mode) {
  RobotState s;
  s.arm_mode = mode;
  s.joint_positions.assign(s.arms(), std::vector<double>(kJointsPerArm, 0.0));
  s.gripper_open.assign(s.arms(), true);
  s.pose_tag = "home";
  return s;
}

std::vector<double> RobotState::flatten() const {
  std::vector<double> out;
  for (std::size_t a = 0; a < joint_positions.size(); ++a) {
    out.insert(out.end(), joint_positions[a].begin(), joint_positions[a].end());
    out.push_back(a < gripper_open.size() && gripper_open[a] ? 1.0 : 0.0);
  }
  return out;
}

void RobotState::check() const {
  if (joint_positions.size() != arms() || gripper_open.size() != arms()) {
    fail(ErrorCode::kSchema, "robot state must describe " + std::to_string(arms()) + " arm(s)");
  }
  for (const auto& j : joint_positions) {
    if (j.size() != kJointsPerArm) fail(ErrorCode::kSchema, "each arm needs " + std::to_string(kJointsPerArm) + " joint positions");
  }
}

Json to_json(const RobotState& s) {
  Json j;
  j["joint_positions"] = s.joint_positions;
  Json grippers = Json::array();
  for (bool g : s.gripper_open) grippers.push_back(g);
  j["gripper_open"] = grippers;
  j["arm_mode"] = std::string(arm_mode_name(s.arm_mode));
  j["pose_tag"] = s.pose_tag;
  return j;
}

RobotState robot_state_from_json(const Json& j) {
  RobotState s;
  try {
    s.joint_positions = require(j, "joint_positions", "robot state").get<std::vector<std::vector<double>>>();
    s.gripper_open.clear();
    for (const auto& g : require(j, "gripper_open", "robot state")) s.gripper_open.push_back(g.get<bool>());
  } catch (const nlohmann::json::type_error& e) {
    fail(ErrorCode::kSchema, std::string("robot state: ") + e.what());
  }
  auto mode = require_string(j, "arm_mode", "robot state");
  if (mode != "single" && mode != "dual") fail(ErrorCode::kSchema, "robot state arm_mode must be single or dual");
  s.arm_mode = mode == "dual" ? ArmMode::kDual : ArmMode::kSingle;
  s.pose_tag = require_string(j, "pose_tag", "robot state");
  s.check();
  return s;
}

}  // namespace labflow::world
