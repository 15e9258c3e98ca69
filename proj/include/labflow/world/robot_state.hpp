#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "labflow/core/vocabulary.hpp"

namespace labflow::world {

inline constexpr std::size_t kJointsPerArm = 6;

enum class ArmMode { kSingle, kDual };

std::string_view arm_mode_name(ArmMode mode);

struct RobotState {
  std::vector<std::vector<double>> joint_positions;  // radians, one vector per arm
  std::vector<bool> gripper_open;                    // one flag per arm
  ArmMode arm_mode = ArmMode::kSingle;
  std::string pose_tag = "home";

  static RobotState home(ArmMode mode = ArmMode::kSingle);
  std::size_t arms() const { return arm_mode == ArmMode::kDual ? 2 : 1; }
  // Joints then gripper (1 open, 0 closed) per arm.
  std::vector<double> flatten() const;
  // SchemaError when vector lengths disagree with arm_mode.
  void check() const;

  friend bool operator==(const RobotState&, const RobotState&) = default;
};

Json to_json(const RobotState& state);
RobotState robot_state_from_json(const Json& j);

}  // namespace labflow::world
