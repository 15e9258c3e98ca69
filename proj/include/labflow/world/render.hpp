#pragma once

#include <cstdint>
#include <string>

#include "labflow/core/image.hpp"
#include "labflow/world/world_state.hpp"

namespace labflow::world {

struct Observation {
  Image image;
  std::uint64_t timestamp = 0;  // world tick at capture
  std::string camera_id;

  friend bool operator==(const Observation&, const Observation&) = default;
};

inline constexpr int kRenderSize = 128;

// Schematic 128x128 view: one colored cell per object kind on a 3x3 grid,
// with marker strips for lid, cap, liquid, held and discarded state and a
// small swatch inside each container for every object it holds.
Observation render_observation(const WorldState& world, const std::string& camera = "bench");

}  // namespace labflow::world
