#pragma once

#include <cstdint>
#include <vector>

#include "labflow/knowledge/knowledge_base.hpp"
#include "labflow/orchestrator/config.hpp"
#include "labflow/orchestrator/events.hpp"
#include "labflow/world/scenario.hpp"

namespace labflow::gateway {

struct SimulationRequest {
  world::Scenario scenario;
  std::string protocol;  // empty: the scenario's own protocol text
  orch::SystemConfig config;
  int trials = 20;
  std::uint64_t base_seed = 0;
};

// Trial t runs with seed base_seed + t and run id "sim-<base_seed>-<t>".
// The plan is parsed once and shared by every trial.
std::vector<orch::RunRecord> simulate(const SimulationRequest& request, std::shared_ptr<const knowledge::KnowledgeBase> kb,
                                      const orch::EventObserver& observer = {});

}  // namespace labflow::gateway
