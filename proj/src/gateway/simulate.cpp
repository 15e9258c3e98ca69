#include "labflow/gateway/simulate.hpp"

#include <stdexcept>

#include "labflow/orchestrator/workflow.hpp"
#include "labflow/protocol/parser.hpp"

namespace labflow::gateway {

std::vector<orch::RunRecord> simulate(const SimulationRequest& req, std::shared_ptr<const knowledge::KnowledgeBase> kb,
                                      const orch::EventObserver& observer) {
  if (req.trials < 1) throw std::invalid_argument("simulate needs at least one trial");
  const std::string text = req.protocol.empty() ? req.scenario.protocol_text : req.protocol;
  auto plan = protocol::parse_protocol(protocol::Protocol{text, req.scenario.name}, orch::parser_config(req.config));

  std::vector<orch::RunRecord> out;
  out.reserve(static_cast<std::size_t>(req.trials));
  for (int t = 0; t < req.trials; ++t) {
    auto cfg = req.config;
    cfg.seed = req.base_seed + static_cast<std::uint64_t>(t);
    auto backends = orch::make_backends(cfg, kb);
    auto state = orch::init_system_with_plan(plan, cfg, req.scenario, *kb,
                                             "sim-" + std::to_string(req.base_seed) + "-" + std::to_string(t));
    out.push_back(orch::run_workflow(state, backends, observer));
  }
  return out;
}

}  // namespace labflow::gateway
