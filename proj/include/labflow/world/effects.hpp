#pragma once

#include <map>
#include <optional>
#include <string_view>
#include <utility>

#include "labflow/core/rng.hpp"
#include "labflow/core/vocabulary.hpp"
#include "labflow/world/world_state.hpp"

namespace labflow::world {

// Log labels only; they carry no semantics.
enum class FailureMode { kGraspSlip, kMisplacement, kCollisionAbort };

std::string_view failure_mode_name(FailureMode mode);

struct StepOutcome {
  bool succeeded = true;
  std::optional<FailureMode> failure_mode;  // present iff !succeeded
  int rng_draws = 0;

  friend bool operator==(const StepOutcome&, const StepOutcome&) = default;
};

// Per-action-kind success probability; kinds not listed succeed with 1.0.
class SuccessTable {
 public:
  SuccessTable() = default;
  explicit SuccessTable(double uniform);

  double operator[](ActionKind kind) const;
  void set(ActionKind kind, double p);

  Json to_json() const;
  static SuccessTable from_json(const Json& j);

  friend bool operator==(const SuccessTable&, const SuccessTable&) = default;

 private:
  std::map<ActionKind, double> probs_;
};

// Throws PreconditionViolated when the effect table cannot apply `action`
// to `world` (lid already open, placing a discarded object, ...).
void check_applicable(const WorldState& world, const AtomicAction& action);

// Pure transition. Exactly one rng draw; tick always advances; on failure
// the predicate map is untouched.
std::pair<WorldState, StepOutcome> apply_action(const WorldState& world, const AtomicAction& action,
                                                double success_prob, Rng& rng);

}  // namespace labflow::world
