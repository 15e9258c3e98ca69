#include "labflow/world/effects.hpp"

#include "labflow/core/errors.hpp"

namespace labflow::world {

std::string_view failure_mode_name(FailureMode mode) {
  switch (mode) {
    case FailureMode::kGraspSlip: return "grasp_slip";
    case FailureMode::kMisplacement: return "misplacement";
    case FailureMode::kCollisionAbort: return "collision_abort";
  }
  return "?";
}

SuccessTable::SuccessTable(double uniform) {
  for (auto kind : kAllActionKinds) probs_[kind] = uniform;
}

double SuccessTable::operator[](ActionKind kind) const {
  auto it = probs_.find(kind);
  return it == probs_.end() ? 1.0 : it->second;
}

void SuccessTable::set(ActionKind kind, double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("success probability must lie in [0, 1]");
  probs_[kind] = p;
}

Json SuccessTable::to_json() const {
  Json j = Json::object();
  for (const auto& [kind, p] : probs_) j[std::string(action_kind_name(kind))] = p;
  return j;
}

SuccessTable SuccessTable::from_json(const Json& j) {
  SuccessTable table;
  if (j.is_number()) return SuccessTable(j.get<double>());
  if (!j.is_object()) fail(ErrorCode::kSchema, "success_prob must be a number or an object keyed by action kind");
  for (const auto& [name, p] : j.items()) {
    auto kind = parse_action_kind(name);
    if (!kind) fail(ErrorCode::kSchema, "success_prob: unknown action kind '" + name + "'");
    table.set(*kind, p.get<double>());
  }
  return table;
}

namespace {

[[noreturn]] void violated(const AtomicAction& action, const std::string& why) {
  fail(ErrorCode::kPreconditionViolated, describe(action) + ": " + why);
}

bool is_cap_twist(const AtomicAction& action) {
  return action.kind == ActionKind::kGrasp && action.subject == "cap" && action.target.has_value();
}

void require_object(const WorldState& world, const AtomicAction& action, const std::string& name) {
  if (!world.has_object(name)) violated(action, "no object named '" + name + "'");
}

void require_not_discarded(const WorldState& world, const AtomicAction& action, const std::string& name) {
  if (world.holds("discarded", {name})) violated(action, name + " has been discarded");
}

void require_open_if_lidded(const WorldState& world, const AtomicAction& action, const std::string& container) {
  if (has_lid(world.object(container).kind) && !world.holds("lid_open", {container})) {
    violated(action, container + " lid is closed");
  }
}

void place_into(WorldState& world, const std::string& x, const std::string& y) {
  world.clear_placement(x);
  if (world.object(y).kind == ObjectKind::kTrashBin) {
    world.set("discarded", {x}, true);
  } else {
    world.set("in", {x, y}, true);
  }
}

FailureMode failure_label(ActionKind kind) {
  switch (kind) {
    case ActionKind::kGrasp:
    case ActionKind::kRemove: return FailureMode::kGraspSlip;
    case ActionKind::kPlace:
    case ActionKind::kMove: return FailureMode::kMisplacement;
    default: return FailureMode::kCollisionAbort;
  }
}

}  // namespace

void check_applicable(const WorldState& world, const AtomicAction& action) {
  const std::string& x = action.subject;
  switch (action.kind) {
    case ActionKind::kWait:
      return;
    case ActionKind::kOpenLid:
    case ActionKind::kCloseLid: {
      require_object(world, action, x);
      if (!has_lid(world.object(x).kind)) violated(action, x + " has no lid");
      bool open = world.holds("lid_open", {x});
      if (action.kind == ActionKind::kOpenLid && open) violated(action, x + " lid is already open");
      if (action.kind == ActionKind::kCloseLid && !open) violated(action, x + " lid is already closed");
      return;
    }
    case ActionKind::kPlace:
    case ActionKind::kMove: {
      require_object(world, action, x);
      require_object(world, action, *action.target);
      if (x == *action.target) violated(action, "cannot put an object into itself");
      require_not_discarded(world, action, x);
      if (action.kind == ActionKind::kPlace) require_open_if_lidded(world, action, *action.target);
      return;
    }
    case ActionKind::kRemove: {
      require_object(world, action, x);
      require_not_discarded(world, action, x);
      if (action.target) {
        require_object(world, action, *action.target);
        if (!world.holds("in", {x, *action.target})) violated(action, x + " is not in " + *action.target);
        require_open_if_lidded(world, action, *action.target);
      } else if (!world.location_of(x)) {
        violated(action, x + " is not inside anything");
      }
      return;
    }
    case ActionKind::kGrasp: {
      if (is_cap_twist(action)) {
        require_object(world, action, *action.target);
        require_not_discarded(world, action, *action.target);
        if (!world.holds("cap_on", {*action.target})) violated(action, *action.target + " has no cap");
        return;
      }
      require_object(world, action, x);
      require_not_discarded(world, action, x);
      return;
    }
    case ActionKind::kPressButton:
      require_object(world, action, x);
      return;
  }
}

std::pair<WorldState, StepOutcome> apply_action(const WorldState& world, const AtomicAction& action,
                                                double success_prob, Rng& rng) {
  check_applicable(world, action);
  WorldState next = world;
  next.tick += 1;
  const double u = rng.uniform();
  StepOutcome outcome;
  outcome.rng_draws = 1;
  if (!(u < success_prob)) {
    outcome.succeeded = false;
    outcome.failure_mode = failure_label(action.kind);
    return {std::move(next), outcome};
  }

  const std::string& x = action.subject;
  const std::string arm(kDefaultArm);
  switch (action.kind) {
    case ActionKind::kOpenLid:
      next.set("lid_open", {x}, true);
      break;
    case ActionKind::kCloseLid:
      next.set("lid_open", {x}, false);
      break;
    case ActionKind::kPlace:
      place_into(next, x, *action.target);
      break;
    case ActionKind::kRemove:
      next.clear_placement(x);
      next.set("held", {x, arm}, true);
      break;
    case ActionKind::kGrasp:
      if (is_cap_twist(action)) {
        const auto& tube = *action.target;
        next.set("cap_tight", {tube}, !next.holds("cap_tight", {tube}));
      } else {
        next.clear_placement(x);
        next.set("held", {x, arm}, true);
      }
      break;
    case ActionKind::kMove:
      if (next.object(*action.target).kind == ObjectKind::kSerumBottle) {
        // pouring: the source empties into the bottle
        next.set("contains_liquid", {x}, false);
        next.set("contains_liquid", {*action.target}, true);
      } else {
        place_into(next, x, *action.target);
      }
      break;
    case ActionKind::kPressButton:
    case ActionKind::kWait:
      break;
  }
  return {std::move(next), outcome};
}

}  // namespace labflow::world
