#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "labflow/core/vocabulary.hpp"

namespace labflow::world {

enum class ObjectKind {
  kCentrifuge,
  kWaterBath,
  kTube15ml,
  kCryotube,
  kTubeRackOrange,
  kCryoRackRed,
  kFloat,
  kSerumBottle,
  kTrashBin,
};

inline constexpr std::array<ObjectKind, 9> kAllObjectKinds{
    ObjectKind::kCentrifuge,     ObjectKind::kWaterBath,   ObjectKind::kTube15ml,
    ObjectKind::kCryotube,       ObjectKind::kTubeRackOrange, ObjectKind::kCryoRackRed,
    ObjectKind::kFloat,          ObjectKind::kSerumBottle, ObjectKind::kTrashBin};

// Wire names: centrifuge, water_bath, tube_15ml, cryotube_1_8ml, tube_rack_orange,
// cryo_rack_red, float, serum_bottle, trash_bin.
std::string_view object_kind_name(ObjectKind kind);
std::optional<ObjectKind> parse_object_kind(std::string_view name);
bool has_lid(ObjectKind kind);
bool is_transparent(ObjectKind kind);
// Things the gripper can carry and put into containers.
bool is_movable(ObjectKind kind);

struct LabObject {
  std::string name;
  ObjectKind kind = ObjectKind::kCentrifuge;
  bool transparent = false;

  friend bool operator==(const LabObject&, const LabObject&) = default;
};

struct Fact {
  std::string predicate;
  std::vector<std::string> args;

  friend auto operator<=>(const Fact&, const Fact&) = default;
  friend bool operator==(const Fact&, const Fact&) = default;
};

// Closed-world predicate model of the bench. Only true facts are stored;
// absent facts read as false, which keeps equal worlds bitwise comparable.
class WorldState {
 public:
  std::map<std::string, LabObject> objects;
  std::map<Fact, bool> predicates;
  std::uint64_t tick = 0;

  void add_object(const std::string& name, ObjectKind kind);
  bool has_object(std::string_view name) const;
  const LabObject& object(std::string_view name) const;

  bool holds(const std::string& predicate, const std::vector<std::string>& args) const;
  // UnknownPredicate for names outside the stored vocabulary.
  void set(const std::string& predicate, const std::vector<std::string>& args, bool value);

  std::optional<std::string> location_of(const std::string& name) const;
  // Removes every in(name, *) and held(name, *) fact.
  void clear_placement(const std::string& name);

  // Throws std::logic_error naming the violated invariant.
  void check_invariants() const;

  friend bool operator==(const WorldState&, const WorldState&) = default;
};

// Ground truth for verification. Absent facts default to false.
bool eval_condition(const WorldState& world, const Condition& condition);

Json to_json(const WorldState& world);
WorldState world_from_json(const Json& j);

}  // namespace labflow::world
