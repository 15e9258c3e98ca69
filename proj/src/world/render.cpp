#include "labflow/world/render.hpp"

#include <array>
#include <map>

namespace labflow::world {

namespace {

struct Rgb {
  std::uint8_t r, g, b;
};

constexpr int kCell = 42;
constexpr int kInner = 40;

Rgb kind_color(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::kCentrifuge: return {180, 180, 190};
    case ObjectKind::kWaterBath: return {60, 120, 200};
    case ObjectKind::kTube15ml: return {220, 220, 160};
    case ObjectKind::kCryotube: return {200, 160, 220};
    case ObjectKind::kTubeRackOrange: return {240, 140, 30};
    case ObjectKind::kCryoRackRed: return {210, 40, 40};
    case ObjectKind::kFloat: return {250, 250, 250};
    case ObjectKind::kSerumBottle: return {120, 200, 160};
    case ObjectKind::kTrashBin: return {90, 70, 50};
  }
  return {0, 0, 0};
}

void fill(Image& img, int x0, int y0, int w, int h, Rgb c) {
  for (int y = y0; y < y0 + h; ++y) {
    for (int x = x0; x < x0 + w; ++x) img.set(x, y, c.r, c.g, c.b);
  }
}

std::pair<int, int> cell_origin(ObjectKind kind) {
  int k = static_cast<int>(kind);
  return {(k % 3) * kCell + 1, (k / 3) * kCell + 1};
}

}  // namespace

Observation render_observation(const WorldState& world, const std::string& camera) {
  Image img(kRenderSize, kRenderSize, 40);

  // slot = rank of the object among objects of the same kind (name order)
  std::map<std::string, int> slot;
  std::map<ObjectKind, int> per_kind;
  for (const auto& [name, obj] : world.objects) slot[name] = per_kind[obj.kind]++;

  for (const auto& [kind, count] : per_kind) {
    auto [x0, y0] = cell_origin(kind);
    fill(img, x0, y0, kInner, kInner, kind_color(kind));
    for (int i = 0; i < count && i < 6; ++i) fill(img, x0 + 2 + i * 6, y0 + 34, 4, 4, {255, 255, 255});
  }

  for (const auto& [name, obj] : world.objects) {
    auto [x0, y0] = cell_origin(obj.kind);
    int s = slot[name] % 6;
    if (world.holds("lid_open", {name})) fill(img, x0, y0, kInner, 4, {255, 255, 255});
    if (world.holds("cap_on", {name})) {
      Rgb cap = world.holds("cap_tight", {name}) ? Rgb{200, 0, 0} : Rgb{255, 170, 0};
      fill(img, x0 + 34 - s * 6, y0 + 6, 4, 4, cap);
    }
    if (world.holds("contains_liquid", {name})) fill(img, x0 + 2 + s * 6, y0 + 26, 4, 6, {0, 60, 255});
    if (world.holds("discarded", {name})) {
      for (int d = 0; d < kInner; ++d) {
        img.set(x0 + d, y0 + d, 0, 0, 0);
        img.set(x0 + kInner - 1 - d, y0 + d, 0, 0, 0);
      }
    }
    if (world.holds("held", {name, std::string(kDefaultArm)})) {
      fill(img, x0, y0 + kInner - 2, kInner, 2, {255, 255, 0});
    }
  }

  // contents swatches: object x drawn inside container y's cell
  for (const auto& [fact, value] : world.predicates) {
    if (!value || fact.predicate != "in") continue;
    auto xi = world.objects.find(fact.args[0]);
    auto yi = world.objects.find(fact.args[1]);
    if (xi == world.objects.end() || yi == world.objects.end()) continue;
    auto [x0, y0] = cell_origin(yi->second.kind);
    int k = static_cast<int>(xi->second.kind);
    fill(img, x0 + 4 + (k % 5) * 7, y0 + 12 + (slot[fact.args[0]] % 2) * 7, 5, 5, kind_color(xi->second.kind));
  }

  return Observation{std::move(img), world.tick, camera};
}

}  // namespace labflow::world
