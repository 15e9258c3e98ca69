#include "labflow/augment/augment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "labflow/core/errors.hpp"
#include "labflow/core/json_io.hpp"

namespace labflow::augment {

namespace fs = std::filesystem;

std::string_view op_kind_name(OpKind kind) {
  switch (kind) {
    case OpKind::kBrightness: return "brightness";
    case OpKind::kContrast: return "contrast";
    case OpKind::kLowIllumination: return "low_illumination";
    case OpKind::kOverexposure: return "overexposure";
  }
  return "brightness";
}

std::optional<OpKind> parse_op_kind(std::string_view name) {
  for (auto k : kAllOpKinds) {
    if (op_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

std::uint8_t round_to_byte(double x) {
  double r = std::floor(x + 0.5 + 1e-9);
  return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

std::uint8_t apply_pixel(std::uint8_t p, const AugmentationOp& op) {
  const double a = std::clamp(op.alpha, 0.0, 1.0);
  const double v = p;
  switch (op.kind) {
    case OpKind::kBrightness: return round_to_byte(v + std::floor(a * 64.0 + 0.5 + 1e-9));
    case OpKind::kContrast: return round_to_byte((v - 128.0) * (1.0 + a) + 128.0);
    case OpKind::kLowIllumination: return round_to_byte(v * (1.0 - a));
    case OpKind::kOverexposure: return round_to_byte(v * (1.0 - a) + 255.0 * a);
  }
  return p;
}

Image apply_op(const Image& image, const AugmentationOp& op) {
  // 256-entry lookup; every formula is per channel value.
  std::uint8_t table[256];
  for (int p = 0; p < 256; ++p) table[p] = apply_pixel(static_cast<std::uint8_t>(p), op);
  Image out = image;
  for (auto& b : out.rgb) b = table[b];
  return out;
}

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::kOriginal: return "original";
    case Stage::kAugmented: return "augmented";
    case Stage::kMixed: return "mixed";
  }
  return "original";
}

CurriculumSchedule CurriculumSchedule::with_default_split(int total_epochs) {
  if (total_epochs < 3) fail(ErrorCode::kSchema, "a curriculum needs at least 3 epochs");
  CurriculumSchedule s;
  s.total_epochs = total_epochs;
  s.stage1_end = std::max(1, static_cast<int>(std::lround(total_epochs * 0.4)));
  s.stage2_end = std::max(s.stage1_end + 1, static_cast<int>(std::lround(total_epochs * 0.7)));
  s.stage2_end = std::min(s.stage2_end, total_epochs - 1);
  return s;
}

void CurriculumSchedule::validate() const {
  if (!(0 < stage1_end && stage1_end < stage2_end && stage2_end < total_epochs)) {
    fail(ErrorCode::kSchema, "curriculum needs 0 < stage1_end < stage2_end < total_epochs");
  }
  auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!unit(alpha_start) || !unit(alpha_max) || alpha_start > alpha_max) {
    fail(ErrorCode::kSchema, "curriculum needs 0 <= alpha_start <= alpha_max <= 1");
  }
  if (!unit(lambda)) fail(ErrorCode::kSchema, "lambda must lie in [0, 1]");
  if (!unit(stage2_probability)) fail(ErrorCode::kSchema, "stage2_probability must lie in [0, 1]");
}

Json to_json(const CurriculumSchedule& s) {
  return Json{{"stage1_end", s.stage1_end}, {"stage2_end", s.stage2_end},   {"total_epochs", s.total_epochs},
              {"alpha_start", s.alpha_start}, {"alpha_max", s.alpha_max}, {"lambda", s.lambda},
              {"stage2_probability", s.stage2_probability}};
}

CurriculumSchedule schedule_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::kSchema, "schedule must be a JSON object");
  CurriculumSchedule s;
  try {
    if (j.contains("total_epochs")) s = CurriculumSchedule::with_default_split(j["total_epochs"].get<int>());
    if (j.contains("stage1_end")) s.stage1_end = j["stage1_end"].get<int>();
    if (j.contains("stage2_end")) s.stage2_end = j["stage2_end"].get<int>();
    if (j.contains("alpha_start")) s.alpha_start = j["alpha_start"].get<double>();
    if (j.contains("alpha_max")) s.alpha_max = j["alpha_max"].get<double>();
    if (j.contains("lambda")) s.lambda = j["lambda"].get<double>();
    if (j.contains("stage2_probability")) s.stage2_probability = j["stage2_probability"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kSchema, std::string("schedule field has the wrong type: ") + e.what());
  }
  s.validate();
  return s;
}

Stage stage_of(int epoch, const CurriculumSchedule& sched) {
  if (epoch < 0 || epoch >= sched.total_epochs) {
    fail(ErrorCode::kEpochOutOfRange,
         "epoch " + std::to_string(epoch) + " outside [0, " + std::to_string(sched.total_epochs) + ")");
  }
  if (epoch < sched.stage1_end) return Stage::kOriginal;
  if (epoch < sched.stage2_end) return Stage::kAugmented;
  return Stage::kMixed;
}

double alpha_schedule(int epoch, const CurriculumSchedule& sched) {
  if (stage_of(epoch, sched) == Stage::kOriginal) return 0.0;
  const int span = sched.total_epochs - 1 - sched.stage1_end;
  if (span <= 0) return sched.alpha_max;
  const double t = static_cast<double>(epoch - sched.stage1_end) / span;
  return sched.alpha_start + (sched.alpha_max - sched.alpha_start) * t;
}

CurriculumSample curriculum_sample(const Image& image, int epoch, const CurriculumSchedule& sched, Rng& rng) {
  CurriculumSample out;
  out.stage = stage_of(epoch, sched);
  if (out.stage == Stage::kOriginal) {
    out.image = image;
    return out;
  }
  const double u = rng.uniform();
  const double alpha = alpha_schedule(epoch, sched);
  if (out.stage == Stage::kAugmented) {
    const double prob = sched.stage2_probability;
    if (!(u < prob)) {
      out.image = image;
      return out;
    }
    auto idx = std::min<std::size_t>(3, static_cast<std::size_t>(u / prob * 4.0));
    out.op = AugmentationOp{kAllOpKinds[idx], alpha};
    out.image = apply_op(image, *out.op);
    return out;
  }
  auto idx = std::min<std::size_t>(3, static_cast<std::size_t>(u * 4.0));
  out.op = AugmentationOp{kAllOpKinds[idx], alpha};
  Image aug = apply_op(image, *out.op);
  const double lam = sched.lambda;
  out.image = image;
  for (std::size_t i = 0; i < aug.rgb.size(); ++i) {
    out.image.rgb[i] = round_to_byte(lam * image.rgb[i] + (1.0 - lam) * aug.rgb[i]);
  }
  return out;
}

Image curriculum_observation(const Image& image, int epoch, const CurriculumSchedule& sched, Rng& rng) {
  return curriculum_sample(image, epoch, sched, rng).image;
}

double action_mse_loss(const exec::ActionChunk& predicted, const exec::ActionChunk& target) {
  if (predicted.actions.size() != target.actions.size()) {
    fail(ErrorCode::kShapeMismatch, "chunk lengths differ: " + std::to_string(predicted.actions.size()) + " vs " +
                                        std::to_string(target.actions.size()));
  }
  if (predicted.actions.empty()) fail(ErrorCode::kShapeMismatch, "chunks are empty");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t t = 0; t < predicted.actions.size(); ++t) {
    const auto& a = predicted.actions[t];
    const auto& b = target.actions[t];
    if (a.size() != b.size() || a.size() != predicted.actions[0].size()) {
      fail(ErrorCode::kShapeMismatch, "frame " + std::to_string(t) + " widths differ");
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a[i] - b[i];
      sum += d * d;
    }
    n += a.size();
  }
  if (n == 0) fail(ErrorCode::kShapeMismatch, "frames are empty");
  return sum / static_cast<double>(n);
}

namespace {

std::string frame_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%05zu.ppm", i);
  return buf;
}

}  // namespace

Episode ingest_episode(const fs::path& dir) {
  if (!fs::is_directory(dir)) fail(ErrorCode::kIo, "episode directory not found: " + dir.string());
  auto meta = read_json_file(dir / "meta.json");
  Episode ep;
  ep.instruction = require_string(meta, "instruction", "meta.json");
  ep.task_key = require_string(meta, "task_key", "meta.json");
  const auto& nf = require(meta, "num_frames", "meta.json");
  if (!nf.is_number_integer() || nf.get<long long>() < 0) fail(ErrorCode::kSchema, "meta.json: num_frames must be a count");
  const auto num_frames = nf.get<std::size_t>();
  if (num_frames == 0) fail(ErrorCode::kLengthMismatch, "episode has no frames");

  std::size_t on_disk = 0;
  if (fs::is_directory(dir / "frames")) {
    for (const auto& entry : fs::directory_iterator(dir / "frames")) {
      if (entry.path().extension() == ".ppm") ++on_disk;
    }
  }
  auto states = read_json_file(dir / "states.json");
  auto actions = read_json_file(dir / "actions.json");
  if (!states.is_array() || !actions.is_array()) fail(ErrorCode::kSchema, "states.json and actions.json must be arrays");
  if (on_disk != num_frames || states.size() != num_frames || actions.size() != num_frames) {
    fail(ErrorCode::kLengthMismatch, "episode lengths disagree: meta " + std::to_string(num_frames) + ", frames " +
                                         std::to_string(on_disk) + ", states " + std::to_string(states.size()) +
                                         ", actions " + std::to_string(actions.size()));
  }
  for (std::size_t i = 0; i < num_frames; ++i) {
    auto path = dir / "frames" / frame_name(i);
    if (!fs::exists(path)) fail(ErrorCode::kLengthMismatch, "missing frame " + path.string());
    ep.frames.push_back(read_ppm(path));
  }
  for (const auto& s : states) ep.states.push_back(world::robot_state_from_json(s));
  try {
    for (const auto& a : actions) ep.actions.push_back(a.get<exec::ActionFrame>());
  } catch (const nlohmann::json::exception&) {
    fail(ErrorCode::kSchema, "actions.json must hold arrays of numbers");
  }
  return ep;
}

void write_episode(const Episode& ep, const fs::path& dir) {
  if (ep.frames.size() != ep.states.size() || ep.frames.size() != ep.actions.size()) {
    fail(ErrorCode::kLengthMismatch, "episode lengths disagree");
  }
  fs::create_directories(dir / "frames");
  Json meta{{"instruction", ep.instruction}, {"task_key", ep.task_key}, {"num_frames", ep.frames.size()}};
  write_text_file(dir / "meta.json", meta.dump(2) + "\n");
  for (std::size_t i = 0; i < ep.frames.size(); ++i) write_ppm(ep.frames[i], dir / "frames" / frame_name(i));
  Json states = Json::array();
  for (const auto& s : ep.states) states.push_back(world::to_json(s));
  write_text_file(dir / "states.json", states.dump() + "\n");
  write_text_file(dir / "actions.json", Json(ep.actions).dump() + "\n");
}

Json augment_episode(const Episode& ep, int epoch, const CurriculumSchedule& sched, std::uint64_t seed, const fs::path& out) {
  sched.validate();
  Rng rng(seed, 3);
  const auto stage = stage_of(epoch, sched);
  Json frames = Json::array();
  fs::create_directories(out / "frames");
  for (std::size_t i = 0; i < ep.frames.size(); ++i) {
    auto sample = curriculum_sample(ep.frames[i], epoch, sched, rng);
    write_ppm(sample.image, out / "frames" / frame_name(i));
    Json entry{{"index", i}, {"file", "frames/" + frame_name(i)}};
    entry["op"] = sample.op ? Json(std::string(op_kind_name(sample.op->kind))) : Json(nullptr);
    entry["alpha"] = sample.op ? sample.op->alpha : 0.0;
    frames.push_back(entry);
  }
  Json manifest{{"task_key", ep.task_key},
                {"epoch", epoch},
                {"stage", std::string(stage_name(stage))},
                {"alpha", alpha_schedule(epoch, sched)},
                {"lambda", stage == Stage::kMixed ? Json(sched.lambda) : Json(nullptr)},
                {"seed", seed},
                {"schedule", to_json(sched)},
                {"frames", frames}};
  write_text_file(out / "manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

}  // namespace labflow::augment
