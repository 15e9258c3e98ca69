#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "labflow/core/image.hpp"
#include "labflow/core/rng.hpp"
#include "labflow/core/vocabulary.hpp"
#include "labflow/exec/executor.hpp"
#include "labflow/world/robot_state.hpp"

namespace labflow::augment {

enum class OpKind { kBrightness, kContrast, kLowIllumination, kOverexposure };

inline constexpr OpKind kAllOpKinds[] = {OpKind::kBrightness, OpKind::kContrast, OpKind::kLowIllumination,
                                         OpKind::kOverexposure};

std::string_view op_kind_name(OpKind kind);
std::optional<OpKind> parse_op_kind(std::string_view name);

struct AugmentationOp {
  OpKind kind = OpKind::kBrightness;
  double alpha = 0.0;  // clamped to [0, 1] on use
};

// floor(x + 0.5) clamped to [0, 255]. The small epsilon keeps exact halves
// from slipping below after floating point multiplication.
std::uint8_t round_to_byte(double x);

std::uint8_t apply_pixel(std::uint8_t p, const AugmentationOp& op);
Image apply_op(const Image& image, const AugmentationOp& op);

enum class Stage { kOriginal, kAugmented, kMixed };

std::string_view stage_name(Stage stage);

struct CurriculumSchedule {
  int stage1_end = 4;
  int stage2_end = 7;
  int total_epochs = 10;
  double alpha_start = 0.1;
  double alpha_max = 0.5;
  double lambda = 0.5;
  // Chance that a stage-2 sample is perturbed at all.
  double stage2_probability = 1.0;

  // 40% original, 30% augmented, 30% mixed.
  static CurriculumSchedule with_default_split(int total_epochs);
  // SchemaError on broken boundaries or out-of-range weights.
  void validate() const;
};

Json to_json(const CurriculumSchedule& sched);
// Missing fields keep their defaults; a bare {"total_epochs": n} gets the
// default split.
CurriculumSchedule schedule_from_json(const Json& j);

Stage stage_of(int epoch, const CurriculumSchedule& sched);  // EpochOutOfRange
double alpha_schedule(int epoch, const CurriculumSchedule& sched);

struct CurriculumSample {
  Image image;
  Stage stage = Stage::kOriginal;
  std::optional<AugmentationOp> op;  // empty when the input passed through
};

// Stage 1 draws nothing. Stages 2 and 3 draw exactly once: the draw decides
// whether to perturb (stage 2 only) and which of the four operators to use.
CurriculumSample curriculum_sample(const Image& image, int epoch, const CurriculumSchedule& sched, Rng& rng);
Image curriculum_observation(const Image& image, int epoch, const CurriculumSchedule& sched, Rng& rng);

// Mean squared difference over every scalar component. ShapeMismatch.
double action_mse_loss(const exec::ActionChunk& predicted, const exec::ActionChunk& target);

struct Episode {
  std::vector<Image> frames;
  std::vector<world::RobotState> states;
  std::vector<exec::ActionFrame> actions;
  std::string instruction;
  std::string task_key;
};

// Directory layout: meta.json, frames/NNNNN.ppm, states.json, actions.json.
// IoError, LengthMismatch, DecodeError.
Episode ingest_episode(const std::filesystem::path& dir);
void write_episode(const Episode& episode, const std::filesystem::path& dir);

// Perturbs every frame for one epoch and writes frames/NNNNN.ppm plus
// manifest.json to `out`. Returns the manifest.
Json augment_episode(const Episode& episode, int epoch, const CurriculumSchedule& sched, std::uint64_t seed,
                     const std::filesystem::path& out);

}  // namespace labflow::augment
