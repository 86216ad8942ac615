#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <opencv2/core.hpp>

#include "affordance/synthgen/scene.hpp"

namespace affordance::synthgen {

/// Resolved geometry of one trial, drawn from the seeded parameter stream.
struct SceneInstance {
  int object_id = 0;
  Tool tool = Tool::boomerang;
  Action action = Action::push;
  int repetition = 0;
  cv::Point initial;
  cv::Point final;
  int jitter = 0;
};

inline constexpr int kMaxPlacementAttempts = 100;

/// Materializes every trial of a dataset, in manifest order (object, tool,
/// action, repetition). Pure function of the params.
/// Throws GenerationError when an object cannot be placed in 100 attempts.
std::vector<SceneInstance> plan_scenes(const GeneratorParams& p);

struct GenerateOptions {
  /// Worker threads for rendering; the scene plan is always built sequentially.
  int jobs = 1;
  int png_compression = 1;
};

/// Renders a dataset into out_dir: images/*.png, manifest.jsonl and
/// generator.json. Returns the manifest path. Output is fully determined by
/// the arguments.
/// Throws ConfigError for n_objects outside [1,20] or n_reps outside [1,10],
/// IoError when out_dir is not writable.
std::filesystem::path generate_synthetic_dataset(const std::filesystem::path& out_dir, int n_objects, int n_reps,
                                                 std::uint64_t seed, const GenerateOptions& options = {});

/// Noise seed of one image; distinct per (dataset seed, trial, image key).
std::uint64_t image_noise_seed(std::uint64_t seed, std::size_t trial, ImageKey key);

}  // namespace affordance::synthgen
