#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "affordance/config.hpp"
#include "affordance/dataset/dataset.hpp"
#include "affordance/models/fusion.hpp"

namespace affordance::models {

/// Everything besides the tensors that a checkpoint must carry to be reloaded
/// and evaluated on its own.
struct CheckpointMeta {
  FusionConfig fusion;
  TaskSpec task = TaskSpec::tools_plus_actions;
  dataset::NormStats stats;
  std::uint64_t seed = 0;
  /// Epoch the weights come from (0-based); -1 when untrained.
  int epoch = -1;
  std::string kind = "best";
};

nlohmann::json meta_to_json(const CheckpointMeta& meta);
/// Throws ConfigError when label orderings or the stored config hash do not
/// match this build.
CheckpointMeta meta_from_json(const nlohmann::json& j);

struct LoadedCheckpoint {
  CheckpointMeta meta;
  FusionModel model{nullptr};
};

/// Writes a self-describing archive: metadata JSON (config, config hash, task,
/// normalization statistics, label orderings) plus all parameters and buffers.
void save_checkpoint(const std::filesystem::path& path, FusionModel& model, const CheckpointMeta& meta);

/// Rebuilds the model from the archive. When `expected` is given, the stored
/// config hash must equal its hash (ConfigError otherwise). Throws LoadError
/// for unreadable files.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path,
                                 const std::optional<FusionConfig>& expected = std::nullopt);

}  // namespace affordance::models
