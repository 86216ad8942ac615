#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "affordance/config.hpp"
#include "affordance/dataset/examples.hpp"
#include "affordance/models/fusion.hpp"

namespace affordance::training {

struct AdamSettings {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 32;
  int epochs = 150;
  std::uint64_t seed = 0;
  AdamSettings adam{};
  /// Largest random translation (pixels of the network input) applied to each
  /// training sample; every image of a sample moves together. 0 disables it.
  int shift_augment = 0;
};

/// Throws ConfigError unless learning_rate > 0, batch_size >= 1, epochs >= 1
/// and 0 <= shift_augment < 32.
void validate(const TrainConfig& c);
void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

struct ValidationMetrics {
  std::optional<double> tool;
  std::optional<double> action;
  std::optional<double> joint;
  /// Checkpoint selection value: joint accuracy when the task predicts both
  /// labels, otherwise the single head's accuracy.
  double selection = 0.0;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  ValidationMetrics val;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = -1;

  double best_selection() const { return epochs.at(static_cast<std::size_t>(best_epoch)).val.selection; }
};

struct TrainHooks {
  /// Replaces the built-in validation pass; receives the epoch index.
  std::function<ValidationMetrics(models::FusionModel&, int)> validator;
  std::function<void(const EpochRecord&)> on_epoch_end;
  /// Called after every optimisation step with (epoch, step, loss).
  std::function<void(int, int, double)> on_step;
};

struct TrainResult {
  TrainHistory history;
  models::ModelState best_state;
  models::ModelState final_state;
};

/// Trains with Adam under the task's loss for the full epoch budget, scoring
/// the validation set after every epoch. On return the model holds the
/// parameters of the best validation epoch (first one on ties).
///
/// Throws ConfigError when train and val share a sample or the model does
/// not fit the task, and DivergedError on a non-finite loss or activation.
TrainResult train(models::FusionModel& model, const dataset::ExampleSet& train_set,
                  const dataset::ExampleSet& val_set, const TrainConfig& config, TaskSpec task,
                  const TrainHooks& hooks = {});

/// Validation metrics of a model on a set under a task.
ValidationMetrics validate_model(models::FusionModel& model, const dataset::ExampleSet& data, TaskSpec task);

/// Columns: epoch, train_loss, train_acc, val_acc_tool, val_acc_action,
/// val_acc_joint. Heads the task lacks are left blank.
void write_history_csv(const std::filesystem::path& path, const TrainHistory& history);

}  // namespace affordance::training
