#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "affordance/config.hpp"
#include "affordance/dataset/examples.hpp"
#include "affordance/models/fusion.hpp"

namespace affordance::evaluation {

/// Dense row-major square matrix: rows are true classes, columns predictions.
using Matrix = std::vector<std::vector<double>>;

/// Entry (i, j) counts samples of true class i predicted as j. With
/// row_normalize every non-empty row is divided by its sum; empty rows stay
/// zero. Throws EvaluationError on length mismatch or out-of-range entries.
Matrix confusion_matrix(std::span<const int> predictions, std::span<const int> labels, int n_classes,
                        bool row_normalize);

/// Argmax predictions per head; vectors of absent heads stay empty.
struct Predictions {
  std::vector<int> tool;
  std::vector<int> action;
  std::vector<int> joint;
};

struct EvalReport {
  TaskSpec task = TaskSpec::tools_plus_actions;
  std::string config_hash;
  std::string arch;
  std::string backbone;
  std::size_t n = 0;
  std::optional<double> tool_accuracy;
  std::optional<double> action_accuracy;
  /// Both heads right (dual), or the 16-way accuracy (joint16).
  std::optional<double> joint_accuracy;
  std::optional<Matrix> tool_confusion;    // 4x4, row-normalized
  std::optional<Matrix> action_confusion;  // 4x4, row-normalized
  std::optional<Matrix> joint_confusion;   // 16x16, row-normalized (joint16 only)

  /// The number a run is ranked and reported by: joint accuracy for tasks that
  /// predict both labels, otherwise the single head's accuracy.
  double primary() const;
};

/// Scores predictions against labels under a task's head layout. For joint16
/// the per-head predictions are decoded from the joint class.
/// Throws EvaluationError for an empty set or missing head predictions.
EvalReport evaluate_predictions(const Predictions& predictions, std::span<const int> tool_labels,
                                std::span<const int> action_labels, TaskSpec task);

/// Runs the model in eval mode without gradients.
Predictions predict(models::FusionModel& model, const dataset::ExampleSet& data, int batch_size = 64);

/// predict + evaluate_predictions, stamped with the model's config identifiers.
EvalReport evaluate(models::FusionModel& model, const dataset::ExampleSet& data, TaskSpec task,
                    int batch_size = 64);

nlohmann::json to_json(const EvalReport& r);

}  // namespace affordance::evaluation
