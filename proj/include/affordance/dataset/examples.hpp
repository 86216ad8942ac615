#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include <torch/types.h>

#include "affordance/config.hpp"
#include "affordance/dataset/dataset.hpp"

namespace affordance::dataset {

/// Network input for one sample (tensors 3x128x128) or one batch (Bx3x128x128).
/// Holds exactly the images the fusion variant consumes.
struct ModelInput {
  std::map<ImageKey, torch::Tensor> images;
  /// Length-4 (or Bx4) action one-hot; present only for tools_with_action.
  std::optional<torch::Tensor> action_one_hot;
};

struct LabelRecord {
  int tool = 0;
  std::optional<int> action;  // tasks that predict the action
  std::optional<int> joint;   // joint16 only: tool * 4 + action
};

/// Builds one model-ready example. Throws ConfigError when the fusion config
/// does not fit the task (e.g. an action one-hot requested for joint16).
std::pair<ModelInput, LabelRecord> make_example(const Sample& sample, TaskSpec task, const FusionConfig& fusion,
                                                const NormStats& stats);

/// Batched labels as int64 tensors. Tool and action are always filled so
/// per-head metrics are available for every task; joint = tool * 4 + action.
struct LabelTensors {
  torch::Tensor tool;
  torch::Tensor action;
  torch::Tensor joint;
};

struct Batch {
  ModelInput input;
  LabelTensors labels;
};

/// A preprocessed dataset held in memory, stacked per image key.
class ExampleSet {
 public:
  ExampleSet() = default;

  std::int64_t size() const { return static_cast<std::int64_t>(keys_.size()); }
  bool empty() const { return keys_.empty(); }
  TaskSpec task() const { return task_; }
  const std::vector<ImageKey>& image_keys() const { return image_keys_; }
  const std::vector<SampleKey>& sample_keys() const { return keys_; }
  const LabelTensors& labels() const { return labels_; }

  /// Rows selected by an int64 index tensor.
  Batch batch(const torch::Tensor& indices) const;
  /// Consecutive rows [begin, end).
  Batch slice(std::int64_t begin, std::int64_t end) const;

  /// Shares this set's tensors, keeping only `keys` and re-tagging the task.
  /// The action one-hot is rebuilt from the labels when the task needs it.
  /// Throws ShapeError when a requested key is not held.
  ExampleSet view(const std::vector<ImageKey>& keys, TaskSpec task) const;

  /// Assembles from per-example pieces; used by build_example_set and tests.
  static ExampleSet from_parts(TaskSpec task, std::vector<ImageKey> image_keys,
                               std::map<ImageKey, torch::Tensor> images, std::optional<torch::Tensor> one_hot,
                               LabelTensors labels, std::vector<SampleKey> keys);

 private:
  TaskSpec task_ = TaskSpec::tools_plus_actions;
  std::vector<ImageKey> image_keys_;
  std::map<ImageKey, torch::Tensor> images_;
  std::optional<torch::Tensor> one_hot_;
  LabelTensors labels_;
  std::vector<SampleKey> keys_;
};

/// Runs make_example over a dataset and stacks the results. Only the images
/// the fusion variant consumes are decoded and kept.
ExampleSet build_example_set(const Dataset& data, TaskSpec task, const FusionConfig& fusion,
                             const NormStats& stats);

}  // namespace affordance::dataset
