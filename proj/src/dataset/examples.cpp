#include "affordance/dataset/examples.hpp"

#include <torch/torch.h>

#include "affordance/dataset/preprocess.hpp"
#include "affordance/errors.hpp"

namespace affordance::dataset {

std::pair<ModelInput, LabelRecord> make_example(const Sample& sample, TaskSpec task, const FusionConfig& fusion,
                                                const NormStats& stats) {
  validate(fusion);
  check_compatible(task, fusion);

  ModelInput input;
  for (ImageKey k : variant_image_keys(fusion.variant))
    input.images.emplace(k, preprocess_image(read_image(sample.image(k)), stats));
  if (task_uses_action_input(task)) {
    const ActionOneHot v = encode_action(sample.action);
    input.action_one_hot = torch::tensor(std::vector<float>(v.begin(), v.end()));
  }

  LabelRecord label;
  label.tool = index_of(sample.tool);
  if (task_predicts_action(task)) label.action = index_of(sample.action);
  if (task == TaskSpec::joint16) label.joint = joint_index(sample.tool, sample.action);
  return {std::move(input), label};
}

Batch ExampleSet::batch(const torch::Tensor& indices) const {
  Batch b;
  for (const auto& [k, t] : images_) b.input.images.emplace(k, t.index_select(0, indices));
  if (one_hot_) b.input.action_one_hot = one_hot_->index_select(0, indices);
  b.labels.tool = labels_.tool.index_select(0, indices);
  b.labels.action = labels_.action.index_select(0, indices);
  b.labels.joint = labels_.joint.index_select(0, indices);
  return b;
}

Batch ExampleSet::slice(std::int64_t begin, std::int64_t end) const {
  return batch(torch::arange(begin, end, torch::kInt64));
}

ExampleSet ExampleSet::view(const std::vector<ImageKey>& keys, TaskSpec task) const {
  std::map<ImageKey, torch::Tensor> images;
  for (ImageKey k : keys) {
    auto it = images_.find(k);
    if (it == images_.end()) throw ShapeError("example set holds no " + affordance::to_string(k) + " images");
    images.emplace(k, it->second);
  }
  std::optional<torch::Tensor> one_hot;
  if (task_uses_action_input(task))
    one_hot = torch::one_hot(labels_.action, kNumActions).to(torch::kFloat32);
  return from_parts(task, keys, std::move(images), std::move(one_hot), labels_, keys_);
}

ExampleSet ExampleSet::from_parts(TaskSpec task, std::vector<ImageKey> image_keys,
                                  std::map<ImageKey, torch::Tensor> images, std::optional<torch::Tensor> one_hot,
                                  LabelTensors labels, std::vector<SampleKey> keys) {
  ExampleSet s;
  s.task_ = task;
  s.image_keys_ = std::move(image_keys);
  s.images_ = std::move(images);
  s.one_hot_ = std::move(one_hot);
  s.labels_ = std::move(labels);
  s.keys_ = std::move(keys);
  return s;
}

ExampleSet build_example_set(const Dataset& data, TaskSpec task, const FusionConfig& fusion,
                             const NormStats& stats) {
  validate(fusion);
  check_compatible(task, fusion);
  const auto keys = variant_image_keys(fusion.variant);
  const auto n = static_cast<std::int64_t>(data.size());

  std::map<ImageKey, torch::Tensor> images;
  for (ImageKey k : keys) images.emplace(k, torch::empty({n, 3, kImageSize, kImageSize}, torch::kFloat32));
  std::optional<torch::Tensor> one_hot;
  if (task_uses_action_input(task)) one_hot = torch::zeros({n, kNumActions}, torch::kFloat32);
  auto tool = torch::empty({n}, torch::kInt64);
  auto action = torch::empty({n}, torch::kInt64);
  std::vector<SampleKey> sample_keys;
  sample_keys.reserve(data.size());

  for (std::int64_t i = 0; i < n; ++i) {
    const Sample& s = data[static_cast<std::size_t>(i)];
    auto [input, label] = make_example(s, task, fusion, stats);
    for (auto& [k, t] : input.images) images.at(k)[i].copy_(t);
    if (one_hot) (*one_hot)[i].copy_(*input.action_one_hot);
    tool[i] = label.tool;
    action[i] = index_of(s.action);
    sample_keys.push_back(s.key());
  }
  LabelTensors labels{tool, action, tool * kNumActions + action};
  return ExampleSet::from_parts(task, keys, std::move(images), std::move(one_hot), std::move(labels),
                                std::move(sample_keys));
}

}  // namespace affordance::dataset
