#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <torch/nn/module.h>
#include <torch/nn/modules/linear.h>
#include <torch/nn/pimpl.h>

#include "affordance/config.hpp"
#include "affordance/dataset/examples.hpp"
#include "affordance/models/backbone.hpp"

namespace affordance::models {

/// Output of a forward pass; which fields are set depends on the head layout.
struct LogitsRecord {
  std::optional<torch::Tensor> tool;    // (B, 4)
  std::optional<torch::Tensor> action;  // (B, 4)
  std::optional<torch::Tensor> joint;   // (B, 16)
};

/// One of the five multi-camera fusion architectures with its classifier heads.
///
/// Embeddings are concatenated in the order cameras (left, center, right) x
/// phase (initial, final), restricted to the cameras the variant uses; the
/// action one-hot, when configured, is appended last. Shared variants hold a
/// single encoder per camera and call it for both phases, so the two phases
/// alias one parameter set.
class FusionModelImpl : public torch::nn::Module {
 public:
  /// Parameters are drawn from a generator seeded with `seed`.
  FusionModelImpl(const FusionConfig& config, std::uint64_t seed);

  LogitsRecord forward(const dataset::ModelInput& input);

  /// Per-route embeddings in concatenation order. For the stacked variant this
  /// is a single embedding of the 18-channel input.
  std::vector<torch::Tensor> encode(const dataset::ModelInput& input);

  const FusionConfig& config() const { return config_; }
  int head_input_width() const { return head_input_width_; }
  const std::vector<Backbone>& encoders() const { return encoders_; }
  /// Encoder that processes a given image. For the stacked variant every key
  /// maps to the single encoder.
  const Backbone& encoder_for(ImageKey key) const;
  /// Encoder forward calls since construction.
  std::int64_t encoder_invocations() const { return invocations_; }

 private:
  void check_input(const dataset::ModelInput& input) const;

  FusionConfig config_;
  std::vector<ImageKey> keys_;
  std::vector<Backbone> encoders_;
  std::map<ImageKey, std::size_t> route_;
  torch::nn::Linear tool_head_{nullptr};
  torch::nn::Linear action_head_{nullptr};
  torch::nn::Linear joint_head_{nullptr};
  int head_input_width_ = 0;
  std::int64_t invocations_ = 0;
};
TORCH_MODULE(FusionModel);

/// Validates the config (ConfigError) and builds a freshly initialised model.
FusionModel build_fusion_model(const FusionConfig& config, std::uint64_t seed = 0);

/// Trainable scalars with aliased (shared) tensors counted once.
std::int64_t count_parameters(const FusionModel& model);

/// Parameters and buffers, keyed by name. Used for best-epoch snapshots.
using ModelState = std::vector<std::pair<std::string, torch::Tensor>>;
ModelState snapshot_state(const torch::nn::Module& module);
void restore_state(torch::nn::Module& module, const ModelState& state);

}  // namespace affordance::models
