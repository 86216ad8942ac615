#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <torch/nn/module.h>
#include <torch/nn/modules/batchnorm.h>
#include <torch/nn/modules/container/sequential.h>
#include <torch/nn/modules/conv.h>
#include <torch/nn/modules/linear.h>

#include "affordance/config.hpp"

namespace affordance::models {

/// Image encoder: (B, C, 128, 128) -> (B, embedding_dim).
class BackboneImpl : public torch::nn::Module {
 public:
  explicit BackboneImpl(BackboneSpec spec) : spec_(spec) {}
  ~BackboneImpl() override = default;

  virtual torch::Tensor forward(torch::Tensor x) = 0;
  const BackboneSpec& spec() const { return spec_; }
  int embedding_dim() const { return spec_.embedding_dim; }

 private:
  BackboneSpec spec_;
};

using Backbone = std::shared_ptr<BackboneImpl>;

class BasicBlockImpl : public torch::nn::Module {
 public:
  static constexpr int kExpansion = 1;
  BasicBlockImpl(int in_planes, int planes, int stride);
  torch::Tensor forward(torch::Tensor x);

 private:
  torch::nn::Conv2d conv1_{nullptr}, conv2_{nullptr};
  torch::nn::BatchNorm2d bn1_{nullptr}, bn2_{nullptr};
  torch::nn::Sequential downsample_{nullptr};
};
TORCH_MODULE(BasicBlock);

class BottleneckImpl : public torch::nn::Module {
 public:
  static constexpr int kExpansion = 4;
  BottleneckImpl(int in_planes, int planes, int stride);
  torch::Tensor forward(torch::Tensor x);

 private:
  torch::nn::Conv2d conv1_{nullptr}, conv2_{nullptr}, conv3_{nullptr};
  torch::nn::BatchNorm2d bn1_{nullptr}, bn2_{nullptr}, bn3_{nullptr};
  torch::nn::Sequential downsample_{nullptr};
};
TORCH_MODULE(Bottleneck);

/// ResNet-18/50/101 trunk with a configurable first block; ends in global
/// average pooling (no classifier).
class ResNetImpl : public BackboneImpl {
 public:
  explicit ResNetImpl(const BackboneSpec& spec);
  torch::Tensor forward(torch::Tensor x) override;

 private:
  torch::nn::Conv2d stem_conv_{nullptr};
  torch::nn::BatchNorm2d stem_bn_{nullptr};
  std::vector<torch::nn::Sequential> stages_;
};

/// Four conv-BN-ReLU blocks (channels width/4, width/2, width, width), each
/// halving the resolution, then an 8x8 average-pooled map flattened through a
/// linear layer. Flattening keeps coarse object position in the embedding.
class TinyNetImpl : public BackboneImpl {
 public:
  explicit TinyNetImpl(const BackboneSpec& spec);
  torch::Tensor forward(torch::Tensor x) override;

 private:
  torch::nn::Sequential features_{nullptr};
  torch::nn::Linear project_{nullptr};
};

/// Throws ConfigError for an invalid spec.
Backbone build_backbone(const BackboneSpec& spec);

/// He (fan-in) normal init for convolutions, unit/zero BatchNorm affine,
/// uniform(+-1/sqrt(fan_in)) weights and zero biases for linear layers. Every
/// draw comes from `generator`, so a model's init depends only on its seed.
void initialize_parameters(torch::nn::Module& module, torch::Generator& generator);

/// Trainable scalars, each distinct tensor counted once.
std::int64_t count_parameters(const torch::nn::Module& module);

/// Parameter count of the family with its default first block on 3-channel
/// input plus the reference 1000-class linear classifier.
std::int64_t reference_parameter_count(BackboneFamily family);

}  // namespace affordance::models
