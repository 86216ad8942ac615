#include "affordance/models/backbone.hpp"

#include <cmath>
#include <functional>
#include <unordered_set>

#include <torch/torch.h>

#include "affordance/errors.hpp"

namespace affordance::models {

namespace nn = torch::nn;

namespace {

nn::Conv2d conv(int in, int out, int kernel, int stride) {
  return nn::Conv2d(nn::Conv2dOptions(in, out, kernel).stride(stride).padding(kernel / 2).bias(false));
}

nn::Sequential shortcut(int in, int out, int stride) {
  if (stride == 1 && in == out) return nullptr;
  return nn::Sequential(conv(in, out, 1, stride), nn::BatchNorm2d(out));
}

template <typename Block>
nn::Sequential make_stage(int& in_planes, int planes, int blocks, int stride) {
  nn::Sequential stage;
  for (int i = 0; i < blocks; ++i) {
    stage->push_back(Block(in_planes, planes, i == 0 ? stride : 1));
    in_planes = planes * Block::Impl::kExpansion;
  }
  return stage;
}

}  // namespace

BasicBlockImpl::BasicBlockImpl(int in_planes, int planes, int stride)
    : conv1_(register_module("conv1", conv(in_planes, planes, 3, stride))),
      conv2_(register_module("conv2", conv(planes, planes, 3, 1))),
      bn1_(register_module("bn1", nn::BatchNorm2d(planes))),
      bn2_(register_module("bn2", nn::BatchNorm2d(planes))),
      downsample_(shortcut(in_planes, planes * kExpansion, stride)) {
  if (downsample_) register_module("downsample", downsample_);
}

torch::Tensor BasicBlockImpl::forward(torch::Tensor x) {
  auto out = torch::relu(bn1_(conv1_(x)));
  out = bn2_(conv2_(out));
  auto identity = downsample_ ? downsample_->forward(x) : x;
  return torch::relu(out + identity);
}

BottleneckImpl::BottleneckImpl(int in_planes, int planes, int stride)
    : conv1_(register_module("conv1", conv(in_planes, planes, 1, 1))),
      conv2_(register_module("conv2", conv(planes, planes, 3, stride))),
      conv3_(register_module("conv3", conv(planes, planes * kExpansion, 1, 1))),
      bn1_(register_module("bn1", nn::BatchNorm2d(planes))),
      bn2_(register_module("bn2", nn::BatchNorm2d(planes))),
      bn3_(register_module("bn3", nn::BatchNorm2d(planes * kExpansion))),
      downsample_(shortcut(in_planes, planes * kExpansion, stride)) {
  if (downsample_) register_module("downsample", downsample_);
}

torch::Tensor BottleneckImpl::forward(torch::Tensor x) {
  auto out = torch::relu(bn1_(conv1_(x)));
  out = torch::relu(bn2_(conv2_(out)));
  out = bn3_(conv3_(out));
  auto identity = downsample_ ? downsample_->forward(x) : x;
  return torch::relu(out + identity);
}

ResNetImpl::ResNetImpl(const BackboneSpec& spec) : BackboneImpl(spec) {
  stem_conv_ = register_module("stem_conv", conv(spec.input_channels, 64, spec.first_block_kernel,
                                                 spec.first_block_stride));
  stem_bn_ = register_module("stem_bn", nn::BatchNorm2d(64));

  int in_planes = 64;
  constexpr std::array<int, 4> planes{64, 128, 256, 512};
  constexpr std::array<int, 4> strides{1, 2, 2, 2};
  std::array<int, 4> depth{};
  bool bottleneck = true;
  switch (spec.family) {
    case BackboneFamily::resnet18:
      depth = {2, 2, 2, 2};
      bottleneck = false;
      break;
    case BackboneFamily::resnet50: depth = {3, 4, 6, 3}; break;
    case BackboneFamily::resnet101: depth = {3, 4, 23, 3}; break;
    case BackboneFamily::tiny: throw ConfigError("tiny is not a ResNet family");
  }
  for (int i = 0; i < 4; ++i) {
    auto stage = bottleneck ? make_stage<Bottleneck>(in_planes, planes[i], depth[i], strides[i])
                            : make_stage<BasicBlock>(in_planes, planes[i], depth[i], strides[i]);
    stages_.push_back(register_module("layer" + std::to_string(i + 1), stage));
  }
  if (in_planes != spec.embedding_dim)
    throw ConfigError("ResNet trunk width " + std::to_string(in_planes) + " does not match embedding width " +
                      std::to_string(spec.embedding_dim));
}

torch::Tensor ResNetImpl::forward(torch::Tensor x) {
  x = torch::relu(stem_bn_(stem_conv_(x)));
  x = torch::max_pool2d(x, 3, 2, 1);
  for (auto& stage : stages_) x = stage->forward(x);
  return torch::adaptive_avg_pool2d(x, {1, 1}).flatten(1);
}

TinyNetImpl::TinyNetImpl(const BackboneSpec& spec) : BackboneImpl(spec) {
  const int w = spec.tiny_width;
  const std::array<int, 4> widths{w / 4, w / 2, w, w};
  nn::Sequential features;
  int in = spec.input_channels + 2;  // plus x / y coordinate planes
  for (int i = 0; i < 4; ++i) {
    const int kernel = i == 0 ? spec.first_block_kernel : 3;
    const int stride = i == 0 ? spec.first_block_stride : 2;
    features->push_back(conv(in, widths[i], kernel, stride));
    features->push_back(nn::BatchNorm2d(widths[i]));
    features->push_back(nn::ReLU());
    in = widths[i];
  }
  features_ = register_module("features", features);
  // 8x8 grid cells plus a global average of the same map
  project_ = register_module("project", nn::Linear(w * 8 * 8 + w, spec.embedding_dim));
}

torch::Tensor TinyNetImpl::forward(torch::Tensor x) {
  const auto opts = x.options();
  const auto ys = torch::linspace(-1.0, 1.0, x.size(2), opts).view({1, 1, -1, 1}).expand({x.size(0), 1, -1, x.size(3)});
  const auto xs = torch::linspace(-1.0, 1.0, x.size(3), opts).view({1, 1, 1, -1}).expand({x.size(0), 1, x.size(2), -1});
  x = features_->forward(torch::cat({x, xs, ys}, 1));
  const auto grid = torch::adaptive_avg_pool2d(x, {8, 8}).flatten(1);
  const auto global = x.mean({2, 3});
  return project_(torch::cat({grid, global}, 1));
}

Backbone build_backbone(const BackboneSpec& spec) {
  validate(spec);
  if (spec.family == BackboneFamily::tiny) return std::make_shared<TinyNetImpl>(spec);
  return std::make_shared<ResNetImpl>(spec);
}

namespace {

// Pre-order walk in registration order. Module::modules(include_self) needs
// the root to live in a shared_ptr, which is not yet true inside constructors.
void for_each_module(nn::Module& m, const std::function<void(nn::Module&)>& fn) {
  fn(m);
  for (auto& child : m.children()) for_each_module(*child, fn);
}

}  // namespace

void initialize_parameters(nn::Module& module, torch::Generator& generator) {
  torch::NoGradGuard no_grad;
  for_each_module(module, [&](nn::Module& mod) {
    nn::Module* m = &mod;
    if (auto* c = m->as<nn::Conv2d>()) {
      const auto& w = c->weight;
      const double fan_in = static_cast<double>(w.size(1) * w.size(2) * w.size(3));
      w.normal_(0.0, std::sqrt(2.0 / fan_in), generator);
      if (c->bias.defined()) c->bias.zero_();
    } else if (auto* bn = m->as<nn::BatchNorm2d>()) {
      bn->weight.fill_(1.0);
      bn->bias.zero_();
    } else if (auto* l = m->as<nn::Linear>()) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(l->weight.size(1)));
      l->weight.uniform_(-bound, bound, generator);
      if (l->bias.defined()) l->bias.zero_();
    }
  });
}

std::int64_t count_parameters(const nn::Module& module) {
  std::unordered_set<const void*> seen;
  std::int64_t total = 0;
  for (const auto& p : module.parameters(/*recurse=*/true)) {
    if (!p.requires_grad()) continue;
    if (seen.insert(p.unsafeGetTensorImpl()).second) total += p.numel();
  }
  return total;
}

std::int64_t reference_parameter_count(BackboneFamily family) {
  BackboneSpec spec = default_backbone(family);
  auto backbone = build_backbone(spec);
  nn::Linear classifier(spec.embedding_dim, 1000);
  return count_parameters(*backbone) + count_parameters(*classifier);
}

}  // namespace affordance::models
