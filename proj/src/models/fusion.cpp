#include "affordance/models/fusion.hpp"

#include <ATen/CPUGeneratorImpl.h>
#include <torch/torch.h>

#include "affordance/dataset/preprocess.hpp"
#include "affordance/errors.hpp"

namespace affordance::models {

namespace {

void require_finite(const torch::Tensor& t, const std::string& where) {
  if (!torch::isfinite(t).all().item<bool>()) throw NumericalError("non-finite activations in " + where);
}

}  // namespace

FusionModelImpl::FusionModelImpl(const FusionConfig& config, std::uint64_t seed)
    : config_(config), keys_(variant_image_keys(config.variant)) {
  validate(config_);

  const auto views = variant_views(config_.variant);
  switch (config_.variant) {
    case FusionVariant::stacked_3C1N:
    case FusionVariant::shared_central_1C1N:
      encoders_.push_back(build_backbone(config_.backbone));
      for (ImageKey k : keys_) route_[k] = 0;
      break;
    case FusionVariant::separate_3C6N:
    case FusionVariant::separate_central_1C2N:
      for (ImageKey k : keys_) {
        route_[k] = encoders_.size();
        encoders_.push_back(build_backbone(config_.backbone));
      }
      break;
    case FusionVariant::shared_3C3N:
      for (CameraView v : views) {
        route_[{v, Phase::initial}] = encoders_.size();
        route_[{v, Phase::final}] = encoders_.size();
        encoders_.push_back(build_backbone(config_.backbone));
      }
      break;
  }
  for (std::size_t i = 0; i < encoders_.size(); ++i) register_module("encoder" + std::to_string(i), encoders_[i]);

  head_input_width_ = variant_embedding_count(config_.variant) * config_.backbone.embedding_dim +
                      (config_.use_action_input ? kNumActions : 0);
  switch (config_.head) {
    case HeadLayout::dual:
      tool_head_ = register_module("tool_head", torch::nn::Linear(head_input_width_, kNumTools));
      action_head_ = register_module("action_head", torch::nn::Linear(head_input_width_, kNumActions));
      break;
    case HeadLayout::tool_only:
      tool_head_ = register_module("tool_head", torch::nn::Linear(head_input_width_, kNumTools));
      break;
    case HeadLayout::action_only:
      action_head_ = register_module("action_head", torch::nn::Linear(head_input_width_, kNumActions));
      break;
    case HeadLayout::joint16:
      joint_head_ = register_module("joint_head", torch::nn::Linear(head_input_width_, kNumJointClasses));
      break;
  }

  auto generator = at::make_generator<at::CPUGeneratorImpl>(seed);
  initialize_parameters(*this, generator);
}

const Backbone& FusionModelImpl::encoder_for(ImageKey key) const {
  auto it = route_.find(key);
  if (it == route_.end())
    throw ShapeError(to_string(key) + " is not an input of " + std::string(arch_label(config_.variant)));
  return encoders_[it->second];
}

void FusionModelImpl::check_input(const dataset::ModelInput& input) const {
  for (const auto& [k, t] : input.images)
    if (!route_.count(k))
      throw ShapeError("unexpected input " + to_string(k) + " for " + std::string(arch_label(config_.variant)));
  for (ImageKey k : keys_) {
    auto it = input.images.find(k);
    if (it == input.images.end())
      throw ShapeError("missing input " + to_string(k) + " for " + std::string(arch_label(config_.variant)));
    const auto& t = it->second;
    const bool ok = (t.dim() == 3 || t.dim() == 4) && t.size(-3) == 3 && t.size(-2) == dataset::kImageSize &&
                    t.size(-1) == dataset::kImageSize;
    if (!ok) throw ShapeError("input " + to_string(k) + " must be 3x128x128 (optionally batched)");
  }
  if (config_.use_action_input && !input.action_one_hot)
    throw ShapeError("missing input action_one_hot");
  if (!config_.use_action_input && input.action_one_hot) throw ShapeError("unexpected input action_one_hot");
  if (input.action_one_hot && input.action_one_hot->size(-1) != kNumActions)
    throw ShapeError("input action_one_hot must have 4 entries");
}

std::vector<torch::Tensor> FusionModelImpl::encode(const dataset::ModelInput& input) {
  check_input(input);
  auto batched = [](const torch::Tensor& t) { return t.dim() == 3 ? t.unsqueeze(0) : t; };

  std::vector<torch::Tensor> embeddings;
  if (config_.variant == FusionVariant::stacked_3C1N) {
    std::vector<torch::Tensor> planes;
    for (ImageKey k : keys_) planes.push_back(batched(input.images.at(k)));
    ++invocations_;
    embeddings.push_back(encoders_[0]->forward(torch::cat(planes, 1)));
    require_finite(embeddings.back(), "encoder0 (stacked input)");
    return embeddings;
  }
  for (ImageKey k : keys_) {
    const std::size_t e = route_.at(k);
    ++invocations_;
    embeddings.push_back(encoders_[e]->forward(batched(input.images.at(k))));
    require_finite(embeddings.back(), "encoder" + std::to_string(e) + " (" + to_string(k) + ")");
  }
  return embeddings;
}

LogitsRecord FusionModelImpl::forward(const dataset::ModelInput& input) {
  auto parts = encode(input);
  if (config_.use_action_input) {
    auto one_hot = *input.action_one_hot;
    if (one_hot.dim() == 1) one_hot = one_hot.unsqueeze(0);
    parts.push_back(one_hot.to(parts.front().dtype()));
  }
  auto features = torch::cat(parts, 1);

  LogitsRecord out;
  if (tool_head_) {
    out.tool = tool_head_(features);
    require_finite(*out.tool, "tool_head");
  }
  if (action_head_) {
    out.action = action_head_(features);
    require_finite(*out.action, "action_head");
  }
  if (joint_head_) {
    out.joint = joint_head_(features);
    require_finite(*out.joint, "joint_head");
  }
  return out;
}

FusionModel build_fusion_model(const FusionConfig& config, std::uint64_t seed) {
  return FusionModel(config, seed);
}

std::int64_t count_parameters(const FusionModel& model) { return count_parameters(*model); }

ModelState snapshot_state(const torch::nn::Module& module) {
  torch::NoGradGuard no_grad;
  ModelState state;
  for (const auto& p : module.named_parameters(true)) state.emplace_back(p.key(), p.value().detach().clone());
  for (const auto& b : module.named_buffers(true)) state.emplace_back(b.key(), b.value().detach().clone());
  return state;
}

void restore_state(torch::nn::Module& module, const ModelState& state) {
  torch::NoGradGuard no_grad;
  auto params = module.named_parameters(true);
  auto buffers = module.named_buffers(true);
  for (const auto& [name, value] : state) {
    if (auto* p = params.find(name)) {
      p->copy_(value);
    } else if (auto* b = buffers.find(name)) {
      b->copy_(value);
    } else {
      throw ShapeError("state entry '" + name + "' has no counterpart in the model");
    }
  }
}

}  // namespace affordance::models
