#include "affordance/training/loss.hpp"

#include <torch/torch.h>

#include "affordance/errors.hpp"

namespace affordance::training {

namespace {

torch::Tensor head_loss(const std::optional<torch::Tensor>& logits, const torch::Tensor& labels, int classes,
                        const char* head) {
  if (!logits) throw ShapeError(std::string("missing ") + head + " logits");
  if (!labels.defined()) throw LabelError(std::string("missing ") + head + " labels");
  if (labels.numel() != logits->size(0))
    throw LabelError(std::string(head) + " label count does not match the batch");
  if (labels.numel() > 0 && (labels.min().item<std::int64_t>() < 0 || labels.max().item<std::int64_t>() >= classes))
    throw LabelError(std::string(head) + " label outside [0, " + std::to_string(classes) + ")");
  return torch::nn::functional::cross_entropy(*logits, labels.to(torch::kInt64));
}

}  // namespace

torch::Tensor loss(const models::LogitsRecord& logits, const dataset::LabelTensors& labels, HeadLayout layout) {
  switch (layout) {
    case HeadLayout::dual:
      return head_loss(logits.tool, labels.tool, kNumTools, "tool") +
             head_loss(logits.action, labels.action, kNumActions, "action");
    case HeadLayout::tool_only: return head_loss(logits.tool, labels.tool, kNumTools, "tool");
    case HeadLayout::action_only: return head_loss(logits.action, labels.action, kNumActions, "action");
    case HeadLayout::joint16: return head_loss(logits.joint, labels.joint, kNumJointClasses, "joint");
  }
  throw ConfigError("unknown head layout");
}

}  // namespace affordance::training
