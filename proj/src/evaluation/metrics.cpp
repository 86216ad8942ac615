#include "affordance/evaluation/metrics.hpp"

#include <torch/torch.h>

#include "affordance/errors.hpp"

namespace affordance::evaluation {

Matrix confusion_matrix(std::span<const int> predictions, std::span<const int> labels, int n_classes,
                        bool row_normalize) {
  if (predictions.size() != labels.size())
    throw EvaluationError("confusion matrix: " + std::to_string(predictions.size()) + " predictions vs " +
                          std::to_string(labels.size()) + " labels");
  if (n_classes <= 0) throw EvaluationError("confusion matrix needs at least one class");
  Matrix m(n_classes, std::vector<double>(n_classes, 0.0));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int t = labels[i];
    const int p = predictions[i];
    if (t < 0 || t >= n_classes || p < 0 || p >= n_classes)
      throw EvaluationError("confusion matrix entry out of range at index " + std::to_string(i));
    m[t][p] += 1.0;
  }
  if (row_normalize) {
    for (auto& row : m) {
      double sum = 0;
      for (double v : row) sum += v;
      if (sum > 0)
        for (double& v : row) v /= sum;
    }
  }
  return m;
}

double EvalReport::primary() const {
  if (joint_accuracy) return *joint_accuracy;
  if (tool_accuracy) return *tool_accuracy;
  if (action_accuracy) return *action_accuracy;
  return 0.0;
}

namespace {

double accuracy(std::span<const int> pred, std::span<const int> truth) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += pred[i] == truth[i];
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

void require(const std::vector<int>& v, std::size_t n, const char* head) {
  if (v.size() != n)
    throw EvaluationError(std::string("expected ") + std::to_string(n) + " " + head + " predictions, got " +
                          std::to_string(v.size()));
}

}  // namespace

EvalReport evaluate_predictions(const Predictions& pred, std::span<const int> tool_labels,
                                std::span<const int> action_labels, TaskSpec task) {
  const std::size_t n = tool_labels.size();
  if (n == 0) throw EvaluationError("cannot evaluate an empty set");
  if (action_labels.size() != n) throw EvaluationError("tool and action label counts differ");

  EvalReport r;
  r.task = task;
  r.n = n;
  switch (head_for(task)) {
    case HeadLayout::tool_only:
      require(pred.tool, n, "tool");
      r.tool_accuracy = accuracy(pred.tool, tool_labels);
      r.tool_confusion = confusion_matrix(pred.tool, tool_labels, kNumTools, true);
      break;
    case HeadLayout::action_only:
      require(pred.action, n, "action");
      r.action_accuracy = accuracy(pred.action, action_labels);
      r.action_confusion = confusion_matrix(pred.action, action_labels, kNumActions, true);
      break;
    case HeadLayout::dual: {
      require(pred.tool, n, "tool");
      require(pred.action, n, "action");
      r.tool_accuracy = accuracy(pred.tool, tool_labels);
      r.action_accuracy = accuracy(pred.action, action_labels);
      std::size_t both = 0;
      for (std::size_t i = 0; i < n; ++i) both += pred.tool[i] == tool_labels[i] && pred.action[i] == action_labels[i];
      r.joint_accuracy = static_cast<double>(both) / static_cast<double>(n);
      r.tool_confusion = confusion_matrix(pred.tool, tool_labels, kNumTools, true);
      r.action_confusion = confusion_matrix(pred.action, action_labels, kNumActions, true);
      break;
    }
    case HeadLayout::joint16: {
      require(pred.joint, n, "joint");
      std::vector<int> tool(n), action(n), joint_truth(n);
      for (std::size_t i = 0; i < n; ++i) {
        tool[i] = pred.joint[i] / kNumActions;
        action[i] = pred.joint[i] % kNumActions;
        joint_truth[i] = tool_labels[i] * kNumActions + action_labels[i];
      }
      r.tool_accuracy = accuracy(tool, tool_labels);
      r.action_accuracy = accuracy(action, action_labels);
      r.joint_accuracy = accuracy(pred.joint, joint_truth);
      r.tool_confusion = confusion_matrix(tool, tool_labels, kNumTools, true);
      r.action_confusion = confusion_matrix(action, action_labels, kNumActions, true);
      r.joint_confusion = confusion_matrix(pred.joint, joint_truth, kNumJointClasses, true);
      break;
    }
  }
  return r;
}

Predictions predict(models::FusionModel& model, const dataset::ExampleSet& data, int batch_size) {
  torch::NoGradGuard no_grad;
  const bool was_training = model->is_training();
  model->eval();
  Predictions out;
  auto append = [](std::vector<int>& dst, const std::optional<torch::Tensor>& logits) {
    if (!logits) return;
    auto idx = logits->argmax(1).to(torch::kInt32).contiguous();
    dst.insert(dst.end(), idx.data_ptr<int>(), idx.data_ptr<int>() + idx.numel());
  };
  for (std::int64_t begin = 0; begin < data.size(); begin += batch_size) {
    const auto batch = data.slice(begin, std::min<std::int64_t>(begin + batch_size, data.size()));
    const auto logits = model->forward(batch.input);
    append(out.tool, logits.tool);
    append(out.action, logits.action);
    append(out.joint, logits.joint);
  }
  model->train(was_training);
  return out;
}

EvalReport evaluate(models::FusionModel& model, const dataset::ExampleSet& data, TaskSpec task, int batch_size) {
  if (data.empty()) throw EvaluationError("cannot evaluate an empty set");
  check_compatible(task, model->config());
  const auto pred = predict(model, data, batch_size);
  auto to_vec = [](const torch::Tensor& t) {
    auto c = t.to(torch::kInt32).contiguous();
    return std::vector<int>(c.data_ptr<int>(), c.data_ptr<int>() + c.numel());
  };
  const auto tools = to_vec(data.labels().tool);
  const auto actions = to_vec(data.labels().action);
  EvalReport r = evaluate_predictions(pred, tools, actions, task);
  r.config_hash = config_hash(model->config());
  r.arch = std::string(arch_label(model->config().variant));
  r.backbone = std::string(to_string(model->config().backbone.family));
  return r;
}

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j = {{"task", to_string(r.task)}, {"config_hash", r.config_hash}, {"arch", r.arch},
                      {"backbone", r.backbone},    {"n", r.n},                     {"primary", r.primary()}};
  auto put = [&](const char* key, const auto& v) {
    j[key] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  put("tool_accuracy", r.tool_accuracy);
  put("action_accuracy", r.action_accuracy);
  put("joint_accuracy", r.joint_accuracy);
  put("tool_confusion", r.tool_confusion);
  put("action_confusion", r.action_confusion);
  put("joint_confusion", r.joint_confusion);
  return j;
}

}  // namespace affordance::evaluation
