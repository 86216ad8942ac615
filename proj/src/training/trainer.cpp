#include "affordance/training/trainer.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include <torch/torch.h>

#include "affordance/errors.hpp"
#include "affordance/evaluation/metrics.hpp"
#include "affordance/training/loss.hpp"

namespace affordance::training {

void validate(const TrainConfig& c) {
  if (!(c.learning_rate > 0.0) || !std::isfinite(c.learning_rate))
    throw ConfigError("learning_rate must be > 0, got " + std::to_string(c.learning_rate));
  if (c.batch_size < 1) throw ConfigError("batch_size must be >= 1, got " + std::to_string(c.batch_size));
  if (c.epochs < 1) throw ConfigError("epochs must be >= 1, got " + std::to_string(c.epochs));
  if (c.shift_augment < 0 || c.shift_augment >= 32)
    throw ConfigError("shift_augment must be in [0, 32), got " + std::to_string(c.shift_augment));
  if (c.adam.beta1 < 0 || c.adam.beta1 >= 1 || c.adam.beta2 < 0 || c.adam.beta2 >= 1)
    throw ConfigError("adam betas must be in [0, 1)");
  if (!(c.adam.eps > 0) || c.adam.weight_decay < 0) throw ConfigError("adam eps must be > 0, weight_decay >= 0");
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"learning_rate", c.learning_rate},
       {"batch_size", c.batch_size},
       {"epochs", c.epochs},
       {"seed", c.seed},
       {"shift_augment", c.shift_augment},
       {"optimizer",
        {{"name", "adam"},
         {"beta1", c.adam.beta1},
         {"beta2", c.adam.beta2},
         {"eps", c.adam.eps},
         {"weight_decay", c.adam.weight_decay}}}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  c = TrainConfig{};
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.epochs = j.value("epochs", c.epochs);
  c.seed = j.value("seed", c.seed);
  c.shift_augment = j.value("shift_augment", c.shift_augment);
  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    if (o.value("name", std::string("adam")) != "adam") throw ConfigError("only the adam optimizer is supported");
    c.adam.beta1 = o.value("beta1", c.adam.beta1);
    c.adam.beta2 = o.value("beta2", c.adam.beta2);
    c.adam.eps = o.value("eps", c.adam.eps);
    c.adam.weight_decay = o.value("weight_decay", c.adam.weight_decay);
  }
}

namespace {

// Separate stream from the one used for parameter initialisation.
constexpr std::uint64_t kShuffleSalt = 0x5bd1e9955bd1e995ULL;
constexpr std::uint64_t kShiftSalt = 0x2545f4914f6cdd1dULL;

// Translates every image of sample i by shifts[i] = (dy, dx), filling with 0
// (the normalised mean, close to the background).
void shift_samples(dataset::ModelInput& input, const std::vector<std::array<int, 2>>& shifts, int max_shift) {
  for (auto& [key, images] : input.images) {
    const auto padded = torch::constant_pad_nd(images, {max_shift, max_shift, max_shift, max_shift}, 0.0);
    const std::int64_t h = images.size(2), w = images.size(3);
    std::vector<torch::Tensor> rows;
    rows.reserve(shifts.size());
    for (std::size_t i = 0; i < shifts.size(); ++i)
      rows.push_back(padded[static_cast<std::int64_t>(i)]
                         .narrow(1, max_shift - shifts[i][0], h)
                         .narrow(2, max_shift - shifts[i][1], w));
    images = torch::stack(rows);
  }
}

void check_disjoint(const dataset::ExampleSet& a, const dataset::ExampleSet& b) {
  std::set<dataset::SampleKey> keys(a.sample_keys().begin(), a.sample_keys().end());
  for (const auto& k : b.sample_keys())
    if (keys.count(k)) throw ConfigError("train and validation sets share sample " + dataset::to_string(k));
}

// Correct predictions in a batch under the task's selection metric.
std::int64_t count_correct(const models::LogitsRecord& logits, const dataset::LabelTensors& labels,
                           HeadLayout layout) {
  switch (layout) {
    case HeadLayout::dual: {
      auto ok = logits.tool->argmax(1).eq(labels.tool).logical_and(logits.action->argmax(1).eq(labels.action));
      return ok.sum().item<std::int64_t>();
    }
    case HeadLayout::tool_only: return logits.tool->argmax(1).eq(labels.tool).sum().item<std::int64_t>();
    case HeadLayout::action_only: return logits.action->argmax(1).eq(labels.action).sum().item<std::int64_t>();
    case HeadLayout::joint16: return logits.joint->argmax(1).eq(labels.joint).sum().item<std::int64_t>();
  }
  return 0;
}

}  // namespace

ValidationMetrics validate_model(models::FusionModel& model, const dataset::ExampleSet& data, TaskSpec task) {
  const auto report = evaluation::evaluate(model, data, task);
  return {report.tool_accuracy, report.action_accuracy, report.joint_accuracy, report.primary()};
}

TrainResult train(models::FusionModel& model, const dataset::ExampleSet& train_set,
                  const dataset::ExampleSet& val_set, const TrainConfig& config, TaskSpec task,
                  const TrainHooks& hooks) {
  validate(config);
  check_compatible(task, model->config());
  if (train_set.empty()) throw ConfigError("training set is empty");
  if (val_set.empty() && !hooks.validator) throw ConfigError("validation set is empty");
  check_disjoint(train_set, val_set);

  const HeadLayout layout = head_for(task);
  torch::optim::Adam optimizer(model->parameters(), torch::optim::AdamOptions(config.learning_rate)
                                                        .betas({config.adam.beta1, config.adam.beta2})
                                                        .eps(config.adam.eps)
                                                        .weight_decay(config.adam.weight_decay));

  std::mt19937_64 rng(config.seed ^ kShuffleSalt);
  std::mt19937_64 shift_rng(config.seed ^ kShiftSalt);
  std::vector<std::array<int, 2>> shifts;
  const std::int64_t n = train_set.size();
  std::vector<std::int64_t> order(static_cast<std::size_t>(n));

  TrainResult result;
  double best = -1.0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);

    model->train();
    double loss_sum = 0.0;
    std::int64_t correct = 0;
    int step = 0;
    for (std::int64_t begin = 0; begin < n; begin += config.batch_size, ++step) {
      const std::int64_t end = std::min<std::int64_t>(n, begin + config.batch_size);
      const auto idx = torch::from_blob(order.data() + begin, {end - begin}, torch::kInt64).clone();
      dataset::Batch batch = train_set.batch(idx);
      if (config.shift_augment > 0) {
        const auto span = static_cast<std::uint64_t>(2 * config.shift_augment + 1);
        shifts.resize(static_cast<std::size_t>(end - begin));
        for (auto& s : shifts)
          for (int& v : s) v = static_cast<int>(shift_rng() % span) - config.shift_augment;
        shift_samples(batch.input, shifts, config.shift_augment);
      }

      optimizer.zero_grad();
      models::LogitsRecord logits;
      try {
        logits = model->forward(batch.input);
      } catch (const NumericalError& e) {
        throw DivergedError(epoch, step, e.what());
      }
      torch::Tensor l = loss(logits, batch.labels, layout);
      const double value = l.item<double>();
      if (!std::isfinite(value)) throw DivergedError(epoch, step, "non-finite loss");
      l.backward();
      optimizer.step();

      loss_sum += value * static_cast<double>(end - begin);
      {
        torch::NoGradGuard no_grad;
        correct += count_correct(logits, batch.labels, layout);
      }
      if (hooks.on_step) hooks.on_step(epoch, step, value);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(n);
    rec.train_accuracy = static_cast<double>(correct) / static_cast<double>(n);
    try {
      rec.val = hooks.validator ? hooks.validator(model, epoch) : validate_model(model, val_set, task);
    } catch (const NumericalError& e) {
      throw DivergedError(epoch, step, e.what());
    }
    result.history.epochs.push_back(rec);
    if (rec.val.selection > best) {
      best = rec.val.selection;
      result.history.best_epoch = epoch;
      result.best_state = models::snapshot_state(*model);
    }
    if (hooks.on_epoch_end) hooks.on_epoch_end(rec);
  }

  result.final_state = models::snapshot_state(*model);
  models::restore_state(*model, result.best_state);
  return result;
}

void write_history_csv(const std::filesystem::path& path, const TrainHistory& history) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  auto cell = [](const std::optional<double>& v) {
    if (!v) return std::string();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", *v);
    return std::string(buf);
  };
  out << "epoch,train_loss,train_acc,val_acc_tool,val_acc_action,val_acc_joint\n";
  for (const auto& r : history.epochs)
    out << r.epoch << ',' << cell(r.train_loss) << ',' << cell(r.train_accuracy) << ',' << cell(r.val.tool) << ','
        << cell(r.val.action) << ',' << cell(r.val.joint) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace affordance::training
