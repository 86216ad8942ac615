#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "affordance/config.hpp"
#include "affordance/dataset/examples.hpp"
#include "affordance/evaluation/metrics.hpp"
#include "affordance/training/trainer.hpp"

namespace affordance::training {

struct SearchSpace {
  std::vector<double> learning_rates;
  std::vector<int> batch_sizes;
  std::vector<int> kernels;
  std::vector<int> strides;

  /// 3 learning rates x 4 batch sizes x 3 kernels x 2 strides.
  static SearchSpace paper();
  /// Two learning rates x two batch sizes at the default first block.
  static SearchSpace reduced();

  std::size_t size() const;
};

struct TrialSpec {
  TrainConfig train;
  int kernel = 3;
  int stride = 2;
};

/// Enumerates the space in lr, batch, kernel, stride order (stride fastest).
std::vector<TrialSpec> enumerate(const SearchSpace& space, const TrainConfig& base);

struct Trial {
  std::size_t index = 0;
  TrialSpec spec;
  bool failed = false;
  std::string error;
  double val_selection = 0.0;
  int best_epoch = -1;
};

struct SearchResult {
  /// Successful trials by descending validation selection, then failed ones.
  std::vector<Trial> trials;
  /// Highest-scoring successful trial.
  Trial best;
};

struct SearchOptions {
  int jobs = 1;
  std::function<void(const Trial&)> on_trial;
};

/// Trains one model per combination on the given task and ranks them by
/// validation accuracy. Diverged or failing trials are recorded as failed.
/// Throws ConfigError for an empty space and Error when every trial fails.
SearchResult grid_search(const SearchSpace& space, const TrainConfig& base, TaskSpec task, FusionVariant variant,
                         const BackboneSpec& backbone, const dataset::ExampleSet& train_set,
                         const dataset::ExampleSet& val_set, const SearchOptions& options = {});

/// Columns: rank, trial, learning_rate, batch_size, kernel, stride, status,
/// val_selection, best_epoch, error.
void write_trials_csv(const std::filesystem::path& path, const SearchResult& result);

struct SeedRun {
  std::uint64_t seed = 0;
  double test_accuracy = 0.0;
  evaluation::EvalReport report;
  TrainHistory history;
};

struct SeedOptions {
  int jobs = 1;
  /// Receives the trained model (holding its best weights) and the full result.
  std::function<void(const SeedRun&, models::FusionModel&, const TrainResult&)> on_seed_done;
  TrainHooks hooks;
};

/// One train + test cycle per seed; the seed drives initialisation and data
/// order. Results are returned in seed order. Any failure is rethrown as a
/// SeedError naming the seed.
std::vector<SeedRun> run_seeds(const FusionConfig& fusion, const TrainConfig& base, TaskSpec task,
                               const dataset::ExampleSet& train_set, const dataset::ExampleSet& val_set,
                               const dataset::ExampleSet& test_set, const std::vector<std::uint64_t>& seeds,
                               const SeedOptions& options = {});

}  // namespace affordance::training
