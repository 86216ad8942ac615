#include "affordance/training/search.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <mutex>

#include "affordance/errors.hpp"
#include "affordance/parallel.hpp"

namespace affordance::training {

SearchSpace SearchSpace::paper() { return {{1e-3, 5e-4, 1e-4}, {16, 32, 64, 128}, {3, 5, 7}, {1, 2}}; }

SearchSpace SearchSpace::reduced() { return {{1e-3, 5e-4}, {16, 32}, {3}, {2}}; }

std::size_t SearchSpace::size() const {
  return learning_rates.size() * batch_sizes.size() * kernels.size() * strides.size();
}

std::vector<TrialSpec> enumerate(const SearchSpace& space, const TrainConfig& base) {
  std::vector<TrialSpec> out;
  out.reserve(space.size());
  for (double lr : space.learning_rates)
    for (int bs : space.batch_sizes)
      for (int k : space.kernels)
        for (int s : space.strides) {
          TrialSpec t{base, k, s};
          t.train.learning_rate = lr;
          t.train.batch_size = bs;
          out.push_back(t);
        }
  return out;
}

SearchResult grid_search(const SearchSpace& space, const TrainConfig& base, TaskSpec task, FusionVariant variant,
                         const BackboneSpec& backbone, const dataset::ExampleSet& train_set,
                         const dataset::ExampleSet& val_set, const SearchOptions& options) {
  const auto specs = enumerate(space, base);
  if (specs.empty()) throw ConfigError("search space is empty");

  std::vector<Trial> trials(specs.size());
  std::mutex report_mutex;
  parallel_for(specs.size(), options.jobs, [&](std::size_t i) {
    Trial& t = trials[i];
    t.index = i;
    t.spec = specs[i];
    try {
      BackboneSpec bb = backbone;
      bb.first_block_kernel = t.spec.kernel;
      bb.first_block_stride = t.spec.stride;
      const FusionConfig fusion = make_fusion_config(task, variant, bb);
      auto model = models::build_fusion_model(fusion, t.spec.train.seed);
      const TrainResult r = train(model, train_set, val_set, t.spec.train, task);
      t.val_selection = r.history.best_selection();
      t.best_epoch = r.history.best_epoch;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      t.failed = true;
      t.error = e.what();
    }
    if (options.on_trial) {
      std::lock_guard lock(report_mutex);
      options.on_trial(t);
    }
  });

  std::stable_sort(trials.begin(), trials.end(), [](const Trial& a, const Trial& b) {
    if (a.failed != b.failed) return !a.failed;
    return a.val_selection > b.val_selection;
  });
  if (trials.front().failed) throw Error("every search trial failed; first error: " + trials.front().error);
  return {trials, trials.front()};
}

void write_trials_csv(const std::filesystem::path& path, const SearchResult& result) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "rank,trial,learning_rate,batch_size,kernel,stride,status,val_selection,best_epoch,error\n";
  for (std::size_t r = 0; r < result.trials.size(); ++r) {
    const Trial& t = result.trials[r];
    std::string err = t.error;
    std::replace(err.begin(), err.end(), '"', '\'');
    std::replace(err.begin(), err.end(), '\n', ' ');
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu,%zu,%g,%d,%d,%d,%s,%.6f,%d,", r + 1, t.index, t.spec.train.learning_rate,
                  t.spec.train.batch_size, t.spec.kernel, t.spec.stride, t.failed ? "failed" : "ok",
                  t.val_selection, t.best_epoch);
    out << buf << '"' << err << "\"\n";
  }
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<SeedRun> run_seeds(const FusionConfig& fusion, const TrainConfig& base, TaskSpec task,
                               const dataset::ExampleSet& train_set, const dataset::ExampleSet& val_set,
                               const dataset::ExampleSet& test_set, const std::vector<std::uint64_t>& seeds,
                               const SeedOptions& options) {
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  check_compatible(task, fusion);

  std::vector<SeedRun> runs(seeds.size());
  std::mutex done_mutex;
  parallel_for(seeds.size(), options.jobs, [&](std::size_t i) {
    const std::uint64_t seed = seeds[i];
    try {
      TrainConfig cfg = base;
      cfg.seed = seed;
      auto model = models::build_fusion_model(fusion, seed);
      const TrainResult r = train(model, train_set, val_set, cfg, task, options.hooks);
      SeedRun& run = runs[i];
      run.seed = seed;
      run.history = r.history;
      run.report = evaluation::evaluate(model, test_set, task);
      run.test_accuracy = run.report.primary();
      if (options.on_seed_done) {
        std::lock_guard lock(done_mutex);
        options.on_seed_done(run, model, r);
      }
    } catch (const SeedError&) {
      throw;
    } catch (const std::exception& e) {
      throw SeedError(seed, e.what());
    }
  });
  return runs;
}

}  // namespace affordance::training
