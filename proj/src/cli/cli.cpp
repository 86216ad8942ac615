#include "affordance/cli/cli.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <torch/torch.h>

#include "affordance/config.hpp"
#include "affordance/dataset/dataset.hpp"
#include "affordance/dataset/examples.hpp"
#include "affordance/dataset/preprocess.hpp"
#include "affordance/errors.hpp"
#include "affordance/evaluation/metrics.hpp"
#include "affordance/evaluation/report.hpp"
#include "affordance/models/checkpoint.hpp"
#include "affordance/synthgen/generator.hpp"
#include "affordance/training/search.hpp"
#include "affordance/training/trainer.hpp"

namespace affordance::cli {

namespace fs = std::filesystem;
using nlohmann::json;

nlohmann::json to_json(const RunManifest& m) {
  return {{"subcommand", m.subcommand}, {"config", m.config},         {"inputs", m.inputs},
          {"outputs", m.outputs},       {"seeds", m.seeds},           {"timestamp", m.timestamp},
          {"config_hash", m.config_hash}};
}

void write_run_manifest(const fs::path& dir, const RunManifest& m) {
  fs::create_directories(dir);
  std::ofstream out(dir / kRunManifestFile, std::ios::trunc);
  if (!out) throw IoError("cannot write " + (dir / kRunManifestFile).string());
  out << to_json(m).dump(2) << '\n';
}

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string abs_str(const fs::path& p) { return fs::absolute(p).lexically_normal().generic_string(); }

RunManifest make_manifest(const std::string& sub, const json& config) {
  RunManifest m;
  m.subcommand = sub;
  m.config = config;
  m.timestamp = utc_timestamp();
  m.config_hash = fnv1a_hex(config.dump());
  return m;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string(), 1, e.what());
  }
}

// Everything a run needs to know about its data once a split exists.
struct SplitData {
  dataset::SplitBundle bundle;
  fs::path dir;
};

SplitData make_split(const fs::path& manifest, const dataset::SplitSpec& spec, const fs::path& out_dir) {
  const dataset::Dataset data = dataset::load_manifest(manifest);
  const auto split = dataset::split_dataset(data, spec);
  const auto keys = std::vector<ImageKey>(kAllImageKeys.begin(), kAllImageKeys.end());
  const dataset::NormStats stats = dataset::compute_norm_stats(split.train, keys);
  dataset::write_split(out_dir, split, spec, stats, manifest);
  return {dataset::SplitBundle{split.train, split.val, split.test, spec, stats}, out_dir};
}

fs::path manifest_in(const fs::path& data) {
  if (fs::is_regular_file(data)) return data;
  if (fs::is_regular_file(data / synthgen::kManifestFile)) return data / synthgen::kManifestFile;
  throw LoadError("no manifest found at " + data.string());
}

// A split directory is used as is; a raw manifest is split into `work_dir`.
SplitData resolve_split(const fs::path& data, std::uint64_t split_seed, const fs::path& work_dir) {
  if (fs::is_regular_file(data / dataset::kSplitSidecar)) return {dataset::load_split(data), data};
  dataset::SplitSpec spec;
  spec.seed = split_seed;
  return make_split(manifest_in(data), spec, work_dir);
}

fs::path resolve_eval_manifest(const fs::path& data) {
  if (fs::is_regular_file(data)) return data;
  if (fs::is_regular_file(data / dataset::kSplitSidecar)) return data / dataset::kTestManifest;
  if (fs::is_regular_file(data / synthgen::kManifestFile)) return data / synthgen::kManifestFile;
  fs::path with_ext = data;
  with_ext += ".jsonl";
  if (fs::is_regular_file(with_ext)) return with_ext;
  throw LoadError("no evaluation data found at " + data.string());
}

fs::path resolve_checkpoint(const fs::path& p) {
  if (fs::is_regular_file(p)) return p;
  fs::path with_ext = p;
  with_ext += ".pt";
  if (fs::is_regular_file(with_ext)) return with_ext;
  throw LoadError("checkpoint not found: " + p.string());
}

// Options shared by the commands that build a model.
struct ModelOptions {
  std::string task = "tools+actions";
  std::string arch = "1c1n";
  std::string backbone = "tiny";
  std::optional<int> kernel;
  std::optional<int> stride;
  std::optional<int> embedding_dim;
  std::optional<int> tiny_width;

  void add_to(CLI::App* app) {
    app->add_option("--task", task, "tools | tools-no-action | tools+actions | actions | joint16")
        ->capture_default_str();
    app->add_option("--arch", arch, "3c1n | 3c6n | 3c3n | 1c2n | 1c1n")->capture_default_str();
    app->add_option("--backbone", backbone, "resnet18 | resnet50 | resnet101 | tiny")->capture_default_str();
    app->add_option("--kernel", kernel, "first-block kernel size (3, 5, 7)");
    app->add_option("--stride", stride, "first-block stride (1, 2)");
    app->add_option("--embedding-dim", embedding_dim, "tiny backbone embedding width");
    app->add_option("--tiny-width", tiny_width, "tiny backbone channel width");
  }

  TaskSpec parsed_task() const { return parse_task(task); }

  BackboneSpec backbone_spec() const {
    BackboneSpec bb = default_backbone(parse_family(backbone));
    if (kernel) bb.first_block_kernel = *kernel;
    if (stride) bb.first_block_stride = *stride;
    if (embedding_dim) {
      if (bb.family != BackboneFamily::tiny) throw ConfigError("--embedding-dim applies to the tiny backbone only");
      bb.embedding_dim = *embedding_dim;
    }
    if (tiny_width) {
      if (bb.family != BackboneFamily::tiny) throw ConfigError("--tiny-width applies to the tiny backbone only");
      bb.tiny_width = *tiny_width;
    }
    return bb;
  }

  FusionConfig fusion() const {
    FusionConfig f = make_fusion_config(parsed_task(), parse_variant(arch), backbone_spec());
    validate(f);
    check_compatible(parsed_task(), f);
    return f;
  }
};

struct TrainOptions {
  training::TrainConfig cfg;

  void add_to(CLI::App* app, int default_epochs) {
    cfg.epochs = default_epochs;
    app->add_option("--learning-rate,--lr", cfg.learning_rate)->capture_default_str();
    app->add_option("--batch-size,--batch", cfg.batch_size)->capture_default_str();
    app->add_option("--epochs", cfg.epochs)->capture_default_str();
    app->add_option("--shift-augment", cfg.shift_augment, "max random translation in input pixels (0 = off)")
        ->capture_default_str();
  }
};

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v);
  return buf;
}

training::TrainHooks epoch_logger(std::ostream& out, const std::string& tag, int epochs, bool quiet) {
  training::TrainHooks hooks;
  if (quiet) return hooks;
  hooks.on_epoch_end = [&out, tag, epochs](const training::EpochRecord& r) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s epoch %d/%d  loss %.4f  train %.4f  val %.4f", tag.c_str(), r.epoch + 1,
                  epochs, r.train_loss, r.train_accuracy, r.val.selection);
    out << buf << std::endl;
  };
  return hooks;
}

// Writes the training run directory for one trained model.
void write_run_dir(const fs::path& dir, models::FusionModel& model, const training::TrainResult& result,
                   const FusionConfig& fusion, TaskSpec task, const training::TrainConfig& cfg,
                   const dataset::NormStats& stats, const evaluation::EvalReport& test_report,
                   const fs::path& split_dir) {
  fs::create_directories(dir);
  json config = {{"task", to_string(task)},
                 {"fusion", fusion},
                 {"train", cfg},
                 {"normalization", stats},
                 {"split", abs_str(split_dir)},
                 {"config_hash", config_hash(fusion)}};
  write_json(dir / "config.json", config);
  training::write_history_csv(dir / "history.csv", result.history);

  models::CheckpointMeta meta{fusion, task, stats, cfg.seed, result.history.best_epoch, "best"};
  models::save_checkpoint(dir / "best.pt", model, meta);
  models::restore_state(*model, result.final_state);
  meta.epoch = static_cast<int>(result.history.epochs.size()) - 1;
  meta.kind = "final";
  models::save_checkpoint(dir / "final.pt", model, meta);
  models::restore_state(*model, result.best_state);

  json report = evaluation::to_json(test_report);
  report["seed"] = cfg.seed;
  report["best_epoch"] = result.history.best_epoch;
  write_json(dir / "test_report.json", report);
  evaluation::emit_confusion(test_report, dir, "test_confusion");
}

// Runs `fn`, naming the stage on failure before letting the error propagate.
template <typename Fn>
auto stage(std::ostream& err, const std::string& name, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception&) {
    err << "repro: stage '" << name << "' failed" << std::endl;
    throw;
  }
}

// --------------------------------------------------------------------------

struct SynthArgs {
  int objects = 20;
  int reps = 10;
  std::uint64_t seed = 0;
  std::string out;
  int jobs = 1;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  if (a.objects < 1 || a.objects > dataset::kMaxObjects)
    throw ConfigError("--objects must be in [1, 20], got " + std::to_string(a.objects));
  if (a.reps < 1 || a.reps > dataset::kMaxRepetitions)
    throw ConfigError("--reps must be in [1, 10], got " + std::to_string(a.reps));
  if (a.out.empty()) throw ConfigError("--out is required (or set " + std::string(kDataRootEnv) + ")");
  const json config = {{"objects", a.objects}, {"reps", a.reps}, {"seed", a.seed}, {"jobs", a.jobs}};
  RunManifest m = make_manifest("synth", config);
  m.seeds = {a.seed};
  m.outputs = {{"dir", abs_str(a.out)}, {"manifest", abs_str(fs::path(a.out) / synthgen::kManifestFile)}};
  write_run_manifest(a.out, m);

  synthgen::GenerateOptions opts;
  opts.jobs = a.jobs;
  const fs::path manifest = synthgen::generate_synthetic_dataset(a.out, a.objects, a.reps, a.seed, opts);
  out << "wrote " << a.objects * kNumTools * kNumActions * a.reps << " samples to " << manifest.string() << '\n';
  return kExitOk;
}

struct SplitArgs {
  std::string data;
  std::string out;
  std::uint64_t seed = 0;
};

int cmd_split(const SplitArgs& a, std::ostream& out) {
  if (a.data.empty()) throw ConfigError("--data is required (or set " + std::string(kDataRootEnv) + ")");
  const fs::path manifest = manifest_in(a.data);
  const fs::path out_dir = a.out.empty() ? manifest.parent_path() / "split" : fs::path(a.out);
  RunManifest m = make_manifest("split", {{"seed", a.seed}, {"ratios", {6, 2, 2}}});
  m.seeds = {a.seed};
  m.inputs = {{"manifest", abs_str(manifest)}};
  m.outputs = {{"dir", abs_str(out_dir)}};
  write_run_manifest(out_dir, m);

  dataset::SplitSpec spec;
  spec.seed = a.seed;
  const SplitData s = make_split(manifest, spec, out_dir);
  out << "split " << s.bundle.train.size() << "/" << s.bundle.val.size() << "/" << s.bundle.test.size()
      << " into " << out_dir.string() << '\n';
  return kExitOk;
}

struct TrainArgs {
  ModelOptions model;
  TrainOptions train;
  std::string data;
  std::string out;
  std::uint64_t seed = 0;
  std::uint64_t split_seed = 0;
  bool quiet = false;
};

int cmd_train(TrainArgs a, std::ostream& out) {
  if (a.data.empty()) throw ConfigError("--data is required (or set " + std::string(kDataRootEnv) + ")");
  const TaskSpec task = a.model.parsed_task();
  const FusionConfig fusion = a.model.fusion();
  a.train.cfg.seed = a.seed;
  training::validate(a.train.cfg);

  const fs::path run_dir = a.out.empty() ? fs::path("runs") / (std::string(cli_name(task)) + "_" + a.model.arch +
                                                                "_" + a.model.backbone + "_s" +
                                                                std::to_string(a.seed))
                                         : fs::path(a.out);
  RunManifest m = make_manifest("train", {{"task", to_string(task)},
                                          {"fusion", fusion},
                                          {"train", a.train.cfg},
                                          {"split_seed", a.split_seed}});
  m.config_hash = config_hash(fusion);
  m.seeds = {a.seed};
  m.inputs = {{"data", abs_str(a.data)}};
  m.outputs = {{"run_dir", abs_str(run_dir)}};
  write_run_manifest(run_dir, m);

  const SplitData split = resolve_split(a.data, a.split_seed, run_dir / "split");
  const auto& st = split.bundle.stats;
  const auto train_set = dataset::build_example_set(split.bundle.train, task, fusion, st);
  const auto val_set = dataset::build_example_set(split.bundle.val, task, fusion, st);
  const auto test_set = dataset::build_example_set(split.bundle.test, task, fusion, st);

  auto model = models::build_fusion_model(fusion, a.seed);
  const auto result = training::train(model, train_set, val_set, a.train.cfg, task,
                                      epoch_logger(out, "[train]", a.train.cfg.epochs, a.quiet));
  const auto report = evaluation::evaluate(model, test_set, task);
  write_run_dir(run_dir, model, result, fusion, task, a.train.cfg, st, report, split.dir);
  out << "best epoch " << result.history.best_epoch + 1 << ", test " << pct(report.primary()) << ", run dir "
      << run_dir.string() << '\n';
  return kExitOk;
}

struct GridArgs {
  ModelOptions model;
  TrainOptions train;
  std::string data;
  std::string out = "runs/grid";
  std::uint64_t seed = 0;
  std::uint64_t split_seed = 0;
  bool reduced = false;
  int jobs = 1;
};

int cmd_grid(GridArgs a, std::ostream& out) {
  if (a.data.empty()) throw ConfigError("--data is required (or set " + std::string(kDataRootEnv) + ")");
  const TaskSpec task = a.model.parsed_task();
  const FusionConfig fusion = a.model.fusion();
  a.train.cfg.seed = a.seed;
  training::validate(a.train.cfg);
  const auto space = a.reduced ? training::SearchSpace::reduced() : training::SearchSpace::paper();
  for (const auto& t : training::enumerate(space, a.train.cfg)) {
    training::validate(t.train);
    BackboneSpec bb = fusion.backbone;
    bb.first_block_kernel = t.kernel;
    bb.first_block_stride = t.stride;
    validate(bb);
  }

  RunManifest m = make_manifest("grid", {{"task", to_string(task)},
                                         {"fusion", fusion},
                                         {"train", a.train.cfg},
                                         {"space", a.reduced ? "reduced" : "full"},
                                         {"trials", space.size()},
                                         {"split_seed", a.split_seed}});
  m.config_hash = config_hash(fusion);
  m.seeds = {a.seed};
  m.inputs = {{"data", abs_str(a.data)}};
  m.outputs = {{"dir", abs_str(a.out)}};
  write_run_manifest(a.out, m);

  const SplitData split = resolve_split(a.data, a.split_seed, fs::path(a.out) / "split");
  const auto& st = split.bundle.stats;
  const auto train_set = dataset::build_example_set(split.bundle.train, task, fusion, st);
  const auto val_set = dataset::build_example_set(split.bundle.val, task, fusion, st);

  training::SearchOptions opts;
  opts.jobs = a.jobs;
  opts.on_trial = [&out](const training::Trial& t) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "[grid] trial %zu lr %g batch %d kernel %d stride %d -> %s", t.index,
                  t.spec.train.learning_rate, t.spec.train.batch_size, t.spec.kernel, t.spec.stride,
                  t.failed ? ("failed: " + t.error).c_str() : pct(t.val_selection).c_str());
    out << buf << std::endl;
  };
  const auto result =
      training::grid_search(space, a.train.cfg, task, fusion.variant, fusion.backbone, train_set, val_set, opts);
  training::write_trials_csv(fs::path(a.out) / "trials.csv", result);
  write_json(fs::path(a.out) / "best_config.json", {{"train", result.best.spec.train},
                                                     {"kernel", result.best.spec.kernel},
                                                     {"stride", result.best.spec.stride},
                                                     {"val_selection", result.best.val_selection}});
  out << "best: lr " << result.best.spec.train.learning_rate << ", batch " << result.best.spec.train.batch_size
      << ", kernel " << result.best.spec.kernel << ", stride " << result.best.spec.stride << ", val "
      << pct(result.best.val_selection) << '\n';
  return kExitOk;
}

struct EvalArgs {
  std::string checkpoint;
  std::string data;
  std::string out;
  int batch_size = 64;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  if (a.data.empty()) throw ConfigError("--data is required (or set " + std::string(kDataRootEnv) + ")");
  if (a.batch_size < 1) throw ConfigError("--batch-size must be >= 1");
  const fs::path ckpt = resolve_checkpoint(a.checkpoint);
  const fs::path manifest = resolve_eval_manifest(a.data);
  const fs::path out_dir = a.out.empty() ? ckpt.parent_path() / ("eval_" + ckpt.stem().string()) : fs::path(a.out);
  RunManifest m = make_manifest("eval", {{"batch_size", a.batch_size}});
  m.inputs = {{"checkpoint", abs_str(ckpt)}, {"manifest", abs_str(manifest)}};
  m.outputs = {{"dir", abs_str(out_dir)}};
  write_run_manifest(out_dir, m);

  auto loaded = models::load_checkpoint(ckpt);
  m.config_hash = config_hash(loaded.meta.fusion);
  m.seeds = {loaded.meta.seed};
  write_run_manifest(out_dir, m);

  const auto data = dataset::load_manifest(manifest);
  const auto set = dataset::build_example_set(data, loaded.meta.task, loaded.meta.fusion, loaded.meta.stats);
  const auto report = evaluation::evaluate(loaded.model, set, loaded.meta.task, a.batch_size);
  json j = evaluation::to_json(report);
  j["checkpoint"] = abs_str(ckpt);
  j["manifest"] = abs_str(manifest);
  write_json(out_dir / "eval_report.json", j);
  evaluation::emit_confusion(report, out_dir, "confusion");
  out << "n " << report.n;
  if (report.tool_accuracy) out << "  tool " << pct(*report.tool_accuracy);
  if (report.action_accuracy) out << "  action " << pct(*report.action_accuracy);
  if (report.joint_accuracy) out << "  joint " << pct(*report.joint_accuracy);
  out << '\n';
  return kExitOk;
}

struct ReportArgs {
  std::vector<std::string> runs;
  std::string out = "report";
  std::string title = "Test accuracy (%)";
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
  if (a.runs.empty()) throw ConfigError("at least one run directory is required");
  RunManifest m = make_manifest("report", {{"title", a.title}});
  m.inputs = {{"runs", a.runs}};
  m.outputs = {{"dir", abs_str(a.out)}};
  write_run_manifest(a.out, m);

  evaluation::ResultsTable table;
  table.title = a.title;
  std::string task;
  for (const auto& r : a.runs) {
    const json report = read_json(fs::path(r) / "test_report.json");
    const json config = read_json(fs::path(r) / "config.json");
    const FusionConfig fusion = config.at("fusion").get<FusionConfig>();
    const std::string run_task = report.at("task").get<std::string>();
    if (task.empty()) task = run_task;
    if (run_task != task) throw ConfigError("runs mix tasks '" + task + "' and '" + run_task + "'");
    const auto row = evaluation::arch_title(fusion.variant);
    const auto col = evaluation::backbone_title(fusion.backbone.family);
    evaluation::ResultCell cell;
    if (auto it = table.cells.find({row, col}); it != table.cells.end()) {
      cell = it->second;
      if (cell.config_hash != config_hash(fusion))
        throw ConfigError("runs for " + row + " / " + col + " have different configurations");
    }
    cell.config_hash = config_hash(fusion);
    cell.values.push_back(report.at("primary").get<double>());
    table.add(row, col, cell);
  }
  table.task = task;
  evaluation::emit_report(table, a.out, "results");
  out << evaluation::render_text(table);
  return kExitOk;
}

struct ReproArgs {
  std::string out = "repro";
  int objects = 4;
  int reps = 10;
  int seeds = 2;
  std::uint64_t first_seed = 0;
  std::uint64_t data_seed = 0;
  TrainOptions train;
  int jobs = 1;
  bool full = false;
  bool quiet = false;
};

int cmd_repro(ReproArgs a, std::ostream& out, std::ostream& err) {
  std::vector<BackboneFamily> families{BackboneFamily::tiny};
  if (a.full) {
    a.objects = dataset::kMaxObjects;
    a.reps = dataset::kMaxRepetitions;
    a.seeds = 5;
    a.train.cfg.epochs = 150;
    a.train.cfg.shift_augment = 0;
    families = {BackboneFamily::resnet18, BackboneFamily::resnet50, BackboneFamily::resnet101};
    err << "warning: --full trains 3 ResNet backbones x 5 architectures x 5 seeds for 150 epochs on 3200 samples,\n"
           "         after a 72-trial grid search per backbone, without shift augmentation.\n"
           "         Expect weeks of CPU time and ~15 GB of RAM.\n";
  }
  if (a.seeds < 1) throw ConfigError("--seeds must be >= 1");
  if (a.objects < 1 || a.objects > dataset::kMaxObjects) throw ConfigError("--objects must be in [1, 20]");
  if (a.reps != dataset::kMaxRepetitions)
    throw ConfigError("--reps must be 10 so every (object, tool, action) group splits 6:2:2");
  training::validate(a.train.cfg);

  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < a.seeds; ++i) seeds.push_back(a.first_seed + static_cast<std::uint64_t>(i));
  const fs::path root = a.out;
  json families_json = json::array();
  for (auto f : families) families_json.push_back(to_string(f));
  RunManifest m = make_manifest("repro", {{"objects", a.objects},
                                          {"reps", a.reps},
                                          {"seeds", seeds},
                                          {"data_seed", a.data_seed},
                                          {"train", a.train.cfg},
                                          {"backbones", families_json},
                                          {"full", a.full},
                                          {"jobs", a.jobs}});
  m.seeds = seeds;
  m.outputs = {{"dir", abs_str(root)}, {"results", abs_str(root / "results.txt")}};
  write_run_manifest(root, m);

  const fs::path manifest = stage(err, "synth", [&] {
    synthgen::GenerateOptions opts;
    opts.jobs = a.jobs;
    return synthgen::generate_synthetic_dataset(root / "data", a.objects, a.reps, a.data_seed, opts);
  });
  const SplitData split = stage(err, "split", [&] {
    dataset::SplitSpec spec;
    spec.seed = a.data_seed;
    return make_split(manifest, spec, root / "data" / "split");
  });

  const TaskSpec main_task = TaskSpec::tools_plus_actions;
  const auto all_keys = std::vector<ImageKey>(kAllImageKeys.begin(), kAllImageKeys.end());
  struct Sets {
    dataset::ExampleSet train, val, test;
  };
  const Sets full_sets = stage(err, "load", [&] {
    const auto f = make_fusion_config(main_task, FusionVariant::separate_3C6N, BackboneSpec{});
    const auto& st = split.bundle.stats;
    return Sets{dataset::build_example_set(split.bundle.train, main_task, f, st),
                dataset::build_example_set(split.bundle.val, main_task, f, st),
                dataset::build_example_set(split.bundle.test, main_task, f, st)};
  });

  evaluation::ResultsTable table;
  table.title = "Test joint accuracy (%), tools+actions";
  table.task = std::string(to_string(main_task));
  evaluation::ResultsTable ablation;
  ablation.title = "Dual head vs joint16, Shared-central (1C-1N), test joint accuracy (%)";
  ablation.task = "tools+actions vs joint16";

  auto run_config = [&](TaskSpec task, FusionVariant v, const BackboneSpec& bb, const training::TrainConfig& cfg) {
    const FusionConfig fusion = make_fusion_config(task, v, bb);
    const auto keys = variant_image_keys(v);
    const auto train_set = full_sets.train.view(keys, task);
    const auto val_set = full_sets.val.view(keys, task);
    const auto test_set = full_sets.test.view(keys, task);
    training::SeedOptions opts;
    opts.jobs = a.jobs;
    const std::string tag = std::string(cli_name(v)) + "_" + std::string(to_string(bb.family)) + "_" +
                            std::string(cli_name(task));
    opts.on_seed_done = [&, tag](const training::SeedRun& run, models::FusionModel& model,
                                 const training::TrainResult& r) {
      training::TrainConfig c = cfg;
      c.seed = run.seed;
      write_run_dir(root / "runs" / (tag + "_s" + std::to_string(run.seed)), model, r, fusion, task, c,
                    split.bundle.stats, run.report, split.dir);
      out << "[" << tag << " s" << run.seed << "] test " << pct(run.test_accuracy) << std::endl;
    };
    opts.hooks = epoch_logger(out, "[" + tag + "]", cfg.epochs, a.quiet);
    const auto runs =
        stage(err, "train " + tag, [&] { return training::run_seeds(fusion, cfg, task, train_set, val_set, test_set, seeds, opts); });
    evaluation::ResultCell cell;
    cell.config_hash = config_hash(fusion);
    for (const auto& r : runs) cell.values.push_back(r.test_accuracy);
    return cell;
  };

  for (BackboneFamily family : families) {
    BackboneSpec bb = default_backbone(family);
    training::TrainConfig cfg = a.train.cfg;
    if (a.full) {
      const auto keys = variant_image_keys(FusionVariant::shared_central_1C1N);
      const auto result = stage(err, "grid " + std::string(to_string(family)), [&] {
        training::SearchOptions so;
        so.jobs = a.jobs;
        return training::grid_search(training::SearchSpace::paper(), cfg, TaskSpec::joint16,
                                     FusionVariant::shared_central_1C1N, bb,
                                     full_sets.train.view(keys, TaskSpec::joint16),
                                     full_sets.val.view(keys, TaskSpec::joint16), so);
      });
      training::write_trials_csv(root / ("trials_" + std::string(to_string(family)) + ".csv"), result);
      cfg.learning_rate = result.best.spec.train.learning_rate;
      cfg.batch_size = result.best.spec.train.batch_size;
      bb.first_block_kernel = result.best.spec.kernel;
      bb.first_block_stride = result.best.spec.stride;
    }
    const auto col = evaluation::backbone_title(family);
    for (FusionVariant v : kAllVariants) {
      const auto cell = run_config(main_task, v, bb, cfg);
      table.add(evaluation::arch_title(v), col, cell);
      if (v == FusionVariant::shared_central_1C1N) ablation.add("Dual head (tool + action)", col, cell);
    }
    ablation.add("Joint 16-way head", col,
                 run_config(TaskSpec::joint16, FusionVariant::shared_central_1C1N, bb, cfg));
  }

  stage(err, "report", [&] {
    evaluation::emit_report(table, root, "results");
    evaluation::emit_report(ablation, root, "ablation");
    return 0;
  });
  out << '\n' << evaluation::render_text(table) << '\n' << evaluation::render_text(ablation);
  return kExitOk;
}

// --------------------------------------------------------------------------

// Expands `--config file.json` into flags placed before the user's own flags.
// Options keep the last value given, so explicit flags win over the file.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::size_t at = args.size();
  std::string file;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      at = i;
      file = args[i + 1];
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      at = i;
      file = args[i].substr(9);
      break;
    }
  }
  if (at == args.size()) return args;

  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config file " + file + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file " + file + " must hold a JSON object");

  std::vector<std::string> injected;
  for (const auto& [key, value] : j.items()) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    auto scalar = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    if (value.is_boolean()) {
      if (value.get<bool>()) injected.push_back(flag);
    } else if (value.is_array()) {
      for (const auto& v : value) {
        injected.push_back(flag);
        injected.push_back(scalar(v));
      }
    } else if (value.is_object()) {
      throw ConfigError("config file " + file + ": key '" + key + "' must not be an object");
    } else {
      injected.push_back(flag);
      injected.push_back(scalar(value));
    }
  }

  // Insert right after the subcommand name, the first argument that is not a flag.
  std::size_t sub = 1;
  while (sub < args.size() && args[sub].rfind("-", 0) == 0) ++sub;
  std::vector<std::string> out(args.begin(), args.begin() + static_cast<std::ptrdiff_t>(std::min(sub + 1, args.size())));
  out.insert(out.end(), injected.begin(), injected.end());
  for (std::size_t i = std::min(sub + 1, args.size()); i < args.size(); ++i) out.push_back(args[i]);
  return out;
}

std::string one_line(const std::string& what) {
  std::string s = what;
  std::replace(s.begin(), s.end(), '\n', ' ');
  if (s.size() > 400) s = s.substr(0, 397) + "...";
  return s;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tool and action recognition from multi-camera before/after images", "affordance"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  const char* config_help = "JSON file of option values; explicit flags take precedence";

  SynthArgs synth;
  auto* s_synth = app.add_subcommand("synth", "generate a synthetic dataset");
  s_synth->add_option("--objects", synth.objects)->capture_default_str();
  s_synth->add_option("--reps", synth.reps)->capture_default_str();
  s_synth->add_option("--seed", synth.seed)->capture_default_str();
  s_synth->add_option("--out", synth.out, "output directory")->envname(kDataRootEnv);
  s_synth->add_option("--jobs", synth.jobs)->capture_default_str();
  s_synth->add_option("--config")->description(config_help);

  SplitArgs split;
  auto* s_split = app.add_subcommand("split", "split a manifest 6:2:2 and compute normalisation statistics");
  s_split->add_option("--data", split.data, "manifest file or dataset directory")->envname(kDataRootEnv);
  s_split->add_option("--out", split.out, "split directory (default: <data>/split)");
  s_split->add_option("--seed", split.seed)->capture_default_str();
  s_split->add_option("--config")->description(config_help);

  TrainArgs train;
  auto* s_train = app.add_subcommand("train", "train one model and evaluate it on the test split");
  train.model.add_to(s_train);
  train.train.add_to(s_train, 150);
  s_train->add_option("--data", train.data, "split directory, dataset directory or manifest")
      ->envname(kDataRootEnv);
  s_train->add_option("--out", train.out, "run directory");
  s_train->add_option("--seed", train.seed)->capture_default_str();
  s_train->add_option("--split-seed", train.split_seed)->capture_default_str();
  s_train->add_flag("--quiet", train.quiet);
  s_train->add_option("--config")->description(config_help);

  GridArgs grid;
  grid.model.task = "joint16";
  auto* s_grid = app.add_subcommand("grid", "hyperparameter grid search");
  grid.model.add_to(s_grid);
  grid.train.add_to(s_grid, 150);
  s_grid->add_option("--data", grid.data)->envname(kDataRootEnv);
  s_grid->add_option("--out", grid.out)->capture_default_str();
  s_grid->add_option("--seed", grid.seed)->capture_default_str();
  s_grid->add_option("--split-seed", grid.split_seed)->capture_default_str();
  s_grid->add_flag("--reduced", grid.reduced, "2 learning rates x 2 batch sizes instead of the 72-point grid");
  s_grid->add_option("--jobs", grid.jobs)->capture_default_str();
  s_grid->add_option("--config")->description(config_help);

  EvalArgs eval;
  auto* s_eval = app.add_subcommand("eval", "evaluate a checkpoint");
  s_eval->add_option("--checkpoint", eval.checkpoint)->required();
  s_eval->add_option("--data", eval.data, "manifest, split directory or dataset directory")
      ->envname(kDataRootEnv);
  s_eval->add_option("--out", eval.out);
  s_eval->add_option("--batch-size", eval.batch_size)->capture_default_str();
  s_eval->add_option("--config")->description(config_help);

  ReportArgs report;
  auto* s_report = app.add_subcommand("report", "aggregate run directories into an accuracy table");
  s_report->add_option("--runs,runs", report.runs)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  s_report->add_option("--out", report.out)->capture_default_str();
  s_report->add_option("--title", report.title)->capture_default_str();
  s_report->add_option("--config")->description(config_help);

  ReproArgs repro;
  repro.train.cfg.batch_size = 16;
  repro.train.cfg.shift_augment = 8;
  auto* s_repro = app.add_subcommand("repro", "synthesise, train every architecture and emit the results table");
  s_repro->add_option("--out", repro.out)->capture_default_str();
  s_repro->add_option("--objects", repro.objects)->capture_default_str();
  s_repro->add_option("--reps", repro.reps)->capture_default_str();
  s_repro->add_option("--seeds", repro.seeds, "number of seeds")->capture_default_str();
  s_repro->add_option("--first-seed", repro.first_seed)->capture_default_str();
  s_repro->add_option("--data-seed", repro.data_seed)->capture_default_str();
  repro.train.add_to(s_repro, 12);
  s_repro->add_option("--jobs", repro.jobs)->capture_default_str();
  s_repro->add_flag("--full", repro.full, "ResNet backbones, full data, 5 seeds, 150 epochs, full grid");
  s_repro->add_flag("--quiet", repro.quiet);
  s_repro->add_option("--config")->description(config_help);

  std::vector<std::string> args;
  try {
    args = expand_config(raw_args);
  } catch (const ConfigError& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return kExitUsage;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name

  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << one_line(e.what()) << "\nrun with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (s_synth->parsed()) return cmd_synth(synth, out);
    if (s_split->parsed()) return cmd_split(split, out);
    if (s_train->parsed()) return cmd_train(train, out);
    if (s_grid->parsed()) return cmd_grid(grid, out);
    if (s_eval->parsed()) return cmd_eval(eval, out);
    if (s_report->parsed()) return cmd_report(report, out);
    if (s_repro->parsed()) return cmd_repro(repro, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace affordance::cli
