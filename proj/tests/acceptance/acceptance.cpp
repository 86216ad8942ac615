// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.
//
//   acceptance [--work DIR] [--only N,N,...] [--keep] [--report FILE]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <torch/torch.h>

#include "affordance/cli/cli.hpp"
#include "affordance/config.hpp"
#include "affordance/dataset/dataset.hpp"
#include "affordance/dataset/examples.hpp"
#include "affordance/dataset/preprocess.hpp"
#include "affordance/errors.hpp"
#include "affordance/evaluation/metrics.hpp"
#include "affordance/evaluation/stats.hpp"
#include "affordance/models/backbone.hpp"
#include "affordance/models/fusion.hpp"
#include "affordance/synthgen/generator.hpp"
#include "affordance/synthgen/oracle.hpp"
#include "affordance/training/loss.hpp"
#include "affordance/training/trainer.hpp"

namespace fs = std::filesystem;
using namespace affordance;
using nlohmann::json;

namespace {

// Time budgets, seconds.
constexpr double kBudgetSchema = 300;
constexpr double kBudgetOracle = 120;
constexpr double kBudgetShapes = 120;
constexpr double kBudgetParams = 120;
constexpr double kBudgetSharing = 120;
constexpr double kBudgetGradient = 300;
constexpr double kBudgetOverfit = 180;
constexpr double kBudgetDesk = 1200;
constexpr double kBudgetStats = 60;
constexpr double kBudgetConfusion = 120;
constexpr double kBudgetRepro = 2700;

// Tolerances.
constexpr double kParamTolerance = 0.01;
constexpr double kGradRelError = 1e-3;
constexpr double kDeskJoint = 0.95;
constexpr double kDeskAction = 0.99;
constexpr double kStatsTolerance = 1e-4;
constexpr double kRowSumTolerance = 1e-9;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Context {
  fs::path work;
  fs::path full_manifest;
  fs::path repro_a;
  fs::path repro_b;
  double repro_seconds_a = -1;
  double repro_seconds_b = -1;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int cli(std::vector<std::string> args, std::string* err_text = nullptr) {
  args.insert(args.begin(), "affordance");
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

void ensure_full_dataset(Context& ctx) {
  if (!ctx.full_manifest.empty()) return;
  ctx.full_manifest = synthgen::generate_synthetic_dataset(ctx.work / "full", dataset::kMaxObjects,
                                                           dataset::kMaxRepetitions, 0);
}

Outcome schema(Context& ctx) {
  ensure_full_dataset(ctx);
  const auto data = dataset::load_manifest(ctx.full_manifest);
  std::set<fs::path> images;
  for (const auto& s : data.samples())
    for (ImageKey k : kAllImageKeys) images.insert(s.image(k));
  std::size_t on_disk = 0;
  for (const auto& e : fs::directory_iterator(ctx.full_manifest.parent_path() / "images"))
    on_disk += e.path().extension() == ".png";

  const auto split = dataset::split_dataset(data, dataset::SplitSpec{});
  std::map<std::tuple<int, Tool, Action>, std::array<int, 3>> groups;
  auto tally = [&](const dataset::Dataset& d, int slot) {
    for (const auto& s : d.samples()) ++groups[{s.object_id, s.tool, s.action}][slot];
  };
  tally(split.train, 0);
  tally(split.val, 1);
  tally(split.test, 2);
  bool groups_ok = groups.size() == 320;
  for (const auto& [k, c] : groups) groups_ok = groups_ok && c == std::array<int, 3>{6, 2, 2};

  Outcome o;
  o.pass = data.size() == 3200 && images.size() == 19200 && on_disk == 19200 && split.train.size() == 1920 &&
           split.val.size() == 640 && split.test.size() == 640 && groups_ok;
  o.detail = std::to_string(data.size()) + " records, " + std::to_string(on_disk) + " images, split (" +
             std::to_string(split.train.size()) + ", " + std::to_string(split.val.size()) + ", " +
             std::to_string(split.test.size()) + "), groups 6:2:2 " + (groups_ok ? "yes" : "no");
  return o;
}

Outcome oracle(Context& ctx) {
  ensure_full_dataset(ctx);
  const auto data = dataset::load_manifest(ctx.full_manifest);
  const auto params = synthgen::load_params(ctx.full_manifest.parent_path() / synthgen::kParamsFile);
  std::size_t correct = 0;
  for (const auto& s : data.samples()) {
    try {
      const auto r = synthgen::oracle_classify(s, params);
      correct += r.tool == s.tool && r.action == s.action;
    } catch (const OracleError&) {
    }
  }
  return {correct == data.size() && correct == 3200,
          std::to_string(correct) + "/" + std::to_string(data.size()) + " correct"};
}

dataset::ModelInput random_input(const FusionConfig& c, std::int64_t batch, torch::Dtype dtype, std::uint64_t seed) {
  auto gen = at::make_generator<at::CPUGeneratorImpl>(seed);
  dataset::ModelInput in;
  for (ImageKey k : variant_image_keys(c.variant))
    in.images.emplace(k, torch::randn({batch, 3, 128, 128}, gen, dtype));
  if (c.use_action_input)
    in.action_one_hot = torch::one_hot(torch::tensor({0, 1, 2, 3}, torch::kInt64).narrow(0, 0, batch), 4)
                            .to(dtype);
  return in;
}

dataset::LabelTensors random_labels(std::int64_t batch) {
  const auto t = torch::arange(batch, torch::kInt64).remainder(4);
  const auto a = (t + 1).remainder(4);
  return {t, a, t * 4 + a};
}

Outcome shapes(Context&) {
  int ok = 0, total = 0;
  bool stacked_18 = false;
  std::string failures;
  for (FusionVariant v : kAllVariants) {
    for (TaskSpec task : {TaskSpec::tools_plus_actions, TaskSpec::joint16}) {
      ++total;
      const auto c = make_fusion_config(task, v, default_backbone(BackboneFamily::tiny));
      auto model = models::build_fusion_model(c, 1);
      const std::int64_t b = 3;
      const auto logits = model->forward(random_input(c, b, torch::kFloat32, 2));
      bool good = true;
      if (c.head == HeadLayout::dual) {
        good = logits.tool && logits.action && !logits.joint && logits.tool->sizes() == at::IntArrayRef{b, 4} &&
               logits.action->sizes() == at::IntArrayRef{b, 4};
      } else {
        good = logits.joint && !logits.tool && logits.joint->sizes() == at::IntArrayRef{b, 16};
      }
      training::loss(logits, random_labels(b), c.head).backward();
      for (const auto& p : model->parameters()) good = good && p.grad().defined();
      const auto emb = model->encode(random_input(c, b, torch::kFloat32, 2));
      const std::size_t routes = v == FusionVariant::stacked_3C1N ? 1 : variant_image_keys(v).size();
      good = good && emb.size() == routes;
      if (v == FusionVariant::stacked_3C1N) stacked_18 = c.backbone.input_channels == 18;
      if (good) ++ok;
      else failures += " " + std::string(to_string(v)) + "/" + std::string(to_string(task));
    }
  }
  return {ok == total && stacked_18, std::to_string(ok) + "/" + std::to_string(total) +
                                         " variant x head combinations, stacked input channels " +
                                         (stacked_18 ? "18" : "wrong") + failures};
}

Outcome params(Context&) {
  const std::array<std::pair<BackboneFamily, double>, 3> targets{
      {{BackboneFamily::resnet18, 11.7e6}, {BackboneFamily::resnet50, 25.6e6}, {BackboneFamily::resnet101, 44.5e6}}};
  bool pass = true;
  std::string detail;
  for (const auto& [family, target] : targets) {
    const auto n = static_cast<double>(models::reference_parameter_count(family));
    const double rel = std::abs(n - target) / target;
    pass = pass && rel <= kParamTolerance;
    detail += (detail.empty() ? "" : ", ") + std::string(to_string(family)) + " " + std::to_string(
                  static_cast<long long>(n)) + fmt(" (%.2f%%)", 100 * rel);
  }
  return {pass, detail};
}

Outcome sharing(Context&) {
  bool pass = true;
  std::string detail;
  for (FusionVariant v : kAllVariants) {
    const auto c = make_fusion_config(TaskSpec::tools_plus_actions, v, default_backbone(BackboneFamily::tiny));
    auto model = models::build_fusion_model(c, 3);
    torch::optim::Adam opt(model->parameters(), torch::optim::AdamOptions(1e-3));
    bool all_grads = true;
    for (int step = 0; step < 10; ++step) {
      opt.zero_grad();
      const auto logits = model->forward(random_input(c, 4, torch::kFloat32, 10 + step));
      training::loss(logits, random_labels(4), c.head).backward();
      if (step == 0)
        for (const auto& p : model->parameters())
          all_grads = all_grads && p.grad().defined() && p.grad().abs().sum().item<double>() > 0;
      opt.step();
    }
    pass = pass && all_grads;
    std::string note = std::string(to_string(v)) + (all_grads ? "" : " (zero gradient)");
    if (variant_shares_weights(v)) {
      bool identical = true;
      for (ImageKey initial : variant_image_keys(v)) {
        if (initial.phase != Phase::initial) continue;
        const ImageKey final_key{initial.view, Phase::final};
        const auto a = model->encoder_for(initial)->parameters();
        const auto b = model->encoder_for(final_key)->parameters();
        identical = identical && a.size() == b.size();
        for (std::size_t i = 0; identical && i < a.size(); ++i) identical = torch::equal(a[i], b[i]);
      }
      pass = pass && identical;
      note += identical ? " phases identical" : " phases DIFFER";
    }
    detail += (detail.empty() ? "" : "; ") + note;
  }
  return {pass, detail};
}

Outcome gradient(Context&) {
  BackboneSpec bb = default_backbone(BackboneFamily::tiny);
  bb.tiny_width = 8;
  bb.embedding_dim = 4;
  const auto c = make_fusion_config(TaskSpec::tools_plus_actions, FusionVariant::shared_central_1C1N, bb);
  auto model = models::build_fusion_model(c, 11);
  model->to(torch::kDouble);
  model->train();
  const auto in = random_input(c, 2, torch::kDouble, 4);
  const auto labels = random_labels(2);
  auto objective = [&] { return training::loss(model->forward(in), labels, c.head); };
  model->zero_grad();
  objective().backward();

  double diff_sq = 0, analytic_sq = 0, numeric_sq = 0;
  const double h = 1e-6;
  std::int64_t checked = 0;
  torch::NoGradGuard ng;
  for (auto& p : model->parameters()) {
    const auto g = p.grad().clone().view(-1);
    auto flat = p.view(-1);
    for (std::int64_t i = 0; i < flat.numel(); ++i, ++checked) {
      const double orig = flat[i].item<double>();
      flat[i] = orig + h;
      const double up = objective().item<double>();
      flat[i] = orig - h;
      const double down = objective().item<double>();
      flat[i] = orig;
      const double numeric = (up - down) / (2 * h);
      const double analytic = g[i].item<double>();
      diff_sq += (numeric - analytic) * (numeric - analytic);
      analytic_sq += analytic * analytic;
      numeric_sq += numeric * numeric;
    }
  }
  const double rel = std::sqrt(diff_sq) / std::max(std::sqrt(analytic_sq), std::sqrt(numeric_sq));
  return {rel < kGradRelError && analytic_sq > 0,
          "relative error " + fmt("%.3g", rel) + " over " + std::to_string(checked) + " float64 parameters"};
}

Outcome overfit(Context& ctx) {
  const auto manifest = synthgen::generate_synthetic_dataset(ctx.work / "overfit", 1, 10, 5);
  const auto data = dataset::load_manifest(manifest);
  const auto c = make_fusion_config(TaskSpec::tools_plus_actions, FusionVariant::shared_central_1C1N,
                                    default_backbone(BackboneFamily::tiny));
  const auto keys = variant_image_keys(c.variant);
  const auto stats = dataset::compute_norm_stats(data, keys);
  const auto all = dataset::build_example_set(data, TaskSpec::tools_plus_actions, c, stats);
  // 16 samples: one repetition of every (tool, action) pair
  const auto idx = torch::arange(0, 160, 10, torch::kInt64);
  const auto b = all.batch(idx);
  std::vector<dataset::SampleKey> sub_keys;
  for (std::int64_t i = 0; i < 16; ++i) sub_keys.push_back(all.sample_keys()[static_cast<std::size_t>(i * 10)]);
  const auto subset = dataset::ExampleSet::from_parts(TaskSpec::tools_plus_actions, all.image_keys(),
                                                      b.input.images, std::nullopt, b.labels, sub_keys);
  auto model = models::build_fusion_model(c, 0);
  training::TrainConfig cfg;
  cfg.learning_rate = 1e-3;
  cfg.batch_size = 16;
  cfg.epochs = 200;
  int reached = -1;
  training::TrainHooks hooks;
  hooks.validator = [](models::FusionModel&, int) { return training::ValidationMetrics{}; };
  hooks.on_epoch_end = [&](const training::EpochRecord& r) {
    if (reached < 0 && r.train_accuracy == 1.0) reached = r.epoch;
  };
  training::train(model, subset, dataset::ExampleSet{}, cfg, TaskSpec::tools_plus_actions, hooks);
  return {reached >= 0, reached >= 0 ? "100% train accuracy after step " + std::to_string(reached + 1) + " of 200"
                                     : "never reached 100% in 200 steps"};
}

Outcome desk(Context& ctx) {
  ensure_full_dataset(ctx);
  const fs::path run = ctx.work / "desk";
  std::string err;
  const int code = cli({"train", "--task", "tools+actions", "--arch", "1c1n", "--backbone", "tiny", "--data",
                        ctx.full_manifest.parent_path().string(), "--out", run.string(), "--epochs", "30",
                        "--learning-rate", "1e-3", "--batch-size", "32", "--shift-augment", "8", "--quiet"},
                       &err);
  if (code != 0) return {false, "train exited " + std::to_string(code) + ": " + err};
  const auto r = json::parse(slurp(run / "test_report.json"));
  const double joint = r.at("joint_accuracy"), action = r.at("action_accuracy"), tool = r.at("tool_accuracy");
  return {joint >= kDeskJoint && action >= kDeskAction,
          "test joint " + fmt("%.4f", joint) + " (>= 0.95), action " + fmt("%.4f", action) + " (>= 0.99), tool " +
              fmt("%.4f", tool) + ", best epoch " + std::to_string(r.at("best_epoch").get<int>() + 1)};
}

void ensure_repro(Context& ctx) {
  if (!ctx.repro_a.empty()) return;
  auto once = [&](const fs::path& dir, double& seconds) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string err;
    const int code = cli({"repro", "--out", dir.string(), "--quiet"}, &err);
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (code != 0) throw Error("repro exited " + std::to_string(code) + ": " + err);
  };
  ctx.repro_a = ctx.work / "repro_a";
  ctx.repro_b = ctx.work / "repro_b";
  once(ctx.repro_a, ctx.repro_seconds_a);
  once(ctx.repro_b, ctx.repro_seconds_b);
}

Outcome ablation(Context& ctx) {
  ensure_repro(ctx);
  const std::string csv = slurp(ctx.repro_a / "ablation.csv");
  const std::string txt = slurp(ctx.repro_a / "ablation.txt");
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  std::map<std::string, std::string> cells;
  while (std::getline(lines, line)) {
    const auto first = line.find(',');
    // architecture,backbone,task,n,mean,...
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
    if (first != std::string::npos && f.size() > 4) cells[f[0]] = f[4];
  }
  const bool both = cells.count("Dual head (tool + action)") && cells.count("Joint 16-way head") &&
                    !cells["Dual head (tool + action)"].empty() && !cells["Joint 16-way head"].empty();
  const bool in_text = txt.find("Dual head") != std::string::npos && txt.find("Joint 16-way") != std::string::npos;
  return {both && in_text, both ? "dual mean " + cells["Dual head (tool + action)"] + ", joint16 mean " +
                                      cells["Joint 16-way head"]
                                : "ablation table is missing a row"};
}

Outcome statistics(Context&) {
  const std::vector<double> v{0.86, 0.84, 0.88, 0.85, 0.87};
  const auto a = evaluation::aggregate_seeds(v);
  const std::string rendered = evaluation::format_ci(a.mean, a.half_width);
  const bool pass = std::abs(a.mean - 0.86) <= kStatsTolerance && std::abs(a.half_width - 0.0196) <= kStatsTolerance &&
                    rendered == "86.00 ± 1.96";
  return {pass, "mean " + fmt("%.6f", a.mean) + ", half-width " + fmt("%.6f", a.half_width) + ", rendered \"" +
                    rendered + "\""};
}

Outcome confusion(Context&) {
  std::mt19937_64 rng(77);
  int good = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 300);
    evaluation::Predictions p;
    std::vector<int> tool(n), action(n);
    for (int i = 0; i < n; ++i) {
      tool[i] = static_cast<int>(rng() % 4);
      action[i] = static_cast<int>(rng() % 4);
      p.tool.push_back(rng() % 2 ? tool[i] : static_cast<int>(rng() % 4));
      p.action.push_back(rng() % 3 ? action[i] : static_cast<int>(rng() % 4));
    }
    const auto r = evaluation::evaluate_predictions(p, tool, action, TaskSpec::tools_plus_actions);
    bool ok = true;
    for (const auto& [m, pred, lab, acc] :
         {std::tuple{*r.tool_confusion, p.tool, tool, *r.tool_accuracy},
          std::tuple{*r.action_confusion, p.action, action, *r.action_accuracy}}) {
      std::array<int, 4> support{};
      for (int l : lab) ++support[static_cast<std::size_t>(l)];
      double weighted = 0;
      for (int i = 0; i < 4; ++i) {
        double row = 0;
        for (int j = 0; j < 4; ++j) row += m[i][j];
        if (support[i] > 0) ok = ok && std::abs(row - 1.0) <= kRowSumTolerance;
        weighted += support[i] * m[i][i];
      }
      int hits = 0;
      for (int i = 0; i < n; ++i) hits += pred[i] == lab[i];
      ok = ok && std::abs(weighted / n - acc) <= 1e-12 && std::abs(acc - static_cast<double>(hits) / n) <= 1e-12;
    }
    ok = ok && *r.joint_accuracy <= std::min(*r.tool_accuracy, *r.action_accuracy);
    good += ok;
  }
  return {good == 100, std::to_string(good) + "/100 randomized prediction sets satisfy every property"};
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  if (!fs::exists(root)) return files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = slurp(e.path());
  return files;
}

Outcome determinism(Context& ctx) {
  ensure_repro(ctx);
  const bool results = slurp(ctx.repro_a / "results.csv") == slurp(ctx.repro_b / "results.csv") &&
                       slurp(ctx.repro_a / "results.txt") == slurp(ctx.repro_b / "results.txt");
  const bool abl = slurp(ctx.repro_a / "ablation.csv") == slurp(ctx.repro_b / "ablation.csv");
  // generation and split artefacts, byte for byte
  const bool data = tree(ctx.repro_a / "data") == tree(ctx.repro_b / "data");
  // per-run histories and test reports
  bool runs = true;
  std::size_t n_runs = 0;
  for (const auto& e : fs::directory_iterator(ctx.repro_a / "runs")) {
    ++n_runs;
    const auto other = ctx.repro_b / "runs" / e.path().filename();
    runs = runs && fs::exists(other) &&
           slurp(e.path() / "history.csv") == slurp(other / "history.csv") &&
           slurp(e.path() / "test_report.json") == slurp(other / "test_report.json");
  }
  const bool fast = ctx.repro_seconds_a < kBudgetRepro && ctx.repro_seconds_b < kBudgetRepro;
  std::string detail = std::string("tables ") + (results && abl ? "identical" : "DIFFER") + ", data " +
                       (data ? "identical" : "DIFFER") + ", " + std::to_string(n_runs) + " run histories " +
                       (runs ? "identical" : "DIFFER") + ", repro " + fmt("%.0f s", ctx.repro_seconds_a) + " / " +
                       fmt("%.0f s", ctx.repro_seconds_b) + " (< 2700 s each)";
  return {results && abl && data && runs && n_runs > 0 && fast, detail};
}

struct Criterion {
  int id;
  const char* name;
  double budget;
  std::function<Outcome(Context&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  fs::path work;
  fs::path report_path;
  bool keep = false;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--work" && i + 1 < argc) {
      work = argv[++i];
    } else if (a == "--report" && i + 1 < argc) {
      report_path = argv[++i];
    } else if (a == "--keep") {
      keep = true;
    } else if (a == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      for (std::string x; std::getline(ss, x, ',');) only.insert(std::stoi(x));
    } else {
      std::cerr << "usage: acceptance [--work DIR] [--only N,N,...] [--keep] [--report FILE]\n";
      return 2;
    }
  }
  if (work.empty()) {
    work = fs::temp_directory_path() / ("affordance_acceptance_" + std::to_string(std::random_device{}()));
  } else {
    keep = true;
  }
  fs::remove_all(work);
  fs::create_directories(work);
  torch::set_num_threads(1);

  Context ctx;
  ctx.work = work;
  const std::vector<Criterion> criteria{
      {1, "schema fidelity", kBudgetSchema, schema},
      {2, "oracle separability", kBudgetOracle, oracle},
      {3, "architecture shape suite", kBudgetShapes, shapes},
      {4, "parameter counts", kBudgetParams, params},
      {5, "weight sharing and gradient flow", kBudgetSharing, sharing},
      {6, "gradient correctness", kBudgetGradient, gradient},
      {7, "overfit micro-test", kBudgetOverfit, overfit},
      {8, "desk-scale learning", kBudgetDesk, desk},
      {9, "dual head vs joint16 ablation", 0, ablation},
      {10, "seed statistics", kBudgetStats, statistics},
      {11, "confusion-matrix properties", kBudgetConfusion, confusion},
      {12, "determinism", 0, determinism},
  };

  std::string lines;
  auto emit = [&](const std::string& line) {
    std::fputs(line.c_str(), stdout);
    std::fflush(stdout);
    lines += line;
  };

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    // criterion 1 also pays for generation shared with 2 and 8; 9 and 12 share the repro runs
    if (c.budget > 0 && seconds >= c.budget) {
      o.pass = false;
      o.detail += fmt("; over the %.0f s budget", c.budget);
    }
    failed += !o.pass;
    char head[128];
    std::snprintf(head, sizeof head, "%s  [%2d] %s: ", o.pass ? "PASS" : "FAIL", c.id, c.name);
    emit(head + o.detail + fmt(" (%.1f s)\n", seconds));
  }
  if (only.empty() || only.count(13))
    emit("SKIPPED [13] released-dataset ResNet-50 tools accuracy: needs the recorded robot dataset "
         "(optional, not gating)\n");

  if (!keep) fs::remove_all(work);
  emit(std::to_string(failed) + " criteria failed\n");
  if (!report_path.empty()) std::ofstream(report_path, std::ios::trunc) << lines;
  return failed == 0 ? 0 : 1;
}
