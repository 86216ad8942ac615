#include "../testing.hpp"

#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "affordance/cli/cli.hpp"
#include "../support.hpp"

namespace fs = std::filesystem;
using affordance::cli::run_cli;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "affordance");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

// Small, quick model flags shared by the training commands.
std::vector<std::string> with_small_model(std::vector<std::string> args) {
  for (const char* a : {"--backbone", "tiny", "--tiny-width", "8", "--embedding-dim", "16"}) args.emplace_back(a);
  return args;
}

std::string data_dir() { return testsupport::small_dataset().parent_path().string(); }

std::map<std::string, std::string> tree_contents(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file() || e.path().filename() == affordance::cli::kRunManifestFile) continue;
    files[fs::relative(e.path(), root).string()] = testsupport::read_file(e.path());
  }
  return files;
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(testsupport::read_file(p)); }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit 2, runtime failures exit 1") {
    CHECK(run({}).code == 2);
    CHECK(run({"bogus"}).code == 2);
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"train", "--task", "everything", "--data", data_dir()}).code == 2);
    CHECK(run({"synth", "--objects", "0", "--out", "/tmp/never"}).code == 2);
    CHECK(run({"train", "--task", "joint16", "--arch", "1c1n", "--backbone", "resnet50", "--tiny-width", "8",
               "--data", data_dir()})
              .code == 2);

    testsupport::TempDir dir("cli_missing");
    const auto r = run({"train", "--data", (dir / "absent").string(), "--out", (dir / "run").string()});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("error: ", 0) == 0);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
    REQUIRE(fs::exists(dir / "run" / affordance::cli::kRunManifestFile));
    const auto m = read_json(dir / "run" / affordance::cli::kRunManifestFile);
    CHECK(m.at("subcommand") == "train");
    CHECK(m.at("seeds") == nlohmann::json::array({0}));
    CHECK(m.contains("timestamp"));
    CHECK(m.contains("config_hash"));
  }

  TEST_CASE("synth is byte-identical across runs") {
    testsupport::TempDir dir("cli_synth");
    const std::vector<std::string> base{"synth", "--objects", "1", "--reps", "10", "--seed", "9"};
    auto a = base, b = base;
    a.insert(a.end(), {"--out", (dir / "a").string()});
    b.insert(b.end(), {"--out", (dir / "b").string(), "--jobs", "2"});
    REQUIRE(run(a).code == 0);
    REQUIRE(run(b).code == 0);
    const auto ta = tree_contents(dir / "a");
    CHECK(ta.size() == 1 + 1 + 160 * 6);  // manifest, params, images
    CHECK(ta == tree_contents(dir / "b"));
  }

  TEST_CASE("synth reads its output directory from the environment") {
    testsupport::TempDir dir("cli_env");
    ::setenv(affordance::cli::kDataRootEnv, (dir / "env").string().c_str(), 1);
    const auto r = run({"synth", "--objects", "1", "--reps", "10"});
    ::unsetenv(affordance::cli::kDataRootEnv);
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "env" / "manifest.jsonl"));
  }

  TEST_CASE("split, train, eval and report chain together") {
    testsupport::TempDir dir("cli_chain");
    REQUIRE(run({"split", "--data", data_dir(), "--out", (dir / "split").string(), "--seed", "1"}).code == 0);
    for (const char* f : {"split.json", "train.jsonl", "val.jsonl", "test.jsonl"}) CHECK(fs::exists(dir / "split" / f));

    std::vector<fs::path> runs;
    for (int seed : {0, 1}) {
      const auto run_dir = dir / ("run" + std::to_string(seed));
      const auto r = run(with_small_model({"train", "--data", (dir / "split").string(), "--out", run_dir.string(),
                                           "--epochs", "2", "--seed", std::to_string(seed), "--quiet"}));
      REQUIRE_MESSAGE(r.code == 0, r.err);
      for (const char* f : {"config.json", "history.csv", "best.pt", "final.pt", "test_report.json",
                            "test_confusion_tool.csv", "test_confusion_action.png"})
        CHECK_MESSAGE(fs::exists(run_dir / f), f);
      const auto history = testsupport::read_file(run_dir / "history.csv");
      CHECK(std::count(history.begin(), history.end(), '\n') == 3);
      runs.push_back(run_dir);
    }

    const auto e = run({"eval", "--checkpoint", (runs[0] / "best").string(), "--data", (dir / "split").string(),
                        "--out", (dir / "eval").string()});
    REQUIRE_MESSAGE(e.code == 0, e.err);
    const auto eval = read_json(dir / "eval" / "eval_report.json");
    const auto trained = read_json(runs[0] / "test_report.json");
    CHECK(eval.at("joint_accuracy") == trained.at("joint_accuracy"));
    CHECK(eval.at("config_hash") == trained.at("config_hash"));

    const auto rep = run({"report", runs[0].string(), runs[1].string(), "--out", (dir / "report").string()});
    REQUIRE_MESSAGE(rep.code == 0, rep.err);
    const auto text = testsupport::read_file(dir / "report" / "results.txt");
    CHECK(text.find("Shared-central (1C-1N)") != std::string::npos);
    CHECK(text.find("±") != std::string::npos);
    CHECK(testsupport::read_file(dir / "report" / "results.csv").find(trained.at("config_hash").get<std::string>()) !=
          std::string::npos);
  }

  TEST_CASE("reduced grid writes one row per trial") {
    testsupport::TempDir dir("cli_grid");
    const auto r = run(with_small_model(
        {"grid", "--reduced", "--data", data_dir(), "--out", (dir / "grid").string(), "--epochs", "1"}));
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto csv = testsupport::read_file(dir / "grid" / "trials.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    CHECK(fs::exists(dir / "grid" / "best_config.json"));
  }

  TEST_CASE("flags override the config file, which overrides defaults") {
    testsupport::TempDir dir("cli_config");
    {
      std::ofstream cfg(dir / "c.json");
      cfg << R"({"epochs": 1, "batch_size": 8, "tiny_width": 8, "embedding_dim": 16, "backbone": "tiny",
                 "task": "joint16", "quiet": true})";
    }
    const auto run_dir = dir / "run";
    const auto r = run({"train", "--config", (dir / "c.json").string(), "--data", data_dir(), "--out",
                        run_dir.string(), "--batch-size", "4"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto m = read_json(run_dir / affordance::cli::kRunManifestFile);
    CHECK(m.at("config").at("train").at("epochs") == 1);
    CHECK(m.at("config").at("train").at("batch_size") == 4);
    CHECK(m.at("config").at("task") == "joint16");

    {
      std::ofstream bad(dir / "bad.json");
      bad << "[1, 2";
    }
    CHECK(run({"train", "--config", (dir / "bad.json").string(), "--data", data_dir()}).code == 2);
  }
}
