#include "../testing.hpp"

#include <cmath>
#include <random>

#include "affordance/errors.hpp"
#include "affordance/evaluation/metrics.hpp"
#include "affordance/evaluation/report.hpp"
#include "affordance/evaluation/stats.hpp"
#include "../support.hpp"

using namespace affordance;
using namespace affordance::evaluation;

namespace {

// Student-t upper quantile by Simpson integration of the density and bisection.
double t_density(double x, int dof) {
  const double v = dof;
  return std::exp(std::lgamma((v + 1) / 2) - std::lgamma(v / 2)) / std::sqrt(v * M_PI) *
         std::pow(1 + x * x / v, -(v + 1) / 2);
}

double t_mass_from_zero(double x, int dof) {
  const int n = 20000;
  const double h = x / n;
  double s = t_density(0, dof) + t_density(x, dof);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * t_density(i * h, dof);
  return s * h / 3;
}

double t_quantile_975(int dof) {
  double lo = 0, hi = 100;
  for (int i = 0; i < 80; ++i) {
    const double mid = (lo + hi) / 2;
    (t_mass_from_zero(mid, dof) < 0.475 ? lo : hi) = mid;
  }
  return (lo + hi) / 2;
}

}  // namespace

TEST_SUITE("stats") {
  TEST_CASE("t critical values match numerical integration") {
    CHECK(t_critical_95(4) == doctest::Approx(2.7764).epsilon(1e-4));
    for (int dof : {1, 2, 4, 9, 30})
      CHECK(t_critical_95(dof) == doctest::Approx(t_quantile_975(dof)).epsilon(1e-6));
    CHECK_THROWS_AS(t_critical_95(0), AggregationError);
  }

  TEST_CASE("five-seed aggregate and rendering") {
    const std::vector<double> v{0.86, 0.84, 0.88, 0.85, 0.87};
    const auto a = aggregate_seeds(v);
    CHECK(a.n == 5);
    CHECK(a.mean == doctest::Approx(0.86).epsilon(1e-12));
    // s = sqrt(0.001 / 4), half width = t * s / sqrt(5)
    const double expected = t_quantile_975(4) * std::sqrt(0.001 / 4) / std::sqrt(5.0);
    CHECK(a.half_width == doctest::Approx(expected).epsilon(1e-6));
    CHECK(std::abs(a.half_width - 0.0196) < 1e-4);
    CHECK(format_ci(a.mean, a.half_width) == "86.00 ± 1.96");
  }

  TEST_CASE("aggregation needs two finite values") {
    const std::vector<double> one{0.9};
    CHECK_THROWS_AS(aggregate_seeds(one), AggregationError);
    CHECK_THROWS_AS(aggregate_seeds(std::vector<double>{}), AggregationError);
    const std::vector<double> bad{0.9, std::nan("")};
    CHECK_THROWS_AS(aggregate_seeds(bad), AggregationError);
    const std::vector<double> same{0.5, 0.5, 0.5};
    CHECK(aggregate_seeds(same).half_width == 0.0);
  }

  TEST_CASE("percent formatting") {
    CHECK(format_percent(0.9078) == "90.78");
    CHECK(format_percent(1.0) == "100.00");
  }
}

TEST_SUITE("metrics") {
  TEST_CASE("confusion matrix counts and errors") {
    const std::vector<int> pred{0, 1, 1, 2};
    const std::vector<int> lab{0, 1, 2, 2};
    const auto m = confusion_matrix(pred, lab, 4, false);
    CHECK(m[0][0] == 1);
    CHECK(m[2][1] == 1);
    CHECK(m[2][2] == 1);
    const auto n = confusion_matrix(pred, lab, 4, true);
    CHECK(n[2][1] == 0.5);
    CHECK(n[3][0] == 0.0);
    const std::vector<int> short_lab{0};
    CHECK_THROWS_AS(confusion_matrix(pred, short_lab, 4, false), EvaluationError);
    const std::vector<int> bad{0, 1, 4, 2};
    CHECK_THROWS_AS(confusion_matrix(bad, lab, 4, false), EvaluationError);
  }

  TEST_CASE("randomized confusion and accuracy properties") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 1 + static_cast<int>(rng() % 200);
      Predictions p;
      std::vector<int> tool(n), action(n);
      for (int i = 0; i < n; ++i) {
        tool[i] = static_cast<int>(rng() % 4);
        action[i] = static_cast<int>(rng() % 4);
        // bias towards correct predictions so accuracies vary
        p.tool.push_back(rng() % 3 ? tool[i] : static_cast<int>(rng() % 4));
        p.action.push_back(rng() % 2 ? action[i] : static_cast<int>(rng() % 4));
      }
      const auto r = evaluate_predictions(p, tool, action, TaskSpec::tools_plus_actions);
      REQUIRE(r.tool_confusion);
      const auto counts = confusion_matrix(p.tool, tool, 4, false);
      double weighted = 0;
      for (int i = 0; i < 4; ++i) {
        double support = 0, row = 0;
        for (int j = 0; j < 4; ++j) {
          support += counts[i][j];
          row += (*r.tool_confusion)[i][j];
        }
        if (support > 0) CHECK(std::abs(row - 1.0) <= 1e-9);
        else CHECK(row == 0.0);
        weighted += support * (*r.tool_confusion)[i][i];
      }
      CHECK(std::abs(weighted / n - *r.tool_accuracy) <= 1e-12);
      CHECK(*r.joint_accuracy <= std::min(*r.tool_accuracy, *r.action_accuracy) + 1e-15);
      int both = 0;
      for (int i = 0; i < n; ++i) both += p.tool[i] == tool[i] && p.action[i] == action[i];
      CHECK(*r.joint_accuracy == doctest::Approx(static_cast<double>(both) / n));
      CHECK(r.primary() == *r.joint_accuracy);
    }
  }

  TEST_CASE("joint16 predictions decode into both heads") {
    Predictions p;
    p.joint = {0, 5, 15, 6};
    const std::vector<int> tool{0, 1, 3, 2};
    const std::vector<int> action{0, 1, 3, 3};
    const auto r = evaluate_predictions(p, tool, action, TaskSpec::joint16);
    CHECK(*r.joint_accuracy == 0.75);
    CHECK(*r.tool_accuracy == 0.75);
    CHECK(*r.action_accuracy == 0.75);
    REQUIRE(r.joint_confusion);
    CHECK(r.joint_confusion->size() == 16);
  }

  TEST_CASE("single-head tasks and errors") {
    Predictions p;
    p.tool = {0, 1};
    const std::vector<int> tool{0, 0}, action{1, 1};
    const auto r = evaluate_predictions(p, tool, action, TaskSpec::tools_no_action);
    CHECK(*r.tool_accuracy == 0.5);
    CHECK_FALSE(r.action_accuracy);
    CHECK(r.primary() == 0.5);
    CHECK_THROWS_AS(evaluate_predictions(p, tool, action, TaskSpec::tools_plus_actions), EvaluationError);
    CHECK_THROWS_AS(evaluate_predictions(Predictions{}, std::vector<int>{}, std::vector<int>{}, TaskSpec::tools_no_action),
                    EvaluationError);
  }
}

TEST_SUITE("report") {
  TEST_CASE("cells, flags and hashes") {
    ResultsTable t;
    t.title = "demo";
    t.task = "tools+actions";
    t.add("Shared-central (1C-1N)", "Tiny", {{0.86, 0.84, 0.88, 0.85, 0.87}, "abc123"});
    t.add("Shared (3C-3N)", "Tiny", {{0.9}, "def456"});
    CHECK(render_cell(t.cells.at({"Shared-central (1C-1N)", "Tiny"})) == "86.00 ± 1.96");
    CHECK(render_cell({{0.9}, ""}) == "90.00 (n=1)");
    CHECK(render_cell({}) == "-");

    const auto text = render_text(t);
    CHECK(text.find("86.00 ± 1.96") != std::string::npos);
    CHECK(text.find("n=1") != std::string::npos);
    const auto csv = render_csv(t);
    CHECK(csv.find("abc123") != std::string::npos);
    CHECK(csv.find("def456") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);

    testsupport::TempDir dir("report");
    emit_report(t, dir.path());
    CHECK(testsupport::read_file(dir / "results.txt") == text);
    CHECK(testsupport::read_file(dir / "results.csv") == csv);
  }

  TEST_CASE("confusion artefacts are written per head") {
    Predictions p;
    p.tool = {0, 1, 2, 3};
    p.action = {0, 0, 0, 0};
    const std::vector<int> lab{0, 1, 2, 3};
    auto r = evaluate_predictions(p, lab, lab, TaskSpec::tools_plus_actions);
    r.config_hash = "feed";
    testsupport::TempDir dir("confusion");
    emit_confusion(r, dir.path());
    CHECK(std::filesystem::exists(dir / "confusion_tool.csv"));
    CHECK(std::filesystem::exists(dir / "confusion_action.png"));
    CHECK(testsupport::read_file(dir / "confusion_tool.csv").find("feed") != std::string::npos);
  }

  TEST_CASE("display names") {
    CHECK(arch_title(FusionVariant::shared_central_1C1N) == "Shared-central (1C-1N)");
    CHECK(backbone_title(BackboneFamily::resnet50) == "ResNet50");
  }
}
