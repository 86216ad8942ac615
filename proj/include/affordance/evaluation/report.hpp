#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "affordance/evaluation/metrics.hpp"
#include "affordance/evaluation/stats.hpp"

namespace affordance::evaluation {

/// Per-seed primary accuracies of one (architecture, backbone) configuration.
struct ResultCell {
  std::vector<double> values;
  std::string config_hash;
};

/// Architecture x backbone grid of results, laid out like the accuracy tables
/// of multi-architecture benchmarks: rows are architectures, columns backbones.
struct ResultsTable {
  std::string title;
  std::string task;
  std::vector<std::string> rows;
  std::vector<std::string> columns;
  std::map<std::pair<std::string, std::string>, ResultCell> cells;

  void add(const std::string& row, const std::string& column, ResultCell cell);
};

/// "86.06 ± 2.05" for two or more seeds, "86.06 (n=1)" for one, "-" for none.
std::string render_cell(const ResultCell& cell);

std::string render_text(const ResultsTable& table);
std::string render_csv(const ResultsTable& table);

/// Writes <stem>.txt and <stem>.csv into out_dir.
void emit_report(const ResultsTable& table, const std::filesystem::path& out_dir,
                 const std::string& stem = "results");

/// Writes <stem>_<head>.csv and <stem>_<head>.png for every confusion matrix
/// in the report.
void emit_confusion(const EvalReport& report, const std::filesystem::path& out_dir,
                    const std::string& stem = "confusion");

void write_confusion_csv(const std::filesystem::path& path, const Matrix& m, const std::vector<std::string>& labels,
                         const std::string& config_hash);
/// Heat-map raster with per-cell values.
void write_confusion_png(const std::filesystem::path& path, const Matrix& m, const std::vector<std::string>& labels,
                         const std::string& title);

/// Display names: "Shared-central (1C-1N)", "ResNet50", ...
std::string arch_title(FusionVariant v);
std::string backbone_title(BackboneFamily f);

}  // namespace affordance::evaluation
