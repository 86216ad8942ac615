#include "affordance/evaluation/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "affordance/errors.hpp"

namespace affordance::evaluation {

namespace fs = std::filesystem;

std::string arch_title(FusionVariant v) {
  switch (v) {
    case FusionVariant::stacked_3C1N: return "Stacked-channels (3C-1N)";
    case FusionVariant::separate_3C6N: return "Separate (3C-6N)";
    case FusionVariant::shared_3C3N: return "Shared (3C-3N)";
    case FusionVariant::separate_central_1C2N: return "Separate-central (1C-2N)";
    case FusionVariant::shared_central_1C1N: return "Shared-central (1C-1N)";
  }
  return "?";
}

std::string backbone_title(BackboneFamily f) {
  switch (f) {
    case BackboneFamily::resnet18: return "ResNet18";
    case BackboneFamily::resnet50: return "ResNet50";
    case BackboneFamily::resnet101: return "ResNet101";
    case BackboneFamily::tiny: return "Tiny";
  }
  return "?";
}

void ResultsTable::add(const std::string& row, const std::string& column, ResultCell cell) {
  if (std::find(rows.begin(), rows.end(), row) == rows.end()) rows.push_back(row);
  if (std::find(columns.begin(), columns.end(), column) == columns.end()) columns.push_back(column);
  cells[{row, column}] = std::move(cell);
}

std::string render_cell(const ResultCell& cell) {
  if (cell.values.empty()) return "-";
  if (cell.values.size() == 1) return format_percent(cell.values.front()) + " (n=1)";
  const auto agg = aggregate_seeds(cell.values);
  return format_ci(agg.mean, agg.half_width);
}

namespace {

// Display width in code points; "±" is two bytes in UTF-8.
std::size_t display_width(const std::string& s) {
  std::size_t w = 0;
  for (unsigned char c : s) w += (c & 0xC0) != 0x80;
  return w;
}

std::string pad(const std::string& s, std::size_t width) {
  return s + std::string(width > display_width(s) ? width - display_width(s) : 0, ' ');
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

std::string render_text(const ResultsTable& t) {
  std::vector<std::vector<std::string>> grid;
  grid.push_back({"Architectures"});
  for (const auto& c : t.columns) grid.back().push_back(c);
  bool any_single = false;
  for (const auto& r : t.rows) {
    grid.push_back({r});
    for (const auto& c : t.columns) {
      auto it = t.cells.find({r, c});
      const ResultCell empty;
      const ResultCell& cell = it == t.cells.end() ? empty : it->second;
      any_single |= cell.values.size() == 1;
      grid.back().push_back(render_cell(cell));
    }
  }
  std::vector<std::size_t> widths(grid.front().size(), 0);
  for (const auto& row : grid)
    for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], display_width(row[i]));

  std::ostringstream os;
  if (!t.title.empty()) os << t.title << '\n';
  if (!t.task.empty()) os << "task: " << t.task << '\n';
  for (const auto& row : grid) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "  " : "") << pad(row[i], widths[i]);
    os << '\n';
  }
  if (any_single) os << "n=1: single seed, no confidence interval\n";
  os << "config hashes:";
  for (const auto& r : t.rows)
    for (const auto& c : t.columns)
      if (auto it = t.cells.find({r, c}); it != t.cells.end()) os << "\n  " << r << " / " << c << ": " << it->second.config_hash;
  os << '\n';
  return os.str();
}

std::string render_csv(const ResultsTable& t) {
  std::ostringstream os;
  os << "architecture,backbone,task,n,mean,half_width,cell,values,config_hash\n";
  for (const auto& r : t.rows) {
    for (const auto& c : t.columns) {
      auto it = t.cells.find({r, c});
      if (it == t.cells.end()) continue;
      const ResultCell& cell = it->second;
      char mean[32] = "", hw[32] = "";
      if (!cell.values.empty()) {
        double sum = 0;
        for (double v : cell.values) sum += v;
        std::snprintf(mean, sizeof mean, "%.6f", sum / static_cast<double>(cell.values.size()));
      }
      if (cell.values.size() >= 2) std::snprintf(hw, sizeof hw, "%.6f", aggregate_seeds(cell.values).half_width);
      std::string values;
      for (double v : cell.values) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", v);
        values += (values.empty() ? "" : ";") + std::string(buf);
      }
      os << csv_escape(r) << ',' << csv_escape(c) << ',' << csv_escape(t.task) << ',' << cell.values.size() << ','
         << mean << ',' << hw << ',' << csv_escape(render_cell(cell)) << ',' << values << ',' << cell.config_hash
         << '\n';
    }
  }
  return os.str();
}

void emit_report(const ResultsTable& table, const fs::path& out_dir, const std::string& stem) {
  fs::create_directories(out_dir);
  std::ofstream txt(out_dir / (stem + ".txt"), std::ios::trunc);
  std::ofstream csv(out_dir / (stem + ".csv"), std::ios::trunc);
  if (!txt || !csv) throw IoError("cannot write report into " + out_dir.string());
  txt << render_text(table);
  csv << render_csv(table);
}

void write_confusion_csv(const fs::path& path, const Matrix& m, const std::vector<std::string>& labels,
                         const std::string& config_hash) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# config_hash=" << config_hash << "\ntrue\\pred";
  for (const auto& l : labels) out << ',' << l;
  out << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << labels.at(i);
    for (double v : m[i]) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6f", v);
      out << ',' << buf;
    }
    out << '\n';
  }
}

void write_confusion_png(const fs::path& path, const Matrix& m, const std::vector<std::string>& labels,
                         const std::string& title) {
  const int n = static_cast<int>(m.size());
  const int cell = n > 8 ? 36 : 64;
  const int left = 120, top = 40, bottom = 100;
  cv::Mat img(top + n * cell + bottom, left + n * cell + 20, CV_8UC3, cv::Scalar(255, 255, 255));
  cv::putText(img, title, {8, 26}, cv::FONT_HERSHEY_SIMPLEX, 0.5, cv::Scalar(0, 0, 0), 1, cv::LINE_AA);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = std::clamp(m[i][j], 0.0, 1.0);
      const auto shade = static_cast<double>(255 - static_cast<int>(v * 200));
      const cv::Rect r(left + j * cell, top + i * cell, cell, cell);
      cv::rectangle(img, r, cv::Scalar(255, shade, shade), cv::FILLED);
      cv::rectangle(img, r, cv::Scalar(180, 180, 180), 1);
      char buf[16];
      std::snprintf(buf, sizeof buf, "%.2f", m[i][j]);
      cv::putText(img, buf, {r.x + 4, r.y + cell / 2 + 4}, cv::FONT_HERSHEY_SIMPLEX, n > 8 ? 0.3 : 0.45,
                  cv::Scalar(0, 0, 0), 1, cv::LINE_AA);
    }
    cv::putText(img, labels.at(i), {4, top + i * cell + cell / 2 + 4}, cv::FONT_HERSHEY_SIMPLEX, 0.35,
                cv::Scalar(0, 0, 0), 1, cv::LINE_AA);
  }
  // Column labels, written vertically by rotating a strip.
  for (int j = 0; j < n; ++j) {
    cv::Mat strip(cell, bottom - 10, CV_8UC3, cv::Scalar(255, 255, 255));
    cv::putText(strip, labels.at(j), {2, cell / 2 + 4}, cv::FONT_HERSHEY_SIMPLEX, 0.35, cv::Scalar(0, 0, 0), 1,
                cv::LINE_AA);
    cv::Mat rotated;
    cv::rotate(strip, rotated, cv::ROTATE_90_CLOCKWISE);
    rotated.copyTo(img(cv::Rect(left + j * cell, top + n * cell + 5, rotated.cols, rotated.rows)));
  }
  if (!cv::imwrite(path.string(), img)) throw IoError("cannot write " + path.string());
}

void emit_confusion(const EvalReport& report, const fs::path& out_dir, const std::string& stem) {
  fs::create_directories(out_dir);
  std::vector<std::string> tools, actions, joint;
  for (Tool t : kAllTools) tools.emplace_back(to_string(t));
  for (Action a : kAllActions) actions.emplace_back(to_string(a));
  for (Tool t : kAllTools)
    for (Action a : kAllActions) joint.push_back(std::string(to_string(t)) + "/" + std::string(to_string(a)));

  auto emit = [&](const std::optional<Matrix>& m, const std::string& head, const std::vector<std::string>& labels) {
    if (!m) return;
    const std::string base = stem + "_" + head;
    write_confusion_csv(out_dir / (base + ".csv"), *m, labels, report.config_hash);
    write_confusion_png(out_dir / (base + ".png"), *m, labels,
                        report.arch + " " + report.backbone + " " + head + " [" + report.config_hash + "]");
  };
  emit(report.tool_confusion, "tool", tools);
  emit(report.action_confusion, "action", actions);
  emit(report.joint_confusion, "joint", joint);
}

}  // namespace affordance::evaluation
