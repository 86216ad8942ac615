#include "affordance/synthgen/oracle.hpp"

#include <cmath>
#include <limits>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "affordance/errors.hpp"

namespace affordance::synthgen {

namespace {

constexpr int kForegroundThreshold = 40;
constexpr int kMinObjectPixels = 50;

cv::Point2d object_centroid(const cv::Mat& img, const GeneratorParams& p) {
  const cv::Mat region = img(cv::Rect(0, 0, p.width, p.tool_strip_top));
  cv::Mat diff;
  cv::absdiff(region, cv::Scalar(p.background.bgr()), diff);
  std::vector<cv::Mat> channels;
  cv::split(diff, channels);
  cv::Mat peak = cv::max(cv::max(channels[0], channels[1]), channels[2]);
  cv::Mat mask = peak > kForegroundThreshold;
  const cv::Moments m = cv::moments(mask, true);
  if (m.m00 < kMinObjectPixels) throw OracleError("object not detectable in the centre image");
  return {m.m10 / m.m00, m.m01 / m.m00};
}

Tool nearest_magnitude(const GeneratorParams& p, double magnitude) {
  Tool best = Tool::boomerang;
  double best_gap = std::numeric_limits<double>::infinity();
  for (const ToolSignature& sig : p.tools) {
    const double gap = std::abs(magnitude - sig.base_magnitude);
    if (gap < best_gap) {
      best_gap = gap;
      best = sig.tool;
    }
  }
  return best;
}

Tool nearest_sprite(const GeneratorParams& p, const cv::Mat& img) {
  const cv::Rect strip(0, p.tool_strip_top, p.width, p.height - p.tool_strip_top);
  Tool best = Tool::boomerang;
  double best_cost = std::numeric_limits<double>::infinity();
  for (Tool t : kAllTools) {
    cv::Mat tmpl(p.height, p.width, CV_8UC3, p.background.bgr());
    draw_tool(tmpl, p, t);
    const double cost = cv::norm(img(strip), tmpl(strip), cv::NORM_L1);
    if (cost < best_cost) {
      best_cost = cost;
      best = t;
    }
  }
  return best;
}

}  // namespace

OracleResult oracle_classify(const cv::Mat& center_initial, const cv::Mat& center_final,
                             const GeneratorParams& params) {
  const cv::Size expected(params.width, params.height);
  if (center_initial.size() != expected || center_final.size() != expected || center_initial.type() != CV_8UC3 ||
      center_final.type() != CV_8UC3)
    throw OracleError("oracle expects two 8-bit colour images at the generator resolution");

  OracleResult r;
  r.displacement = object_centroid(center_final, params) - object_centroid(center_initial, params);
  const double dx = r.displacement.x;
  const double dy = r.displacement.y;
  const bool horizontal = std::abs(dx) > std::abs(dy);
  const double major = horizontal ? std::abs(dx) : std::abs(dy);
  const double minor = horizontal ? std::abs(dy) : std::abs(dx);
  if (major < 1.0 || minor > 0.25 * major)
    throw OracleError("object displacement is not axis-aligned: (" + std::to_string(dx) + ", " +
                      std::to_string(dy) + ")");

  // Match the sign against the generator's direction table rather than
  // hard-coding which way each action points.
  const int sx = horizontal ? (dx > 0 ? 1 : -1) : 0;
  const int sy = horizontal ? 0 : (dy > 0 ? 1 : -1);
  bool found = false;
  for (Action a : kAllActions) {
    if (params.directions[index_of(a)] == std::array<int, 2>{sx, sy}) {
      r.action = a;
      found = true;
    }
  }
  if (!found) throw OracleError("displacement direction matches no action");

  r.tool_by_magnitude = nearest_magnitude(params, major);
  r.tool_by_sprite = nearest_sprite(params, center_initial);
  if (r.tool_by_magnitude != r.tool_by_sprite)
    throw OracleError(std::string("tool cues disagree: magnitude says ") +
                      std::string(to_string(r.tool_by_magnitude)) + ", sprite says " +
                      std::string(to_string(r.tool_by_sprite)));
  r.tool = r.tool_by_sprite;
  return r;
}

OracleResult oracle_classify(const dataset::Sample& sample, const GeneratorParams& params) {
  const auto& a = sample.image({CameraView::center, Phase::initial});
  const auto& b = sample.image({CameraView::center, Phase::final});
  cv::Mat before = cv::imread(a.string(), cv::IMREAD_COLOR);
  cv::Mat after = cv::imread(b.string(), cv::IMREAD_COLOR);
  if (before.empty() || after.empty()) throw OracleError("cannot read centre images of sample");
  return oracle_classify(before, after, params);
}

}  // namespace affordance::synthgen
