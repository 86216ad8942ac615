#pragma once

#include <opencv2/core.hpp>

#include "affordance/dataset/dataset.hpp"
#include "affordance/synthgen/scene.hpp"

namespace affordance::synthgen {

struct OracleResult {
  Tool tool = Tool::boomerang;
  Action action = Action::push;
  /// Object centroid displacement in the centre camera, px.
  cv::Point2d displacement;
  /// Tool implied by the displacement magnitude and by the sprite template.
  Tool tool_by_magnitude = Tool::boomerang;
  Tool tool_by_sprite = Tool::boomerang;
};

/// Rule-based reading of a generated trial from the centre camera pair.
///
/// The action is the axis and sign of the object-centroid displacement; the
/// tool is the nearest base magnitude, cross-checked against the closest tool
/// sprite template. Throws OracleError when the object cannot be found, the
/// displacement is degenerate, or the two tool cues disagree.
OracleResult oracle_classify(const cv::Mat& center_initial, const cv::Mat& center_final,
                             const GeneratorParams& params);

/// Same, reading the centre images of a manifest sample from disk.
OracleResult oracle_classify(const dataset::Sample& sample, const GeneratorParams& params);

}  // namespace affordance::synthgen
