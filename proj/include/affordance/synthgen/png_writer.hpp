#pragma once

#include <filesystem>

#include <opencv2/core.hpp>

namespace affordance::synthgen {

/// Writes an 8-bit BGR image as an RGB PNG using the "Up" row filter only.
/// Generated frames repeat every noise block row, so this filter compresses
/// them about as well as an adaptive filter search at half the cost.
/// Throws IoError on failure.
void write_png(const std::filesystem::path& path, const cv::Mat& bgr, int compression_level = 1);

}  // namespace affordance::synthgen
