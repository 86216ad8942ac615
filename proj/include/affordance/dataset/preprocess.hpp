#pragma once

#include <filesystem>
#include <vector>

#include <opencv2/core.hpp>
#include <torch/types.h>

#include "affordance/dataset/dataset.hpp"

namespace affordance::dataset {

inline constexpr int kImageSize = 128;

/// Decodes an image file without any channel conversion.
/// Throws DecodeError when the file is missing or not a decodable 8-bit image.
cv::Mat read_image(const fs::path& path);

/// Resizes (bilinear) to 128x128 and scales to [0,1]. Input is an 8-bit BGR
/// image as OpenCV decodes it; output is a float tensor 3x128x128 in RGB order.
/// Throws ChannelError for anything but 3 channels.
torch::Tensor scale_image(const cv::Mat& raw);

/// Per-channel standardization of a [0,1]-scaled tensor (..., 3, H, W).
torch::Tensor standardize(const torch::Tensor& scaled, const NormStats& stats);

/// scale_image followed by standardize.
torch::Tensor preprocess_image(const cv::Mat& raw, const NormStats& stats);

/// Channel statistics over the given images of every sample, computed on the
/// [0,1]-scaled 128x128 tensors.
NormStats compute_norm_stats(const Dataset& data, const std::vector<ImageKey>& keys);

/// Channel statistics over a batch of scaled tensors shaped (N, 3, H, W).
NormStats compute_norm_stats(const torch::Tensor& scaled);

}  // namespace affordance::dataset
