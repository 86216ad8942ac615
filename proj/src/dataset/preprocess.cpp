#include "affordance/dataset/preprocess.hpp"

#include <cmath>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>
#include <torch/torch.h>

#include "affordance/errors.hpp"

namespace affordance::dataset {

cv::Mat read_image(const fs::path& path) {
  cv::Mat img = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (img.empty()) throw DecodeError("cannot decode image " + path.string());
  if (img.depth() != CV_8U) throw DecodeError("expected an 8-bit image: " + path.string());
  return img;
}

torch::Tensor scale_image(const cv::Mat& raw) {
  if (raw.empty()) throw DecodeError("empty image");
  if (raw.depth() != CV_8U) throw DecodeError("expected an 8-bit image");
  if (raw.channels() != 3)
    throw ChannelError("expected 3 colour channels, got " + std::to_string(raw.channels()));

  cv::Mat resized;
  cv::resize(raw, resized, cv::Size(kImageSize, kImageSize), 0, 0, cv::INTER_LINEAR);
  cv::Mat rgb;
  cv::cvtColor(resized, rgb, cv::COLOR_BGR2RGB);
  cv::Mat scaled;
  rgb.convertTo(scaled, CV_32FC3, 1.0 / 255.0);

  auto hwc = torch::from_blob(scaled.data, {kImageSize, kImageSize, 3}, torch::kFloat32);
  return hwc.permute({2, 0, 1}).contiguous();
}

torch::Tensor standardize(const torch::Tensor& scaled, const NormStats& stats) {
  auto opts = torch::TensorOptions().dtype(scaled.dtype());
  auto mean = torch::tensor({stats.mean[0], stats.mean[1], stats.mean[2]}, opts).view({3, 1, 1});
  auto std = torch::tensor({stats.std[0], stats.std[1], stats.std[2]}, opts).view({3, 1, 1});
  return (scaled - mean) / std;
}

torch::Tensor preprocess_image(const cv::Mat& raw, const NormStats& stats) {
  return standardize(scale_image(raw), stats);
}

namespace {

struct ChannelMoments {
  std::array<double, 3> sum{};
  std::array<double, 3> sum_sq{};
  double count = 0;

  void add(const torch::Tensor& chw) {
    auto d = chw.to(torch::kFloat64).reshape({3, -1});
    auto s = d.sum(1);
    auto sq = (d * d).sum(1);
    for (int c = 0; c < 3; ++c) {
      sum[c] += s[c].item<double>();
      sum_sq[c] += sq[c].item<double>();
    }
    count += static_cast<double>(d.size(1));
  }

  NormStats finish() const {
    NormStats st;
    if (count == 0) return st;
    for (int c = 0; c < 3; ++c) {
      st.mean[c] = sum[c] / count;
      const double var = std::max(0.0, sum_sq[c] / count - st.mean[c] * st.mean[c]);
      // Flat channels would otherwise divide by zero.
      st.std[c] = var > 1e-12 ? std::sqrt(var) : 1.0;
    }
    return st;
  }
};

}  // namespace

NormStats compute_norm_stats(const Dataset& data, const std::vector<ImageKey>& keys) {
  ChannelMoments m;
  for (const Sample& s : data.samples())
    for (ImageKey k : keys) m.add(scale_image(read_image(s.image(k))));
  return m.finish();
}

NormStats compute_norm_stats(const torch::Tensor& scaled) {
  ChannelMoments m;
  m.add(scaled.transpose(0, 1).reshape({3, -1}));
  return m.finish();
}

}  // namespace affordance::dataset
