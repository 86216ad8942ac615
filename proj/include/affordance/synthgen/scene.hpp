#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>
#include <opencv2/core.hpp>

#include "affordance/labels.hpp"

namespace affordance::synthgen {

enum class Shape : std::uint8_t { circle, square, triangle, diamond, hexagon };

std::string_view to_string(Shape s);

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  cv::Scalar bgr() const { return {static_cast<double>(b), static_cast<double>(g), static_cast<double>(r)}; }
  bool operator==(const Rgb&) const = default;
};
void to_json(nlohmann::json& j, const Rgb& c);
void from_json(const nlohmann::json& j, Rgb& c);

struct ObjectStyle {
  Shape shape = Shape::circle;
  Rgb color;
  int radius = 20;  // half the bounding-box side, px

  bool operator==(const ObjectStyle&) const = default;
};

/// Visual and kinematic identity of a tool: a sprite drawn in the bottom strip
/// of the canvas and the base distance it moves objects.
struct ToolSignature {
  Tool tool = Tool::boomerang;
  Rgb color;
  int base_magnitude = 40;  // px

  bool operator==(const ToolSignature&) const = default;
};

/// Horizontal shift plus isotropic scale about the canvas centre, and additive
/// pixel noise. The centre camera is the identity with the lowest noise.
struct CameraModel {
  CameraView view = CameraView::center;
  double scale = 1.0;
  double shift_x = 0.0;
  double noise_std = 2.0;

  /// Maps canvas (world) coordinates to this camera's image coordinates.
  cv::Matx23d affine(int width, int height) const;
  bool operator==(const CameraModel&) const = default;
};

inline constexpr int kCanvasWidth = 640;
inline constexpr int kCanvasHeight = 480;

/// Everything needed to render, and to read back, a synthetic dataset.
/// Written next to the manifest as generator.json.
struct GeneratorParams {
  int width = kCanvasWidth;
  int height = kCanvasHeight;
  Rgb background{200, 195, 185};
  std::array<ObjectStyle, 20> objects{};
  std::array<ToolSignature, kNumTools> tools{};
  /// Unit displacement per action, image coordinates (y grows downwards).
  std::array<std::array<int, 2>, kNumActions> directions{};
  int jitter_px = 5;
  std::array<CameraModel, kNumViews> cameras{};
  /// Noise is sampled per block of this many pixels (sensor grain).
  int noise_block = 8;
  /// Objects keep this distance from the left, right and top borders.
  int margin = 50;
  /// First row of the tool strip; objects stay above tool_strip_top - 10.
  int tool_strip_top = 400;
  int n_objects = 20;
  int n_reps = 10;
  std::uint64_t seed = 0;

  int object_y_limit() const { return tool_strip_top - 10; }
  bool operator==(const GeneratorParams&) const = default;
};

GeneratorParams default_params(int n_objects, int n_reps, std::uint64_t seed);

void to_json(nlohmann::json& j, const GeneratorParams& p);
void from_json(const nlohmann::json& j, GeneratorParams& p);

inline constexpr const char* kParamsFile = "generator.json";
inline constexpr const char* kManifestFile = "manifest.jsonl";

GeneratorParams load_params(const std::filesystem::path& path);
void save_params(const std::filesystem::path& path, const GeneratorParams& p);

/// Noise-free canvas with the object centred at `center` and the tool sprite.
cv::Mat render_canvas(const GeneratorParams& p, int object_id, Tool tool, cv::Point center);
/// Background plus tool sprite, without the object.
cv::Mat render_background(const GeneratorParams& p, Tool tool);
/// Draws an object onto a canvas in place.
void draw_object(cv::Mat& canvas, const GeneratorParams& p, int object_id, cv::Point center);

/// Draws only the tool sprite (used by the renderer and as an oracle template).
void draw_tool(cv::Mat& canvas, const GeneratorParams& p, Tool tool);

/// Camera projection of a clean canvas plus seeded block noise.
cv::Mat render_view(const GeneratorParams& p, const cv::Mat& canvas, CameraView view, std::uint64_t noise_seed);

/// True when an object of the given style centred at `c` lies fully inside the
/// object region (and therefore inside the canvas in every camera).
bool object_fits(const GeneratorParams& p, const ObjectStyle& style, cv::Point c);

}  // namespace affordance::synthgen
