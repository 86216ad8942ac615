#include "affordance/synthgen/scene.hpp"

#include <cmath>
#include <fstream>
#include <vector>

#include <opencv2/imgproc.hpp>

#include "affordance/errors.hpp"

namespace affordance::synthgen {

std::string_view to_string(Shape s) {
  switch (s) {
    case Shape::circle: return "circle";
    case Shape::square: return "square";
    case Shape::triangle: return "triangle";
    case Shape::diamond: return "diamond";
    case Shape::hexagon: return "hexagon";
  }
  return "?";
}

namespace {

Shape parse_shape(const std::string& s) {
  for (Shape sh : {Shape::circle, Shape::square, Shape::triangle, Shape::diamond, Shape::hexagon})
    if (to_string(sh) == s) return sh;
  throw ConfigError("unknown shape '" + s + "'");
}

std::vector<cv::Point> shape_polygon(Shape shape, cv::Point c, int r) {
  switch (shape) {
    case Shape::square:
      return {{c.x - r, c.y - r}, {c.x + r, c.y - r}, {c.x + r, c.y + r}, {c.x - r, c.y + r}};
    case Shape::triangle:
      return {{c.x, c.y - r}, {c.x + r, c.y + r}, {c.x - r, c.y + r}};
    case Shape::diamond:
      return {{c.x, c.y - r}, {c.x + r, c.y}, {c.x, c.y + r}, {c.x - r, c.y}};
    case Shape::hexagon: {
      const int h = r / 2;
      return {{c.x - h, c.y - r}, {c.x + h, c.y - r}, {c.x + r, c.y}, {c.x + h, c.y + r}, {c.x - h, c.y + r},
              {c.x - r, c.y}};
    }
    case Shape::circle: break;
  }
  return {};
}

}  // namespace

cv::Matx23d CameraModel::affine(int width, int height) const {
  const double cx = width / 2.0;
  const double cy = height / 2.0;
  return {scale, 0.0, cx - scale * cx + shift_x, 0.0, scale, cy - scale * cy};
}

GeneratorParams default_params(int n_objects, int n_reps, std::uint64_t seed) {
  GeneratorParams p;
  p.n_objects = n_objects;
  p.n_reps = n_reps;
  p.seed = seed;

  constexpr std::array<Rgb, 4> palette{Rgb{205, 45, 45}, Rgb{45, 80, 200}, Rgb{50, 150, 70}, Rgb{140, 60, 170}};
  constexpr std::array<Shape, 5> shapes{Shape::circle, Shape::square, Shape::triangle, Shape::diamond,
                                        Shape::hexagon};
  for (int i = 0; i < static_cast<int>(p.objects.size()); ++i)
    p.objects[i] = ObjectStyle{shapes[i % 5], palette[i / 5], 18 + 5 * (i % 3)};

  p.tools = {ToolSignature{Tool::boomerang, Rgb{235, 140, 35}, 40},
             ToolSignature{Tool::ruler, Rgb{235, 215, 50}, 60},
             ToolSignature{Tool::slingshot, Rgb{120, 70, 30}, 80},
             ToolSignature{Tool::spatula, Rgb{80, 95, 130}, 100}};

  p.directions[index_of(Action::push)] = {0, -1};
  p.directions[index_of(Action::pull)] = {0, 1};
  p.directions[index_of(Action::left_to_right)] = {1, 0};
  p.directions[index_of(Action::right_to_left)] = {-1, 0};

  constexpr double center_noise = 2.0;
  p.cameras[static_cast<int>(CameraView::left)] = CameraModel{CameraView::left, 0.96, 24.0, 3 * center_noise};
  p.cameras[static_cast<int>(CameraView::center)] = CameraModel{CameraView::center, 1.0, 0.0, center_noise};
  p.cameras[static_cast<int>(CameraView::right)] = CameraModel{CameraView::right, 1.04, -24.0, 3 * center_noise};
  return p;
}

void to_json(nlohmann::json& j, const Rgb& c) { j = {c.r, c.g, c.b}; }

void from_json(const nlohmann::json& j, Rgb& c) {
  const auto v = j.get<std::array<int, 3>>();
  for (int x : v)
    if (x < 0 || x > 255) throw ConfigError("colour component outside [0, 255]");
  c = Rgb{static_cast<std::uint8_t>(v[0]), static_cast<std::uint8_t>(v[1]), static_cast<std::uint8_t>(v[2])};
}

void to_json(nlohmann::json& j, const GeneratorParams& p) {
  nlohmann::json objects = nlohmann::json::array();
  for (const auto& o : p.objects)
    objects.push_back({{"shape", to_string(o.shape)}, {"color", o.color}, {"radius", o.radius}});
  nlohmann::json tools = nlohmann::json::array();
  for (const auto& t : p.tools)
    tools.push_back({{"tool", affordance::to_string(t.tool)}, {"color", t.color}, {"base_magnitude", t.base_magnitude}});
  nlohmann::json dirs = nlohmann::json::object();
  for (Action a : kAllActions) dirs[std::string(affordance::to_string(a))] = p.directions[index_of(a)];
  nlohmann::json cams = nlohmann::json::array();
  for (const auto& c : p.cameras)
    cams.push_back({{"view", affordance::to_string(c.view)},
                    {"scale", c.scale},
                    {"shift_x", c.shift_x},
                    {"noise_std", c.noise_std}});
  j = {{"width", p.width},
       {"height", p.height},
       {"background", p.background},
       {"objects", objects},
       {"tools", tools},
       {"directions", dirs},
       {"jitter_px", p.jitter_px},
       {"cameras", cams},
       {"noise_block", p.noise_block},
       {"margin", p.margin},
       {"tool_strip_top", p.tool_strip_top},
       {"n_objects", p.n_objects},
       {"n_reps", p.n_reps},
       {"seed", p.seed}};
}

void from_json(const nlohmann::json& j, GeneratorParams& p) {
  p.width = j.at("width").get<int>();
  p.height = j.at("height").get<int>();
  p.background = j.at("background").get<Rgb>();
  const auto& objects = j.at("objects");
  if (objects.size() != p.objects.size()) throw ConfigError("generator params need 20 object styles");
  for (std::size_t i = 0; i < p.objects.size(); ++i)
    p.objects[i] = ObjectStyle{parse_shape(objects[i].at("shape").get<std::string>()),
                               objects[i].at("color").get<Rgb>(), objects[i].at("radius").get<int>()};
  const auto& tools = j.at("tools");
  if (tools.size() != p.tools.size()) throw ConfigError("generator params need 4 tool signatures");
  for (std::size_t i = 0; i < p.tools.size(); ++i) {
    auto tool = parse_tool(tools[i].at("tool").get<std::string>());
    if (!tool) throw ConfigError("unknown tool in generator params");
    p.tools[i] = ToolSignature{*tool, tools[i].at("color").get<Rgb>(), tools[i].at("base_magnitude").get<int>()};
  }
  for (Action a : kAllActions)
    p.directions[index_of(a)] = j.at("directions").at(std::string(affordance::to_string(a))).get<std::array<int, 2>>();
  p.jitter_px = j.at("jitter_px").get<int>();
  const auto& cams = j.at("cameras");
  if (cams.size() != p.cameras.size()) throw ConfigError("generator params need 3 cameras");
  for (std::size_t i = 0; i < p.cameras.size(); ++i) {
    const auto name = cams[i].at("view").get<std::string>();
    CameraView view = name == "left" ? CameraView::left : name == "right" ? CameraView::right : CameraView::center;
    p.cameras[i] = CameraModel{view, cams[i].at("scale").get<double>(), cams[i].at("shift_x").get<double>(),
                               cams[i].at("noise_std").get<double>()};
  }
  p.noise_block = j.at("noise_block").get<int>();
  p.margin = j.at("margin").get<int>();
  p.tool_strip_top = j.at("tool_strip_top").get<int>();
  p.n_objects = j.at("n_objects").get<int>();
  p.n_reps = j.at("n_reps").get<int>();
  p.seed = j.at("seed").get<std::uint64_t>();
}

GeneratorParams load_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open generator params " + path.string());
  try {
    return nlohmann::json::parse(in).get<GeneratorParams>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed generator params " + path.string() + ": " + e.what());
  }
}

void save_params(const std::filesystem::path& path, const GeneratorParams& p) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << nlohmann::json(p).dump(2) << '\n';
}

void draw_tool(cv::Mat& canvas, const GeneratorParams& p, Tool tool) {
  const cv::Scalar color = p.tools[index_of(tool)].color.bgr();
  const int cx = p.width / 2;
  const int top = p.tool_strip_top;
  switch (tool) {
    case Tool::boomerang: {
      std::vector<cv::Point> chevron{{cx - 60, top + 55}, {cx, top + 15}, {cx + 60, top + 55}};
      cv::polylines(canvas, chevron, false, color, 14, cv::LINE_8);
      break;
    }
    case Tool::ruler:
      cv::rectangle(canvas, cv::Point(cx - 110, top + 28), cv::Point(cx + 110, top + 46), color, cv::FILLED);
      for (int x = cx - 100; x <= cx + 100; x += 20)
        cv::line(canvas, cv::Point(x, top + 28), cv::Point(x, top + 36), cv::Scalar(40, 40, 40), 2);
      break;
    case Tool::slingshot:
      cv::line(canvas, cv::Point(cx, top + 62), cv::Point(cx, top + 35), color, 10);
      cv::line(canvas, cv::Point(cx, top + 35), cv::Point(cx - 22, top + 10), color, 8);
      cv::line(canvas, cv::Point(cx, top + 35), cv::Point(cx + 22, top + 10), color, 8);
      break;
    case Tool::spatula:
      cv::line(canvas, cv::Point(cx - 70, top + 40), cv::Point(cx + 10, top + 40), color, 8);
      cv::rectangle(canvas, cv::Point(cx + 10, top + 20), cv::Point(cx + 65, top + 60), color, cv::FILLED);
      break;
  }
}

cv::Mat render_background(const GeneratorParams& p, Tool tool) {
  cv::Mat canvas(p.height, p.width, CV_8UC3, p.background.bgr());
  draw_tool(canvas, p, tool);
  return canvas;
}

void draw_object(cv::Mat& canvas, const GeneratorParams& p, int object_id, cv::Point center) {
  const ObjectStyle& style = p.objects.at(static_cast<std::size_t>(object_id));
  if (style.shape == Shape::circle) {
    cv::circle(canvas, center, style.radius, style.color.bgr(), cv::FILLED, cv::LINE_8);
  } else {
    cv::fillConvexPoly(canvas, shape_polygon(style.shape, center, style.radius), style.color.bgr(), cv::LINE_8);
  }
}

cv::Mat render_canvas(const GeneratorParams& p, int object_id, Tool tool, cv::Point center) {
  cv::Mat canvas = render_background(p, tool);
  draw_object(canvas, p, object_id, center);
  return canvas;
}

cv::Mat render_view(const GeneratorParams& p, const cv::Mat& canvas, CameraView view, std::uint64_t noise_seed) {
  const CameraModel& cam = p.cameras[static_cast<int>(view)];
  cv::Mat projected;
  if (cam.scale == 1.0 && cam.shift_x == 0.0) {
    projected = canvas.clone();
  } else {
    cv::warpAffine(canvas, projected, cv::Mat(cam.affine(p.width, p.height)), canvas.size(), cv::INTER_LINEAR,
                   cv::BORDER_CONSTANT, p.background.bgr());
  }
  if (cam.noise_std > 0) {
    const int bw = (p.width + p.noise_block - 1) / p.noise_block;
    const int bh = (p.height + p.noise_block - 1) / p.noise_block;
    cv::Mat grain(bh, bw, CV_32FC3);
    cv::RNG rng(noise_seed);
    rng.fill(grain, cv::RNG::NORMAL, cv::Scalar::all(0.0), cv::Scalar::all(cam.noise_std));
    cv::Mat grain16;
    grain.convertTo(grain16, CV_16SC3);  // rounds to whole intensity steps
    cv::Mat noise;
    cv::resize(grain16, noise, cv::Size(bw * p.noise_block, bh * p.noise_block), 0, 0, cv::INTER_NEAREST);
    cv::Mat noisy;
    cv::add(projected, noise(cv::Rect(0, 0, p.width, p.height)), noisy, cv::noArray(), CV_8U);  // saturates
    projected = noisy;
  }
  return projected;
}

bool object_fits(const GeneratorParams& p, const ObjectStyle& style, cv::Point c) {
  const int r = style.radius;
  return c.x - r >= p.margin && c.x + r <= p.width - p.margin && c.y - r >= p.margin &&
         c.y + r <= p.object_y_limit();
}

}  // namespace affordance::synthgen
