#include "affordance/synthgen/generator.hpp"

#include <cstdio>
#include <random>

#include "affordance/dataset/dataset.hpp"
#include "affordance/errors.hpp"
#include "affordance/parallel.hpp"
#include "affordance/synthgen/png_writer.hpp"

namespace affordance::synthgen {

namespace fs = std::filesystem;

namespace {

int draw_between(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

std::string image_name(const SceneInstance& s, ImageKey key) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "o%02d_%s_%s_r%02d_%s.png", s.object_id,
                std::string(affordance::to_string(s.tool)).c_str(),
                std::string(affordance::to_string(s.action)).c_str(), s.repetition,
                affordance::to_string(key).c_str());
  return buf;
}

}  // namespace

std::uint64_t image_noise_seed(std::uint64_t seed, std::size_t trial, ImageKey key) {
  // splitmix64 over the packed triple
  std::uint64_t z = seed * 0x9e3779b97f4a7c15ULL + trial * 8 + static_cast<std::uint64_t>(key.index()) + 1;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<SceneInstance> plan_scenes(const GeneratorParams& p) {
  std::mt19937_64 rng(p.seed);
  std::vector<SceneInstance> scenes;
  scenes.reserve(static_cast<std::size_t>(p.n_objects) * kNumTools * kNumActions * p.n_reps);
  for (int obj = 0; obj < p.n_objects; ++obj) {
    const ObjectStyle& style = p.objects.at(static_cast<std::size_t>(obj));
    const int r = style.radius;
    for (Tool tool : kAllTools) {
      for (Action action : kAllActions) {
        const auto dir = p.directions[index_of(action)];
        const int magnitude = p.tools[index_of(tool)].base_magnitude;
        for (int rep = 0; rep < p.n_reps; ++rep) {
          SceneInstance s{obj, tool, action, rep, {}, {}, 0};
          bool placed = false;
          for (int attempt = 0; attempt < kMaxPlacementAttempts && !placed; ++attempt) {
            s.initial = {draw_between(rng, p.margin + r, p.width - p.margin - r),
                         draw_between(rng, p.margin + r, p.object_y_limit() - r)};
            s.jitter = draw_between(rng, -p.jitter_px, p.jitter_px);
            const int step = magnitude + s.jitter;
            s.final = {s.initial.x + dir[0] * step, s.initial.y + dir[1] * step};
            placed = object_fits(p, style, s.initial) && object_fits(p, style, s.final);
          }
          if (!placed)
            throw GenerationError("could not place object " + std::to_string(obj) + " inside the canvas after " +
                                  std::to_string(kMaxPlacementAttempts) + " attempts");
          scenes.push_back(s);
        }
      }
    }
  }
  return scenes;
}

fs::path generate_synthetic_dataset(const fs::path& out_dir, int n_objects, int n_reps, std::uint64_t seed,
                                    const GenerateOptions& options) {
  if (n_objects < 1 || n_objects > dataset::kMaxObjects)
    throw ConfigError("n_objects must be in [1, " + std::to_string(dataset::kMaxObjects) + "], got " +
                      std::to_string(n_objects));
  if (n_reps < 1 || n_reps > dataset::kMaxRepetitions)
    throw ConfigError("n_reps must be in [1, " + std::to_string(dataset::kMaxRepetitions) + "], got " +
                      std::to_string(n_reps));

  const GeneratorParams params = default_params(n_objects, n_reps, seed);
  const std::vector<SceneInstance> scenes = plan_scenes(params);

  const fs::path image_dir = out_dir / "images";
  std::error_code ec;
  fs::create_directories(image_dir, ec);
  if (ec || !fs::is_directory(image_dir)) throw IoError("cannot create output directory " + image_dir.string());

  std::vector<dataset::Sample> samples(scenes.size());
  std::vector<cv::Mat> backgrounds;
  for (Tool tool : kAllTools) backgrounds.push_back(render_background(params, tool));

  auto render_one = [&](std::size_t i) {
    const SceneInstance& s = scenes[i];
    dataset::Sample& out = samples[i];
    out.object_id = s.object_id;
    out.repetition = s.repetition;
    out.tool = s.tool;
    out.action = s.action;
    cv::Mat before = backgrounds[index_of(s.tool)].clone();
    draw_object(before, params, s.object_id, s.initial);
    cv::Mat after = backgrounds[index_of(s.tool)].clone();
    draw_object(after, params, s.object_id, s.final);
    for (ImageKey key : kAllImageKeys) {
      const cv::Mat& canvas = key.phase == Phase::initial ? before : after;
      const cv::Mat img = render_view(params, canvas, key.view, image_noise_seed(seed, i, key));
      const fs::path path = fs::absolute(image_dir / image_name(s, key));
      write_png(path, img, options.png_compression);
      out.images[key.index()] = path;
    }
  };

  parallel_for(scenes.size(), options.jobs, render_one);

  save_params(out_dir / kParamsFile, params);
  const fs::path manifest = out_dir / kManifestFile;
  dataset::write_manifest(manifest, samples);
  return manifest;
}

}  // namespace affordance::synthgen
