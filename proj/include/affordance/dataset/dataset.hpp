#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "affordance/labels.hpp"

namespace affordance::dataset {

namespace fs = std::filesystem;

inline constexpr int kMaxObjects = 20;
inline constexpr int kMaxRepetitions = 10;
/// 20 objects x 4 tools x 4 actions x 10 repetitions.
inline constexpr std::size_t kCompleteSize =
    static_cast<std::size_t>(kMaxObjects) * kNumTools * kNumActions * kMaxRepetitions;

/// Identity of a trial; unique within a dataset.
struct SampleKey {
  int object_id = 0;
  Tool tool = Tool::boomerang;
  Action action = Action::push;
  int repetition = 0;

  auto operator<=>(const SampleKey&) const = default;
};

std::string to_string(const SampleKey& key);

/// One trial: before/after images from all three cameras.
struct Sample {
  int object_id = 0;
  int repetition = 0;
  Tool tool = Tool::boomerang;
  Action action = Action::push;
  /// Absolute image paths indexed by ImageKey::index().
  std::array<fs::path, kNumViews * kNumPhases> images;

  SampleKey key() const { return {object_id, tool, action, repetition}; }
  const fs::path& image(ImageKey k) const { return images[k.index()]; }
};

struct DatasetCounts {
  std::map<int, std::size_t> per_object;
  std::array<std::size_t, kNumTools> per_tool{};
  std::array<std::size_t, kNumActions> per_action{};
};

class Dataset {
 public:
  Dataset() = default;
  /// Validates key uniqueness and ranges; throws IntegrityError.
  explicit Dataset(std::vector<Sample> samples);

  const std::vector<Sample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }
  const DatasetCounts& counts() const { return counts_; }
  /// True for the full 20 x 4 x 4 x 10 schema.
  bool complete() const { return complete_; }

 private:
  std::vector<Sample> samples_;
  DatasetCounts counts_;
  bool complete_ = false;
};

/// Reads a line-delimited JSON manifest. Image paths are resolved relative to
/// the manifest's directory and must all exist.
///
/// Throws LoadError (unreadable file), ParseError (bad record, with line number)
/// or IntegrityError (duplicate key, out-of-range ids, missing images; the
/// message lists every missing image).
Dataset load_manifest(const fs::path& path);

/// Writes samples as a manifest; image paths are stored relative to the
/// manifest's directory. Output is byte-stable for equal input.
void write_manifest(const fs::path& path, const std::vector<Sample>& samples);

nlohmann::json sample_to_json(const Sample& s, const fs::path& base_dir);

// ---- splitting -------------------------------------------------------------

enum class Partition : std::uint8_t { train = 0, val = 1, test = 2 };

struct SplitSpec {
  int train = 6;
  int val = 2;
  int test = 2;
  std::uint64_t seed = 0;

  int group_size() const { return train + val + test; }
};

struct SplitResult {
  Dataset train;
  Dataset val;
  Dataset test;
  /// Partition of every input sample, in input order.
  std::vector<Partition> assignment;
};

/// Stratified split: within every (object, tool, action) group the repetitions
/// are permuted with a seeded RNG and dealt out train/val/test in that order.
/// Throws SplitError naming the first group whose size differs from the ratio sum.
SplitResult split_dataset(const Dataset& data, const SplitSpec& spec);

/// Per-channel (RGB) statistics of [0,1]-scaled images.
struct NormStats {
  std::array<double, 3> mean{0.0, 0.0, 0.0};
  std::array<double, 3> std{1.0, 1.0, 1.0};

  bool operator==(const NormStats&) const = default;
};

void to_json(nlohmann::json& j, const NormStats& s);
void from_json(const nlohmann::json& j, NormStats& s);

inline constexpr const char* kTrainManifest = "train.jsonl";
inline constexpr const char* kValManifest = "val.jsonl";
inline constexpr const char* kTestManifest = "test.jsonl";
inline constexpr const char* kSplitSidecar = "split.json";

/// A split as found on disk: three manifests plus the sidecar.
struct SplitBundle {
  Dataset train;
  Dataset val;
  Dataset test;
  SplitSpec spec;
  NormStats stats;
};

void write_split(const fs::path& dir, const SplitResult& split, const SplitSpec& spec, const NormStats& stats,
                 const fs::path& source_manifest);
SplitBundle load_split(const fs::path& dir);

}  // namespace affordance::dataset
