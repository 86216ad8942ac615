#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>

#include "affordance/config.hpp"
#include "affordance/dataset/dataset.hpp"
#include "affordance/synthgen/generator.hpp"

namespace testsupport {

namespace fs = std::filesystem;

/// Fresh directory under the system temp dir, removed at scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("affordance_" + tag + "_" + std::to_string(rd()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& s) const { return path_ / s; }

 private:
  fs::path path_;
};

/// One-object, ten-repetition synthetic dataset (160 samples), generated once
/// per process and shared by the tests that only read it.
inline const fs::path& small_dataset() {
  static TempDir dir("small");
  static const fs::path manifest = affordance::synthgen::generate_synthetic_dataset(dir.path(), 1, 10, 3);
  return manifest;
}

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline affordance::BackboneSpec tiny_spec(int width = 8, int embedding = 16) {
  affordance::BackboneSpec bb = affordance::default_backbone(affordance::BackboneFamily::tiny);
  bb.tiny_width = width;
  bb.embedding_dim = embedding;
  return bb;
}

}  // namespace testsupport
