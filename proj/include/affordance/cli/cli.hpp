#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace affordance::cli {

inline constexpr const char* kDataRootEnv = "AFFORDANCE_DATA_ROOT";
inline constexpr const char* kRunManifestFile = "run_manifest.json";

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Record of one invocation, written into the output directory before any work.
struct RunManifest {
  std::string subcommand;
  nlohmann::json config;
  nlohmann::json inputs = nlohmann::json::object();
  nlohmann::json outputs = nlohmann::json::object();
  std::vector<std::uint64_t> seeds;
  std::string timestamp;
  std::string config_hash;
};

nlohmann::json to_json(const RunManifest& m);
void write_run_manifest(const std::filesystem::path& dir, const RunManifest& m);

/// Entry point behind the `affordance` executable. args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace affordance::cli
