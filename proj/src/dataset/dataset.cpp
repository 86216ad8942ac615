#include "affordance/dataset/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "affordance/errors.hpp"

namespace affordance::dataset {

std::string to_string(const SampleKey& k) {
  std::ostringstream os;
  os << "(object=" << k.object_id << ", tool=" << affordance::to_string(k.tool)
     << ", action=" << affordance::to_string(k.action) << ", repetition=" << k.repetition << ")";
  return os.str();
}

Dataset::Dataset(std::vector<Sample> samples) : samples_(std::move(samples)) {
  std::set<SampleKey> seen;
  for (const Sample& s : samples_) {
    if (s.object_id < 0 || s.object_id >= kMaxObjects)
      throw IntegrityError("object_id out of range [0," + std::to_string(kMaxObjects - 1) +
                           "]: " + std::to_string(s.object_id));
    if (s.repetition < 0 || s.repetition >= kMaxRepetitions)
      throw IntegrityError("repetition out of range [0," + std::to_string(kMaxRepetitions - 1) +
                           "]: " + std::to_string(s.repetition));
    if (!seen.insert(s.key()).second) throw IntegrityError("duplicate sample key " + to_string(s.key()));
    ++counts_.per_object[s.object_id];
    ++counts_.per_tool[index_of(s.tool)];
    ++counts_.per_action[index_of(s.action)];
  }
  complete_ = samples_.size() == kCompleteSize;
}

namespace {

Sample parse_record(const nlohmann::json& j, const fs::path& base_dir) {
  Sample s;
  s.object_id = j.at("object_id").get<int>();
  s.repetition = j.at("repetition").get<int>();
  const auto tool_name = j.at("tool").get<std::string>();
  const auto action_name = j.at("action").get<std::string>();
  auto tool = parse_tool(tool_name);
  if (!tool) throw std::invalid_argument("unknown tool '" + tool_name + "'");
  auto action = parse_action(action_name);
  if (!action) throw std::invalid_argument("unknown action '" + action_name + "'");
  s.tool = *tool;
  s.action = *action;

  const auto& images = j.at("images");
  if (!images.is_object()) throw std::invalid_argument("'images' must be an object");
  for (ImageKey k : kAllImageKeys) {
    const auto name = affordance::to_string(k);
    if (!images.contains(name)) throw std::invalid_argument("missing image entry '" + name + "'");
    fs::path p = images.at(name).get<std::string>();
    s.images[k.index()] = p.is_absolute() ? p : (base_dir / p).lexically_normal();
  }
  if (images.size() != kAllImageKeys.size()) throw std::invalid_argument("unexpected entries in 'images'");
  return s;
}

}  // namespace

Dataset load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!fs::is_regular_file(path) || !in) throw LoadError("cannot open manifest " + path.string());
  const fs::path base_dir = fs::absolute(path).parent_path();

  std::vector<Sample> samples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      samples.push_back(parse_record(nlohmann::json::parse(line), base_dir));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string(), line_no, e.what());
    } catch (const std::invalid_argument& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
  }

  Dataset data(std::move(samples));

  std::vector<std::string> missing;
  for (const Sample& s : data.samples())
    for (const fs::path& p : s.images)
      if (!fs::is_regular_file(p)) missing.push_back(p.string());
  if (!missing.empty()) {
    std::string msg = std::to_string(missing.size()) + " missing image(s):";
    for (const auto& m : missing) msg += "\n  " + m;
    throw IntegrityError(msg);
  }
  return data;
}

nlohmann::json sample_to_json(const Sample& s, const fs::path& base_dir) {
  nlohmann::json images = nlohmann::json::object();
  for (ImageKey k : kAllImageKeys)
    images[affordance::to_string(k)] =
        s.image(k).lexically_normal().lexically_relative(base_dir.lexically_normal()).generic_string();
  return {{"object_id", s.object_id},
          {"repetition", s.repetition},
          {"tool", affordance::to_string(s.tool)},
          {"action", affordance::to_string(s.action)},
          {"images", images}};
}

void write_manifest(const fs::path& path, const std::vector<Sample>& samples) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write manifest " + path.string());
  const fs::path base_dir = fs::absolute(path).lexically_normal().parent_path();
  for (const Sample& s : samples) out << sample_to_json(s, base_dir).dump() << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

SplitResult split_dataset(const Dataset& data, const SplitSpec& spec) {
  if (spec.train < 0 || spec.val < 0 || spec.test < 0 || spec.group_size() == 0)
    throw SplitError("invalid split ratios");

  using GroupKey = std::tuple<int, Tool, Action>;
  std::map<GroupKey, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Sample& s = data[i];
    groups[{s.object_id, s.tool, s.action}].push_back(i);
  }

  std::vector<Partition> assignment(data.size(), Partition::train);
  std::mt19937_64 rng(spec.seed);
  for (auto& [key, members] : groups) {
    if (static_cast<int>(members.size()) != spec.group_size()) {
      const auto& [obj, tool, action] = key;
      throw SplitError("group (object=" + std::to_string(obj) + ", tool=" +
                       std::string(affordance::to_string(tool)) + ", action=" +
                       std::string(affordance::to_string(action)) + ") has " + std::to_string(members.size()) +
                       " repetitions, expected " + std::to_string(spec.group_size()));
    }
    std::sort(members.begin(), members.end(),
              [&](std::size_t a, std::size_t b) { return data[a].repetition < data[b].repetition; });
    // Fisher-Yates with an explicit draw so the permutation does not depend on
    // the standard library's distribution implementation.
    for (std::size_t i = members.size(); i > 1; --i) std::swap(members[i - 1], members[rng() % i]);
    for (std::size_t i = 0; i < members.size(); ++i) {
      const int rank = static_cast<int>(i);
      assignment[members[i]] = rank < spec.train              ? Partition::train
                               : rank < spec.train + spec.val ? Partition::val
                                                              : Partition::test;
    }
  }

  std::array<std::vector<Sample>, 3> parts;
  for (std::size_t i = 0; i < data.size(); ++i) parts[static_cast<int>(assignment[i])].push_back(data[i]);
  return {Dataset(std::move(parts[0])), Dataset(std::move(parts[1])), Dataset(std::move(parts[2])),
          std::move(assignment)};
}

void to_json(nlohmann::json& j, const NormStats& s) { j = {{"mean", s.mean}, {"std", s.std}}; }

void from_json(const nlohmann::json& j, NormStats& s) {
  s.mean = j.at("mean").get<std::array<double, 3>>();
  s.std = j.at("std").get<std::array<double, 3>>();
}

void write_split(const fs::path& dir, const SplitResult& split, const SplitSpec& spec, const NormStats& stats,
                 const fs::path& source_manifest) {
  fs::create_directories(dir);
  write_manifest(dir / kTrainManifest, split.train.samples());
  write_manifest(dir / kValManifest, split.val.samples());
  write_manifest(dir / kTestManifest, split.test.samples());

  nlohmann::json side = {
      {"seed", spec.seed},
      {"ratios", {spec.train, spec.val, spec.test}},
      {"sizes", {split.train.size(), split.val.size(), split.test.size()}},
      {"normalization", stats},
      {"source_manifest", fs::absolute(source_manifest).lexically_relative(fs::absolute(dir)).generic_string()},
  };
  std::ofstream out(dir / kSplitSidecar, std::ios::trunc);
  if (!out) throw IoError("cannot write " + (dir / kSplitSidecar).string());
  out << side.dump(2) << '\n';
}

SplitBundle load_split(const fs::path& dir) {
  const fs::path side_path = dir / kSplitSidecar;
  std::ifstream in(side_path);
  if (!in) throw LoadError("cannot open split sidecar " + side_path.string());
  nlohmann::json side;
  try {
    side = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(side_path.string(), 1, e.what());
  }

  SplitBundle b;
  b.train = load_manifest(dir / kTrainManifest);
  b.val = load_manifest(dir / kValManifest);
  b.test = load_manifest(dir / kTestManifest);
  const auto ratios = side.at("ratios").get<std::array<int, 3>>();
  b.spec = SplitSpec{ratios[0], ratios[1], ratios[2], side.at("seed").get<std::uint64_t>()};
  b.stats = side.at("normalization").get<NormStats>();
  return b;
}

}  // namespace affordance::dataset
