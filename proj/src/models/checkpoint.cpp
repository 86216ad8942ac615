#include "affordance/models/checkpoint.hpp"

#include <torch/serialize.h>
#include <torch/torch.h>

#include "affordance/errors.hpp"

namespace affordance::models {

namespace {

constexpr int kFormatVersion = 1;

nlohmann::json label_orderings() {
  nlohmann::json tools = nlohmann::json::array();
  for (Tool t : kAllTools) tools.push_back(to_string(t));
  nlohmann::json actions = nlohmann::json::array();
  for (Action a : kAllActions) actions.push_back(to_string(a));
  return {{"tools", tools}, {"actions", actions}};
}

}  // namespace

nlohmann::json meta_to_json(const CheckpointMeta& meta) {
  return {{"format_version", kFormatVersion},
          {"fusion", meta.fusion},
          {"config_hash", config_hash(meta.fusion)},
          {"task", to_string(meta.task)},
          {"normalization", meta.stats},
          {"labels", label_orderings()},
          {"seed", meta.seed},
          {"epoch", meta.epoch},
          {"kind", meta.kind}};
}

CheckpointMeta meta_from_json(const nlohmann::json& j) {
  if (j.at("format_version").get<int>() != kFormatVersion) throw ConfigError("unsupported checkpoint format");
  if (j.at("labels") != label_orderings()) throw ConfigError("checkpoint label orderings differ from this build");
  CheckpointMeta m;
  m.fusion = j.at("fusion").get<FusionConfig>();
  if (j.at("config_hash").get<std::string>() != config_hash(m.fusion))
    throw ConfigError("checkpoint config hash does not match its stored config");
  m.task = parse_task(j.at("task").get<std::string>());
  m.stats = j.at("normalization").get<dataset::NormStats>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.epoch = j.at("epoch").get<int>();
  m.kind = j.at("kind").get<std::string>();
  return m;
}

void save_checkpoint(const std::filesystem::path& path, FusionModel& model, const CheckpointMeta& meta) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  torch::serialize::OutputArchive archive;
  archive.write("meta", c10::IValue(meta_to_json(meta).dump()));
  for (const auto& p : model->named_parameters(true)) archive.write("param/" + p.key(), p.value().detach());
  for (const auto& b : model->named_buffers(true)) archive.write("buffer/" + b.key(), b.value(), true);
  try {
    archive.save_to(path.string());
  } catch (const c10::Error& e) {
    throw IoError("cannot write checkpoint " + path.string() + ": " + e.what_without_backtrace());
  }
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path, const std::optional<FusionConfig>& expected) {
  if (!std::filesystem::is_regular_file(path)) throw LoadError("checkpoint not found: " + path.string());
  torch::serialize::InputArchive archive;
  c10::IValue meta_value;
  try {
    archive.load_from(path.string());
    archive.read("meta", meta_value);
  } catch (const c10::Error& e) {
    throw LoadError("cannot read checkpoint " + path.string() + ": " + e.what_without_backtrace());
  }

  LoadedCheckpoint out;
  out.meta = meta_from_json(nlohmann::json::parse(meta_value.toStringRef()));
  if (expected && config_hash(*expected) != config_hash(out.meta.fusion))
    throw ConfigError("checkpoint " + path.string() + " was saved for config " + config_hash(out.meta.fusion) +
                      ", requested " + config_hash(*expected));

  out.model = build_fusion_model(out.meta.fusion, out.meta.seed);
  torch::NoGradGuard no_grad;
  try {
    for (auto& p : out.model->named_parameters(true)) {
      torch::Tensor t;
      archive.read("param/" + p.key(), t);
      p.value().copy_(t);
    }
    for (auto& b : out.model->named_buffers(true)) {
      torch::Tensor t;
      archive.read("buffer/" + b.key(), t, true);
      b.value().copy_(t);
    }
  } catch (const c10::Error& e) {
    throw LoadError("checkpoint " + path.string() + " is missing tensors: " + e.what_without_backtrace());
  }
  return out;
}

}  // namespace affordance::models
