#include "affordance/config.hpp"

#include <cstdio>

#include "affordance/errors.hpp"

namespace affordance {

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view s, const std::array<Enum, N>& values, std::string_view what,
                std::string_view (*alt_name)(Enum) = nullptr) {
  for (Enum e : values) {
    if (to_string(e) == s) return e;
    if (alt_name && alt_name(e) == s) return e;
  }
  throw ConfigError("unknown " + std::string(what) + ": '" + std::string(s) + "'");
}

constexpr std::array<HeadLayout, 4> kAllHeads{HeadLayout::dual, HeadLayout::joint16, HeadLayout::tool_only,
                                              HeadLayout::action_only};
constexpr std::array<BackboneFamily, 4> kAllFamilies{BackboneFamily::resnet18, BackboneFamily::resnet50,
                                                     BackboneFamily::resnet101, BackboneFamily::tiny};

}  // namespace

BackboneSpec default_backbone(BackboneFamily family) {
  BackboneSpec s;
  s.family = family;
  switch (family) {
    case BackboneFamily::resnet18:
      s.first_block_kernel = 7;
      s.embedding_dim = 512;
      break;
    case BackboneFamily::resnet50:
    case BackboneFamily::resnet101:
      s.first_block_kernel = 7;
      s.embedding_dim = 2048;
      break;
    case BackboneFamily::tiny:
      s.first_block_kernel = 3;
      s.embedding_dim = 64;
      break;
  }
  s.first_block_stride = 2;
  return s;
}

std::string_view to_string(TaskSpec t) {
  switch (t) {
    case TaskSpec::tools_with_action: return "tools_with_action";
    case TaskSpec::tools_no_action: return "tools_no_action";
    case TaskSpec::tools_plus_actions: return "tools_plus_actions";
    case TaskSpec::actions_only: return "actions_only";
    case TaskSpec::joint16: return "joint16";
  }
  return "?";
}

std::string_view cli_name(TaskSpec t) {
  switch (t) {
    case TaskSpec::tools_with_action: return "tools";
    case TaskSpec::tools_no_action: return "tools-no-action";
    case TaskSpec::tools_plus_actions: return "tools+actions";
    case TaskSpec::actions_only: return "actions";
    case TaskSpec::joint16: return "joint16";
  }
  return "?";
}

std::string_view to_string(HeadLayout h) {
  switch (h) {
    case HeadLayout::dual: return "dual";
    case HeadLayout::joint16: return "joint16";
    case HeadLayout::tool_only: return "tool_only";
    case HeadLayout::action_only: return "action_only";
  }
  return "?";
}

std::string_view to_string(FusionVariant v) {
  switch (v) {
    case FusionVariant::stacked_3C1N: return "stacked_3C1N";
    case FusionVariant::separate_3C6N: return "separate_3C6N";
    case FusionVariant::shared_3C3N: return "shared_3C3N";
    case FusionVariant::separate_central_1C2N: return "separate_central_1C2N";
    case FusionVariant::shared_central_1C1N: return "shared_central_1C1N";
  }
  return "?";
}

std::string_view arch_label(FusionVariant v) {
  switch (v) {
    case FusionVariant::stacked_3C1N: return "3C-1N";
    case FusionVariant::separate_3C6N: return "3C-6N";
    case FusionVariant::shared_3C3N: return "3C-3N";
    case FusionVariant::separate_central_1C2N: return "1C-2N";
    case FusionVariant::shared_central_1C1N: return "1C-1N";
  }
  return "?";
}

std::string_view cli_name(FusionVariant v) {
  switch (v) {
    case FusionVariant::stacked_3C1N: return "3c1n";
    case FusionVariant::separate_3C6N: return "3c6n";
    case FusionVariant::shared_3C3N: return "3c3n";
    case FusionVariant::separate_central_1C2N: return "1c2n";
    case FusionVariant::shared_central_1C1N: return "1c1n";
  }
  return "?";
}

std::string_view to_string(BackboneFamily f) {
  switch (f) {
    case BackboneFamily::resnet18: return "resnet18";
    case BackboneFamily::resnet50: return "resnet50";
    case BackboneFamily::resnet101: return "resnet101";
    case BackboneFamily::tiny: return "tiny";
  }
  return "?";
}

TaskSpec parse_task(std::string_view s) {
  std::string_view (*alt)(TaskSpec) = cli_name;
  return parse_enum(s, kAllTasks, "task", alt);
}

HeadLayout parse_head(std::string_view s) { return parse_enum(s, kAllHeads, "head layout"); }

FusionVariant parse_variant(std::string_view s) {
  std::string_view (*alt)(FusionVariant) = cli_name;
  for (FusionVariant v : kAllVariants)
    if (arch_label(v) == s) return v;
  return parse_enum(s, kAllVariants, "architecture", alt);
}

BackboneFamily parse_family(std::string_view s) { return parse_enum(s, kAllFamilies, "backbone"); }

std::vector<CameraView> variant_views(FusionVariant v) {
  switch (v) {
    case FusionVariant::stacked_3C1N:
    case FusionVariant::separate_3C6N:
    case FusionVariant::shared_3C3N:
      return {CameraView::left, CameraView::center, CameraView::right};
    case FusionVariant::separate_central_1C2N:
    case FusionVariant::shared_central_1C1N:
      return {CameraView::center};
  }
  return {};
}

std::vector<ImageKey> variant_image_keys(FusionVariant v) {
  std::vector<ImageKey> keys;
  for (CameraView view : variant_views(v))
    for (Phase phase : kAllPhases) keys.push_back({view, phase});
  return keys;
}

int variant_encoder_count(FusionVariant v) {
  switch (v) {
    case FusionVariant::stacked_3C1N: return 1;
    case FusionVariant::separate_3C6N: return 6;
    case FusionVariant::shared_3C3N: return 3;
    case FusionVariant::separate_central_1C2N: return 2;
    case FusionVariant::shared_central_1C1N: return 1;
  }
  return 0;
}

int variant_embedding_count(FusionVariant v) {
  return v == FusionVariant::stacked_3C1N ? 1 : static_cast<int>(variant_image_keys(v).size());
}

bool variant_shares_weights(FusionVariant v) {
  return v == FusionVariant::shared_3C3N || v == FusionVariant::shared_central_1C1N;
}

int variant_input_channels(FusionVariant v) {
  return v == FusionVariant::stacked_3C1N ? kNumPhases * kNumViews * 3 : 3;
}

HeadLayout head_for(TaskSpec t) {
  switch (t) {
    case TaskSpec::tools_with_action:
    case TaskSpec::tools_no_action: return HeadLayout::tool_only;
    case TaskSpec::tools_plus_actions: return HeadLayout::dual;
    case TaskSpec::actions_only: return HeadLayout::action_only;
    case TaskSpec::joint16: return HeadLayout::joint16;
  }
  return HeadLayout::dual;
}

bool task_uses_action_input(TaskSpec t) { return t == TaskSpec::tools_with_action; }
bool task_predicts_tool(TaskSpec t) { return t != TaskSpec::actions_only; }
bool task_predicts_action(TaskSpec t) {
  return t == TaskSpec::tools_plus_actions || t == TaskSpec::actions_only || t == TaskSpec::joint16;
}

FusionConfig make_fusion_config(TaskSpec task, FusionVariant variant, BackboneSpec backbone) {
  FusionConfig c;
  c.variant = variant;
  backbone.input_channels = variant_input_channels(variant);
  c.backbone = backbone;
  c.use_action_input = task_uses_action_input(task);
  c.head = head_for(task);
  validate(c);
  return c;
}

void validate(const BackboneSpec& s) {
  if (s.first_block_kernel != 3 && s.first_block_kernel != 5 && s.first_block_kernel != 7)
    throw ConfigError("first block kernel must be 3, 5 or 7, got " + std::to_string(s.first_block_kernel));
  if (s.first_block_stride != 1 && s.first_block_stride != 2)
    throw ConfigError("first block stride must be 1 or 2, got " + std::to_string(s.first_block_stride));
  if (s.input_channels != 3 && s.input_channels != 18)
    throw ConfigError("input channels must be 3 or 18, got " + std::to_string(s.input_channels));
  if (s.embedding_dim <= 0) throw ConfigError("embedding width must be positive");
  if (s.family == BackboneFamily::tiny && (s.tiny_width < 4 || s.tiny_width % 4 != 0))
    throw ConfigError("tiny width must be a positive multiple of 4, got " + std::to_string(s.tiny_width));
  if (s.family != BackboneFamily::tiny && s.embedding_dim != default_backbone(s.family).embedding_dim)
    throw ConfigError("embedding width of " + std::string(to_string(s.family)) + " is fixed at " +
                      std::to_string(default_backbone(s.family).embedding_dim));
}

void validate(const FusionConfig& c) {
  validate(c.backbone);
  if (c.backbone.input_channels != variant_input_channels(c.variant))
    throw ConfigError(std::string(arch_label(c.variant)) + " needs " +
                      std::to_string(variant_input_channels(c.variant)) + " input channels, got " +
                      std::to_string(c.backbone.input_channels));
  if (c.use_action_input && c.head != HeadLayout::tool_only)
    throw ConfigError("the action side-input is only valid with a tool-only head");
}

void check_compatible(TaskSpec task, const FusionConfig& c) {
  if (c.use_action_input != task_uses_action_input(task))
    throw ConfigError(std::string("task ") + std::string(to_string(task)) +
                      (task_uses_action_input(task) ? " requires" : " does not accept") +
                      " the action one-hot input");
  if (c.head != head_for(task))
    throw ConfigError(std::string("task ") + std::string(to_string(task)) + " needs a " +
                      std::string(to_string(head_for(task))) + " head, config has " +
                      std::string(to_string(c.head)));
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const FusionConfig& config) {
  nlohmann::json j = config;
  return fnv1a_hex(j.dump());
}

void to_json(nlohmann::json& j, const BackboneSpec& s) {
  j = nlohmann::json{{"family", to_string(s.family)},
                     {"first_block_kernel", s.first_block_kernel},
                     {"first_block_stride", s.first_block_stride},
                     {"input_channels", s.input_channels},
                     {"embedding_dim", s.embedding_dim}};
  if (s.family == BackboneFamily::tiny) j["tiny_width"] = s.tiny_width;
}

void from_json(const nlohmann::json& j, BackboneSpec& s) {
  s = default_backbone(parse_family(j.at("family").get<std::string>()));
  s.first_block_kernel = j.value("first_block_kernel", s.first_block_kernel);
  s.first_block_stride = j.value("first_block_stride", s.first_block_stride);
  s.input_channels = j.value("input_channels", s.input_channels);
  s.embedding_dim = j.value("embedding_dim", s.embedding_dim);
  s.tiny_width = j.value("tiny_width", s.tiny_width);
}

void to_json(nlohmann::json& j, const FusionConfig& c) {
  j = nlohmann::json{{"variant", to_string(c.variant)},
                     {"backbone", c.backbone},
                     {"use_action_input", c.use_action_input},
                     {"head", to_string(c.head)}};
}

void from_json(const nlohmann::json& j, FusionConfig& c) {
  c.variant = parse_variant(j.at("variant").get<std::string>());
  c.backbone = j.at("backbone").get<BackboneSpec>();
  c.use_action_input = j.at("use_action_input").get<bool>();
  c.head = parse_head(j.at("head").get<std::string>());
}

}  // namespace affordance
