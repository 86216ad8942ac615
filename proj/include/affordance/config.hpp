#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "affordance/labels.hpp"

namespace affordance {

/// What a run predicts and which side inputs it receives.
enum class TaskSpec : std::uint8_t {
  tools_with_action,   // tool, with the action one-hot as extra input
  tools_no_action,     // tool from images only
  tools_plus_actions,  // tool and action, two heads
  actions_only,        // action only
  joint16,             // tool x action as one 16-way class
};

enum class HeadLayout : std::uint8_t { dual, joint16, tool_only, action_only };

enum class FusionVariant : std::uint8_t {
  stacked_3C1N,
  separate_3C6N,
  shared_3C3N,
  separate_central_1C2N,
  shared_central_1C1N,
};

enum class BackboneFamily : std::uint8_t { resnet18, resnet50, resnet101, tiny };

inline constexpr std::array<FusionVariant, 5> kAllVariants{
    FusionVariant::stacked_3C1N, FusionVariant::separate_3C6N, FusionVariant::shared_3C3N,
    FusionVariant::separate_central_1C2N, FusionVariant::shared_central_1C1N};

inline constexpr std::array<TaskSpec, 5> kAllTasks{TaskSpec::tools_with_action, TaskSpec::tools_no_action,
                                                   TaskSpec::tools_plus_actions, TaskSpec::actions_only,
                                                   TaskSpec::joint16};

struct BackboneSpec {
  BackboneFamily family = BackboneFamily::tiny;
  int first_block_kernel = 3;
  int first_block_stride = 2;
  int input_channels = 3;
  /// Output feature width. Fixed by the family for ResNets (512 / 2048 / 2048);
  /// free for the tiny backbone.
  int embedding_dim = 64;
  /// Channel width of the last two tiny blocks (first two use width/4, width/2).
  int tiny_width = 32;

  bool operator==(const BackboneSpec&) const = default;
};

/// Backbone spec with the family's default first block (7x7 stride 2 for
/// ResNets, 3x3 stride 2 for tiny) and embedding width.
BackboneSpec default_backbone(BackboneFamily family);

struct FusionConfig {
  FusionVariant variant = FusionVariant::shared_central_1C1N;
  BackboneSpec backbone{};
  bool use_action_input = false;
  HeadLayout head = HeadLayout::dual;

  bool operator==(const FusionConfig&) const = default;
};

// Names used on the command line and in files.
std::string_view to_string(TaskSpec t);
std::string_view to_string(HeadLayout h);
std::string_view to_string(FusionVariant v);
std::string_view to_string(BackboneFamily f);
/// Short architecture label: 3C-1N, 3C-6N, ...
std::string_view arch_label(FusionVariant v);
/// CLI spelling: 3c1n, 3c6n, ...
std::string_view cli_name(FusionVariant v);
/// CLI spelling: tools, tools-no-action, tools+actions, actions, joint16.
std::string_view cli_name(TaskSpec t);

// Parsers accept both the canonical and the CLI spellings; throw ConfigError.
TaskSpec parse_task(std::string_view s);
HeadLayout parse_head(std::string_view s);
FusionVariant parse_variant(std::string_view s);
BackboneFamily parse_family(std::string_view s);

/// Cameras consumed by a variant, in canonical order.
std::vector<CameraView> variant_views(FusionVariant v);
/// Image keys consumed by a variant, ordered cameras (left, center, right) x phase (initial, final).
std::vector<ImageKey> variant_image_keys(FusionVariant v);
/// Number of distinct encoder parameter sets.
int variant_encoder_count(FusionVariant v);
/// Number of embeddings concatenated before the head.
int variant_embedding_count(FusionVariant v);
bool variant_shares_weights(FusionVariant v);
/// Channels of the encoder input: 18 for the stacked variant, 3 otherwise.
int variant_input_channels(FusionVariant v);

HeadLayout head_for(TaskSpec t);
bool task_uses_action_input(TaskSpec t);
bool task_predicts_tool(TaskSpec t);
bool task_predicts_action(TaskSpec t);

/// Fusion config a task implies for the given variant and backbone. Fills in
/// the input channel count and head layout.
FusionConfig make_fusion_config(TaskSpec task, FusionVariant variant, BackboneSpec backbone);

/// Throws ConfigError on any invariant violation.
void validate(const BackboneSpec& spec);
void validate(const FusionConfig& config);
/// Throws ConfigError when the task and the fusion head or side-input disagree.
void check_compatible(TaskSpec task, const FusionConfig& config);

/// Stable 16-hex-digit digest of the canonical JSON form of a config.
std::string config_hash(const FusionConfig& config);
std::string fnv1a_hex(std::string_view bytes);

void to_json(nlohmann::json& j, const BackboneSpec& s);
void from_json(const nlohmann::json& j, BackboneSpec& s);
void to_json(nlohmann::json& j, const FusionConfig& c);
void from_json(const nlohmann::json& j, FusionConfig& c);

}  // namespace affordance
