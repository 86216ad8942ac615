#include "../testing.hpp"

#include <set>

#include "affordance/config.hpp"
#include "affordance/errors.hpp"
#include "affordance/labels.hpp"

using namespace affordance;

TEST_SUITE("config") {
  TEST_CASE("label names round-trip") {
    for (Action a : kAllActions) CHECK(parse_action(to_string(a)) == a);
    for (Tool t : kAllTools) CHECK(parse_tool(to_string(t)) == t);
    for (ImageKey k : kAllImageKeys) CHECK(parse_image_key(to_string(k)) == k);
    CHECK_FALSE(parse_action("shove").has_value());
    CHECK(to_string(ImageKey{CameraView::center, Phase::initial}) == "center_initial");
  }

  TEST_CASE("joint index covers 16 classes once") {
    std::set<int> seen;
    for (Tool t : kAllTools)
      for (Action a : kAllActions) seen.insert(joint_index(t, a));
    CHECK(seen.size() == 16);
    CHECK(*seen.begin() == 0);
    CHECK(*seen.rbegin() == 15);
  }

  TEST_CASE("action one-hot encodes and decodes") {
    for (Action a : kAllActions) {
      const auto v = encode_action(a);
      float sum = 0;
      for (float x : v) sum += x;
      CHECK(sum == 1.0f);
      CHECK(decode_action(v) == a);
    }
    CHECK_THROWS_AS(decode_action({0, 0, 0, 0}), LabelError);
    CHECK_THROWS_AS(decode_action({1, 1, 0, 0}), LabelError);
    CHECK_THROWS_AS(action_from_index(4), LabelError);
    CHECK_THROWS_AS(tool_from_index(-1), LabelError);
  }

  TEST_CASE("variant tables") {
    CHECK(variant_encoder_count(FusionVariant::stacked_3C1N) == 1);
    CHECK(variant_encoder_count(FusionVariant::separate_3C6N) == 6);
    CHECK(variant_encoder_count(FusionVariant::shared_3C3N) == 3);
    CHECK(variant_encoder_count(FusionVariant::separate_central_1C2N) == 2);
    CHECK(variant_encoder_count(FusionVariant::shared_central_1C1N) == 1);
    CHECK(variant_embedding_count(FusionVariant::stacked_3C1N) == 1);
    CHECK(variant_embedding_count(FusionVariant::shared_3C3N) == 6);
    CHECK(variant_embedding_count(FusionVariant::shared_central_1C1N) == 2);
    CHECK(variant_input_channels(FusionVariant::stacked_3C1N) == 18);
    CHECK(variant_input_channels(FusionVariant::shared_3C3N) == 3);
    CHECK(variant_image_keys(FusionVariant::separate_3C6N).size() == 6);
    const auto central = variant_image_keys(FusionVariant::shared_central_1C1N);
    REQUIRE(central.size() == 2);
    CHECK(central[0] == ImageKey{CameraView::center, Phase::initial});
    CHECK(central[1] == ImageKey{CameraView::center, Phase::final});
  }

  TEST_CASE("task to head mapping") {
    CHECK(head_for(TaskSpec::tools_plus_actions) == HeadLayout::dual);
    CHECK(head_for(TaskSpec::joint16) == HeadLayout::joint16);
    CHECK(head_for(TaskSpec::tools_with_action) == HeadLayout::tool_only);
    CHECK(head_for(TaskSpec::tools_no_action) == HeadLayout::tool_only);
    CHECK(head_for(TaskSpec::actions_only) == HeadLayout::action_only);
    CHECK(task_uses_action_input(TaskSpec::tools_with_action));
    CHECK_FALSE(task_uses_action_input(TaskSpec::joint16));
  }

  TEST_CASE("cli spellings parse") {
    CHECK(parse_task("tools") == TaskSpec::tools_with_action);
    CHECK(parse_task("tools-no-action") == TaskSpec::tools_no_action);
    CHECK(parse_task("tools+actions") == TaskSpec::tools_plus_actions);
    CHECK(parse_task("actions") == TaskSpec::actions_only);
    CHECK(parse_task("joint16") == TaskSpec::joint16);
    CHECK(parse_variant("3c1n") == FusionVariant::stacked_3C1N);
    CHECK(parse_variant("1C-1N") == FusionVariant::shared_central_1C1N);
    CHECK(parse_family("resnet50") == BackboneFamily::resnet50);
    CHECK_THROWS_AS(parse_task("everything"), ConfigError);
    CHECK_THROWS_AS(parse_variant("2c2n"), ConfigError);
    CHECK_THROWS_AS(parse_family("vgg"), ConfigError);
  }

  TEST_CASE("backbone validation") {
    BackboneSpec bb = default_backbone(BackboneFamily::resnet18);
    CHECK(bb.first_block_kernel == 7);
    CHECK(bb.first_block_stride == 2);
    CHECK(bb.embedding_dim == 512);
    CHECK(default_backbone(BackboneFamily::resnet50).embedding_dim == 2048);
    CHECK_NOTHROW(validate(bb));
    bb.first_block_kernel = 4;
    CHECK_THROWS_AS(validate(bb), ConfigError);
    bb = default_backbone(BackboneFamily::resnet18);
    bb.first_block_stride = 3;
    CHECK_THROWS_AS(validate(bb), ConfigError);
    bb = default_backbone(BackboneFamily::resnet18);
    bb.embedding_dim = 64;
    CHECK_THROWS_AS(validate(bb), ConfigError);
  }

  TEST_CASE("fusion config from task") {
    const auto c = make_fusion_config(TaskSpec::tools_with_action, FusionVariant::stacked_3C1N,
                                      default_backbone(BackboneFamily::tiny));
    CHECK(c.backbone.input_channels == 18);
    CHECK(c.use_action_input);
    CHECK(c.head == HeadLayout::tool_only);
    CHECK_NOTHROW(check_compatible(TaskSpec::tools_with_action, c));
    CHECK_THROWS_AS(check_compatible(TaskSpec::joint16, c), ConfigError);

    FusionConfig bad = c;
    bad.backbone.input_channels = 3;
    CHECK_THROWS_AS(validate(bad), ConfigError);
  }

  TEST_CASE("config hash is stable and sensitive") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    const auto a = make_fusion_config(TaskSpec::joint16, FusionVariant::shared_3C3N,
                                      default_backbone(BackboneFamily::tiny));
    auto b = a;
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    b.backbone.first_block_kernel = 5;
    CHECK(config_hash(a) != config_hash(b));
  }

  TEST_CASE("fusion config json round-trip") {
    for (FusionVariant v : kAllVariants) {
      for (TaskSpec t : kAllTasks) {
        const auto c = make_fusion_config(t, v, default_backbone(BackboneFamily::resnet50));
        const nlohmann::json j = c;
        CHECK(j.get<FusionConfig>() == c);
      }
    }
  }
}
