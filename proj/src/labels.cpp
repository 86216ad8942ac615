#include "affordance/labels.hpp"

#include "affordance/errors.hpp"

namespace affordance {

namespace {

constexpr std::array<std::string_view, kNumActions> kActionNames{"push", "pull", "left_to_right",
                                                                 "right_to_left"};
constexpr std::array<std::string_view, kNumTools> kToolNames{"boomerang", "ruler", "slingshot", "spatula"};
constexpr std::array<std::string_view, kNumViews> kViewNames{"left", "center", "right"};
constexpr std::array<std::string_view, kNumPhases> kPhaseNames{"initial", "final"};

}  // namespace

std::string_view to_string(Action a) { return kActionNames.at(index_of(a)); }
std::string_view to_string(Tool t) { return kToolNames.at(index_of(t)); }
std::string_view to_string(CameraView v) { return kViewNames.at(static_cast<int>(v)); }
std::string_view to_string(Phase p) { return kPhaseNames.at(static_cast<int>(p)); }

std::string to_string(ImageKey key) {
  return std::string(to_string(key.view)) + "_" + std::string(to_string(key.phase));
}

std::optional<Action> parse_action(std::string_view name) {
  for (Action a : kAllActions)
    if (to_string(a) == name) return a;
  return std::nullopt;
}

std::optional<Tool> parse_tool(std::string_view name) {
  for (Tool t : kAllTools)
    if (to_string(t) == name) return t;
  return std::nullopt;
}

std::optional<ImageKey> parse_image_key(std::string_view name) {
  for (ImageKey k : kAllImageKeys)
    if (to_string(k) == name) return k;
  return std::nullopt;
}

Action action_from_index(int index) {
  if (index < 0 || index >= kNumActions) throw LabelError("action index out of range: " + std::to_string(index));
  return kAllActions[index];
}

Tool tool_from_index(int index) {
  if (index < 0 || index >= kNumTools) throw LabelError("tool index out of range: " + std::to_string(index));
  return kAllTools[index];
}

ActionOneHot encode_action(Action a) {
  ActionOneHot v{};
  v[index_of(a)] = 1.0f;
  return v;
}

Action decode_action(const ActionOneHot& one_hot) {
  int hot = -1;
  for (int i = 0; i < kNumActions; ++i) {
    if (one_hot[i] == 1.0f) {
      if (hot >= 0) throw LabelError("action one-hot has more than one active entry");
      hot = i;
    } else if (one_hot[i] != 0.0f) {
      throw LabelError("action one-hot entries must be 0 or 1");
    }
  }
  if (hot < 0) throw LabelError("action one-hot has no active entry");
  return kAllActions[hot];
}

}  // namespace affordance
