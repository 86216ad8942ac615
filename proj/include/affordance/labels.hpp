#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace affordance {

// Label orderings are frozen: one-hot encodings, head outputs and confusion
// matrix axes all index by these values.
enum class Action : std::uint8_t { push = 0, pull = 1, left_to_right = 2, right_to_left = 3 };
enum class Tool : std::uint8_t { boomerang = 0, ruler = 1, slingshot = 2, spatula = 3 };
enum class CameraView : std::uint8_t { left = 0, center = 1, right = 2 };
enum class Phase : std::uint8_t { initial = 0, final = 1 };

inline constexpr int kNumActions = 4;
inline constexpr int kNumTools = 4;
inline constexpr int kNumViews = 3;
inline constexpr int kNumPhases = 2;
inline constexpr int kNumJointClasses = kNumTools * kNumActions;

inline constexpr std::array<Action, kNumActions> kAllActions{
    Action::push, Action::pull, Action::left_to_right, Action::right_to_left};
inline constexpr std::array<Tool, kNumTools> kAllTools{Tool::boomerang, Tool::ruler, Tool::slingshot,
                                                       Tool::spatula};
inline constexpr std::array<CameraView, kNumViews> kAllViews{CameraView::left, CameraView::center,
                                                             CameraView::right};
inline constexpr std::array<Phase, kNumPhases> kAllPhases{Phase::initial, Phase::final};

/// One of the six images of a trial.
struct ImageKey {
  CameraView view;
  Phase phase;

  /// Position in the canonical (left, center, right) x (initial, final) order.
  constexpr int index() const { return static_cast<int>(view) * kNumPhases + static_cast<int>(phase); }
  constexpr auto operator<=>(const ImageKey&) const = default;
};

inline constexpr std::array<ImageKey, kNumViews * kNumPhases> kAllImageKeys{{
    {CameraView::left, Phase::initial},
    {CameraView::left, Phase::final},
    {CameraView::center, Phase::initial},
    {CameraView::center, Phase::final},
    {CameraView::right, Phase::initial},
    {CameraView::right, Phase::final},
}};

constexpr int index_of(Action a) { return static_cast<int>(a); }
constexpr int index_of(Tool t) { return static_cast<int>(t); }

std::string_view to_string(Action a);
std::string_view to_string(Tool t);
std::string_view to_string(CameraView v);
std::string_view to_string(Phase p);
/// Manifest key, e.g. "center_initial".
std::string to_string(ImageKey key);

std::optional<Action> parse_action(std::string_view name);
std::optional<Tool> parse_tool(std::string_view name);
std::optional<ImageKey> parse_image_key(std::string_view name);

Action action_from_index(int index);
Tool tool_from_index(int index);

/// Joint 16-way class: tool * 4 + action.
constexpr int joint_index(Tool t, Action a) { return index_of(t) * kNumActions + index_of(a); }

using ActionOneHot = std::array<float, kNumActions>;

ActionOneHot encode_action(Action a);
/// Inverse of encode_action. Throws LabelError unless the vector is a valid one-hot.
Action decode_action(const ActionOneHot& one_hot);

}  // namespace affordance
