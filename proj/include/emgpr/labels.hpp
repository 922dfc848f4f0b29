#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace emgpr {

// A motion class. The numeric id is the identity used by models and files;
// the name is for humans and interchange formats.
struct MotionLabel {
  std::uint16_t id = 0;
  std::string name;

  friend bool operator==(const MotionLabel& a, const MotionLabel& b) {
    return a.id == b.id && a.name == b.name;
  }
};

// Twelve-label set used by the default synthetic protocol: rest plus eleven
// upper-limb motions.
inline std::vector<MotionLabel> default_labels() {
  static const char* const names[] = {
      "rest",
      "hand_close",
      "hand_open",
      "wrist_extension",
      "wrist_flexion",
      "cutter_grasp",
      "plier_grasp",
      "screw_grasp",
      "quapod_grasp",
      "large_diameter_grasp",
      "normal_parallel_grasp",
      "forced_parallel_grasp",
  };
  std::vector<MotionLabel> out;
  out.reserve(12);
  for (std::uint16_t i = 0; i < 12; ++i) out.push_back({i, names[i]});
  return out;
}

}  // namespace emgpr
