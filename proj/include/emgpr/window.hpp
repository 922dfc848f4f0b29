#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "emgpr/labels.hpp"

namespace emgpr {

// One fixed-length analysis segment: channel-major filtered samples.
struct Window {
  int channel_count = 0;
  int window_len = 0;
  std::vector<double> samples;    // channel_count * window_len, channel-major
  std::uint64_t start_index = 0;  // offset of the first sample in the stream
  std::optional<MotionLabel> label;

  std::span<const double> channel(int ch) const {
    return {samples.data() + static_cast<std::size_t>(ch) * window_len,
            static_cast<std::size_t>(window_len)};
  }
  std::span<double> channel(int ch) {
    return {samples.data() + static_cast<std::size_t>(ch) * window_len,
            static_cast<std::size_t>(window_len)};
  }

  // Mean absolute amplitude over all channels and samples.
  double mean_abs() const {
    if (samples.empty()) return 0.0;
    double acc = 0.0;
    for (double v : samples) acc += v < 0 ? -v : v;
    return acc / static_cast<double>(samples.size());
  }
};

}  // namespace emgpr
