#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "emgpr/errors.hpp"
#include "emgpr/window.hpp"

namespace emgpr {

// Fixed-capacity per-channel sample store feeding the sliding-window
// segmenter. Windows start at 0, shift, 2*shift, ... and are emitted the
// moment the write position reaches start + window_len, so a capacity of
// window_len samples per channel is always sufficient.
//
// Single producer, single consumer; one instance per session.
class RingBuffer {
 public:
  RingBuffer(int channels, int window_len, int window_shift, int capacity = 0)
      : channels_(channels),
        window_len_(window_len),
        window_shift_(window_shift),
        capacity_(capacity == 0 ? window_len : capacity) {
    if (channels < 1) throw ConfigError("channel count must be >= 1");
    if (window_shift < 1) throw ConfigError("window_shift must be >= 1");
    if (window_shift > window_len) throw ConfigError("window_shift must not exceed window_len");
    if (capacity_ < window_len) throw ConfigError("ring capacity must be >= window_len");
    storage_.assign(static_cast<std::size_t>(channels_) * capacity_, 0.0);
  }

  // Appends one sample per channel; every window completed by this tick is
  // appended to `out`. Consecutive windows start exactly window_shift apart.
  void push_frame(std::span<const double> frame, std::vector<Window>& out) {
    if (static_cast<int>(frame.size()) != channels_)
      throw DimensionError("frame width does not match channel count");
    const std::size_t slot = static_cast<std::size_t>(written_ % capacity_);
    for (int ch = 0; ch < channels_; ++ch)
      storage_[static_cast<std::size_t>(ch) * capacity_ + slot] = frame[ch];
    ++written_;

    while (written_ >= next_start_ + static_cast<std::uint64_t>(window_len_)) {
      out.push_back(extract(next_start_));
      next_start_ += static_cast<std::uint64_t>(window_shift_);
    }
  }

  std::uint64_t written() const { return written_; }

 private:
  Window extract(std::uint64_t start) const {
    Window w;
    w.channel_count = channels_;
    w.window_len = window_len_;
    w.start_index = start;
    w.samples.resize(static_cast<std::size_t>(channels_) * window_len_);
    for (int ch = 0; ch < channels_; ++ch) {
      const double* src = storage_.data() + static_cast<std::size_t>(ch) * capacity_;
      double* dst = w.samples.data() + static_cast<std::size_t>(ch) * window_len_;
      for (int i = 0; i < window_len_; ++i)
        dst[i] = src[(start + static_cast<std::uint64_t>(i)) % capacity_];
    }
    return w;
  }

  int channels_;
  int window_len_;
  int window_shift_;
  int capacity_;
  std::vector<double> storage_;
  std::uint64_t written_ = 0;
  std::uint64_t next_start_ = 0;
};

// Window count for a stream of n samples: floor((n - L)/s) + 1 for n >= L.
inline std::uint64_t expected_window_count(std::uint64_t n, int window_len, int window_shift) {
  if (n < static_cast<std::uint64_t>(window_len)) return 0;
  return (n - static_cast<std::uint64_t>(window_len)) / static_cast<std::uint64_t>(window_shift) + 1;
}

}  // namespace emgpr
