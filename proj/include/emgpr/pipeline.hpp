#pragma once

#include <optional>
#include <span>
#include <vector>

#include "emgpr/biquad.hpp"
#include "emgpr/config.hpp"
#include "emgpr/ring_buffer.hpp"

namespace emgpr {

// Streaming front end: band-pass cascaded with the power-line notch, applied
// per tick, then sliding-window segmentation. Filter state persists across
// windows; construct a fresh pipeline to start a new stream.
class StreamPipeline {
 public:
  explicit StreamPipeline(const StreamConfig& cfg)
      : cfg_(validated(cfg)),
        bandpass_(design_bandpass(cfg.sample_rate, cfg.bandpass.low_hz, cfg.bandpass.high_hz,
                                  cfg.bandpass.order, &bandpass_clamped_)),
        notch_(design_notch(cfg.sample_rate, cfg.notch.center_hz, cfg.notch.q)),
        ring_(cfg.channel_count, cfg.window_len, cfg.window_shift),
        scratch_(static_cast<std::size_t>(cfg.channel_count)) {
    bandpass_.reset(cfg.channel_count);
    notch_.reset(cfg.channel_count);
  }

  // Pushes one raw frame (one sample per channel); completed windows are
  // appended to `out`, stamped with the current label.
  void push_frame(std::span<const double> raw, std::vector<Window>& out) {
    bandpass_.process_frame(raw, scratch_);
    notch_.process_frame(scratch_, scratch_);
    const std::size_t before = out.size();
    ring_.push_frame(scratch_, out);
    for (std::size_t i = before; i < out.size(); ++i) out[i].label = label_;
  }

  void set_label(std::optional<MotionLabel> label) { label_ = std::move(label); }

  const StreamConfig& config() const { return cfg_; }
  const BiquadCascade& bandpass() const { return bandpass_; }
  const BiquadCascade& notch() const { return notch_; }
  bool bandpass_clamped() const { return bandpass_clamped_; }
  std::uint64_t samples_seen() const { return ring_.written(); }

 private:
  static const StreamConfig& validated(const StreamConfig& cfg) {
    cfg.validate();
    return cfg;
  }

  StreamConfig cfg_;
  bool bandpass_clamped_ = false;
  BiquadCascade bandpass_;
  BiquadCascade notch_;
  RingBuffer ring_;
  std::vector<double> scratch_;
  std::optional<MotionLabel> label_;
};

}  // namespace emgpr
