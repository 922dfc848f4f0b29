#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "emgpr/biquad.hpp"
#include "emgpr/errors.hpp"
#include "emgpr/labels.hpp"
#include "emgpr/recording.hpp"

namespace emgpr {

// Gaussian deviates via Box-Muller over the (fully specified) mt19937_64
// stream, so generated recordings are bit-identical across platforms and
// standard libraries.
class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct SynthBand {
  double low_hz = 20.0;
  double high_hz = 450.0;
};

struct SynthEnvelope {
  double rise_ms = 150.0;
  double hold_ms = 3000.0;
  double fall_ms = 150.0;
  // Relax period after each trial with only the noise floor active. Keeps the
  // replay filters' lead-in context quiet so loud trials do not ring into the
  // first windows of a following quiet one.
  double gap_ms = 500.0;
};

// Synthetic EMG generator parameters. Each trial of class c produces, per
// channel, amp_matrix[c][ch] * (band-limited Gaussian noise) shaped by a
// trapezoidal envelope, plus a white noise floor on every channel.
struct SynthSpec {
  std::uint64_t seed = 42;
  std::vector<MotionLabel> classes;
  std::vector<std::vector<double>> amp_matrix;  // classes x channels
  SynthBand band;
  SynthEnvelope envelope;
  double noise_floor = 0.005;

  int channel_count() const {
    return amp_matrix.empty() ? 0 : static_cast<int>(amp_matrix.front().size());
  }

  void validate(double sample_rate) const {
    if (classes.empty()) throw ConfigError("synth: no classes");
    if (amp_matrix.size() != classes.size())
      throw ConfigError("synth: amp_matrix rows must match class count");
    const std::size_t ch = amp_matrix.front().size();
    if (ch == 0) throw ConfigError("synth: zero channels");
    for (const auto& row : amp_matrix)
      if (row.size() != ch) throw ConfigError("synth: ragged amp_matrix");
    for (std::size_t i = 0; i < amp_matrix.size(); ++i)
      for (std::size_t j = i + 1; j < amp_matrix.size(); ++j)
        if (amp_matrix[i] == amp_matrix[j])
          throw ConfigError("synth: identical amp_matrix rows make classes '" +
                            classes[i].name + "' and '" + classes[j].name +
                            "' indistinguishable");
    if (!(band.low_hz > 0) || !(band.high_hz > band.low_hz) ||
        band.high_hz >= 0.5 * sample_rate)
      throw ConfigError("synth: excitation band must lie inside (0, sample_rate/2)");
    if (envelope.rise_ms < 0 || envelope.fall_ms < 0 || envelope.gap_ms < 0 ||
        !(envelope.hold_ms > 0))
      throw ConfigError("synth: envelope needs hold > 0 and non-negative ramps/gap");
    if (noise_floor < 0) throw ConfigError("synth: negative noise floor");
  }
};

// Default 12-class (rest + 11 motions), 8-channel activation map. Each motion
// energizes a distinct channel pair on top of a per-class scale ladder, which
// keeps every pair of rows several pooled standard deviations apart in
// feature space; rest is a near-silent row just above the noise floor.
inline SynthSpec default_synth_spec(std::uint64_t seed = 42) {
  SynthSpec spec;
  spec.seed = seed;
  spec.classes = default_labels();
  const int channels = 8;
  spec.amp_matrix.assign(spec.classes.size(), std::vector<double>(channels, 0.0));
  for (int ch = 0; ch < channels; ++ch) spec.amp_matrix[0][ch] = 0.02;  // rest
  for (std::size_t c = 1; c < spec.classes.size(); ++c) {
    const double scale = 0.5 * std::pow(1.35, static_cast<double>(c - 1));
    const int m = static_cast<int>(c - 1);
    const int hi1 = m % channels;
    const int hi2 = (m < channels) ? (m + 3) % channels : (m - channels + 4) % channels;
    for (int ch = 0; ch < channels; ++ch) spec.amp_matrix[c][ch] = 0.15 * scale;
    spec.amp_matrix[c][hi1] = 1.0 * scale;
    spec.amp_matrix[c][hi2] = 0.6 * scale;
  }
  return spec;
}

// Round-robin trial order: one trial of every class per cycle.
inline std::vector<std::uint16_t> default_trial_order(const std::vector<MotionLabel>& classes,
                                                      int trials_per_class) {
  std::vector<std::uint16_t> order;
  order.reserve(classes.size() * static_cast<std::size_t>(trials_per_class));
  for (int t = 0; t < trials_per_class; ++t)
    for (const auto& c : classes) order.push_back(c.id);
  return order;
}

// Generates one recording for the given trial label sequence. Trials abut
// back to back; the annotated trial range covers the envelope's hold region
// only, with the ramps left unlabeled on either side. Deterministic for a
// fixed spec (single RNG stream consumed trial by trial, channel by channel).
inline Recording synth_generate(const SynthSpec& spec,
                                const std::vector<std::uint16_t>& trial_labels,
                                double sample_rate = 1000.0) {
  spec.validate(sample_rate);
  if (trial_labels.empty()) throw ConfigError("synth: empty trial plan");

  const int channels = spec.channel_count();
  const auto n_rise = static_cast<std::uint32_t>(std::llround(spec.envelope.rise_ms * sample_rate / 1000.0));
  const auto n_hold = static_cast<std::uint32_t>(std::llround(spec.envelope.hold_ms * sample_rate / 1000.0));
  const auto n_fall = static_cast<std::uint32_t>(std::llround(spec.envelope.fall_ms * sample_rate / 1000.0));
  const auto n_gap = static_cast<std::uint32_t>(std::llround(spec.envelope.gap_ms * sample_rate / 1000.0));
  const std::uint32_t n_active = n_rise + n_hold + n_fall;
  const std::uint32_t n_trial = n_active + n_gap;
  const std::uint64_t n_total = static_cast<std::uint64_t>(n_trial) * trial_labels.size();

  Recording rec;
  rec.sample_rate = static_cast<std::uint32_t>(std::llround(sample_rate));
  rec.channel_count = static_cast<std::uint16_t>(channels);
  rec.samples.assign(static_cast<std::size_t>(n_total) * channels, 0.0f);

  GaussianRng rng(spec.seed);
  const BiquadCascade excitation_proto =
      design_bandpass(sample_rate, spec.band.low_hz, spec.band.high_hz, 3);

  std::vector<double> shaped(n_trial);
  std::uint64_t pos = 0;
  for (std::uint16_t label_id : trial_labels) {
    std::size_t class_idx = spec.classes.size();
    for (std::size_t i = 0; i < spec.classes.size(); ++i)
      if (spec.classes[i].id == label_id) class_idx = i;
    if (class_idx == spec.classes.size())
      throw ConfigError("synth: trial label id " + std::to_string(label_id) + " not in spec");

    for (int ch = 0; ch < channels; ++ch) {
      const double amp = spec.amp_matrix[class_idx][static_cast<std::size_t>(ch)];
      BiquadCascade excitation = excitation_proto;  // fresh state per trial/channel
      excitation.reset(1);
      for (std::uint32_t i = 0; i < n_trial; ++i) {
        double env;
        if (i < n_rise)
          env = static_cast<double>(i + 1) / static_cast<double>(n_rise);
        else if (i < n_rise + n_hold)
          env = 1.0;
        else if (i < n_active)
          env = static_cast<double>(n_active - i) / static_cast<double>(n_fall);
        else
          env = 0.0;  // relax gap
        shaped[i] = amp * env * excitation.process_sample(0, rng.gaussian());
      }
      for (std::uint32_t i = 0; i < n_trial; ++i)
        shaped[i] += spec.noise_floor * rng.gaussian();
      float* dst = rec.samples.data() + static_cast<std::size_t>(ch) * n_total + pos;
      for (std::uint32_t i = 0; i < n_trial; ++i) dst[i] = static_cast<float>(shaped[i]);
    }

    rec.trials.push_back({static_cast<std::uint32_t>(pos + n_rise),
                          static_cast<std::uint32_t>(pos + n_rise + n_hold),
                          spec.classes[class_idx]});
    pos += n_trial;
  }
  rec.validate();
  return rec;
}

}  // namespace emgpr
