#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "emgpr/errors.hpp"

namespace emgpr {

// One second-order section, normalized so a0 == 1:
//
//   y[n] = b0*x[n] + b1*x[n-1] + b2*x[n-2] - a1*y[n-1] - a2*y[n-2]
struct BiquadSection {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

// Cascade of second-order sections with per-channel state, evaluated in
// direct form II transposed (two delay registers per section per channel).
// Coefficients are fixed at design time; only the state advances.
class BiquadCascade {
 public:
  BiquadCascade() = default;

  explicit BiquadCascade(std::vector<BiquadSection> sections, int channels = 1)
      : sections_(std::move(sections)) {
    reset(channels);
  }

  // Re-zeroes the delay registers and resizes them for `channels`.
  void reset(int channels) {
    if (channels < 1) throw ConfigError("channel count must be >= 1");
    channels_ = channels;
    state_.assign(2 * sections_.size() * static_cast<std::size_t>(channels), 0.0);
  }

  int channel_count() const { return channels_; }
  const std::vector<BiquadSection>& sections() const { return sections_; }

  // Advances one tick on one channel.
  double process_sample(int channel, double x) {
    double* z = state_.data() + 2 * sections_.size() * static_cast<std::size_t>(channel);
    for (const BiquadSection& s : sections_) {
      const double y = s.b0 * x + z[0];
      z[0] = s.b1 * x - s.a1 * y + z[1];
      z[1] = s.b2 * x - s.a2 * y;
      z += 2;
      x = y;
    }
    return x;
  }

  // Advances one tick on every channel. in/out sizes must equal the channel
  // count configured by reset().
  void process_frame(std::span<const double> in, std::span<double> out) {
    if (static_cast<int>(in.size()) != channels_ || static_cast<int>(out.size()) != channels_)
      throw DimensionError("frame width does not match cascade channel count");
    for (int ch = 0; ch < channels_; ++ch) out[ch] = process_sample(ch, in[ch]);
  }

  // H(e^{jw}) at the given physical frequency.
  std::complex<double> response(double freq_hz, double sample_rate) const {
    const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate;
    const std::complex<double> z1 = std::polar(1.0, -w);
    const std::complex<double> z2 = z1 * z1;
    std::complex<double> h{1.0, 0.0};
    for (const BiquadSection& s : sections_)
      h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
    return h;
  }

  double magnitude_db(double freq_hz, double sample_rate) const {
    return 20.0 * std::log10(std::abs(response(freq_hz, sample_rate)));
  }

  // Roots of each section denominator.
  std::vector<std::complex<double>> poles() const {
    std::vector<std::complex<double>> out;
    out.reserve(2 * sections_.size());
    for (const BiquadSection& s : sections_) {
      const std::complex<double> disc =
          std::sqrt(std::complex<double>(s.a1 * s.a1 - 4.0 * s.a2, 0.0));
      out.push_back((-s.a1 + disc) / 2.0);
      out.push_back((-s.a1 - disc) / 2.0);
    }
    return out;
  }

  bool is_stable() const {
    for (const auto& p : poles())
      if (std::abs(p) >= 1.0) return false;
    return true;
  }

 private:
  std::vector<BiquadSection> sections_;
  int channels_ = 1;
  std::vector<double> state_;
};

namespace detail {

inline std::complex<double> bilinear(std::complex<double> s, double fs2) {
  return (fs2 + s) / (fs2 - s);
}

// Section denominator from a pole pair whose quadratic has real coefficients
// (a conjugate pair, or two real poles).
inline void set_pole_pair(BiquadSection& s, std::complex<double> p1, std::complex<double> p2) {
  s.a1 = -(p1 + p2).real();
  s.a2 = (p1 * p2).real();
}

inline double section_magnitude(const BiquadSection& s, double w) {
  const std::complex<double> z1 = std::polar(1.0, -w);
  const std::complex<double> z2 = z1 * z1;
  return std::abs((s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2));
}

}  // namespace detail

// Butterworth band-pass of the given prototype order, realized as `order`
// second-order sections via the bilinear transform. Each section carries one
// zero at z=+1 and one at z=-1, so the DC gain is structurally zero, and is
// individually normalized to unit gain at the band center.
//
// An upper edge at or above Nyquist is clamped to 0.495 * sample_rate;
// `clamped`, when non-null, reports that adjustment so callers can warn.
inline BiquadCascade design_bandpass(double sample_rate, double low_hz, double high_hz,
                                     int order, bool* clamped = nullptr) {
  if (clamped) *clamped = false;
  if (sample_rate <= 0) throw ConfigError("sample_rate must be positive");
  if (order < 1) throw ConfigError("bandpass order must be >= 1");
  if (!(low_hz > 0) || !(high_hz > low_hz))
    throw ConfigError("band edges must satisfy 0 < low < high");
  if (high_hz >= 0.5 * sample_rate) {
    high_hz = 0.495 * sample_rate;
    if (clamped) *clamped = true;
    if (high_hz <= low_hz)
      throw ConfigError("band edges invalid after clamping upper edge below Nyquist");
  }

  const double pi = std::numbers::pi;
  const double fs2 = 2.0 * sample_rate;
  const double w1 = fs2 * std::tan(pi * low_hz / sample_rate);   // prewarped edges
  const double w2 = fs2 * std::tan(pi * high_hz / sample_rate);
  const double w0 = std::sqrt(w1 * w2);
  const double bw = w2 - w1;
  const double wc_digital = 2.0 * std::atan(w0 / fs2);

  std::vector<BiquadSection> sections;
  sections.reserve(static_cast<std::size_t>(order));

  // Analog low-pass prototype poles on the unit circle, left half plane.
  // Each prototype pole maps to two band-pass poles t +- sqrt(t^2 - w0^2).
  for (int k = 0; k < order; ++k) {
    const double theta = pi * (2.0 * k + order + 1.0) / (2.0 * order);
    if (std::sin(theta) < -1e-12) continue;  // lower-half poles arrive as conjugates
    const std::complex<double> proto = std::polar(1.0, theta);
    const std::complex<double> t = 0.5 * bw * proto;
    const std::complex<double> r = std::sqrt(t * t - w0 * w0);

    if (std::sin(theta) > 1e-12) {
      // Complex prototype pole: its conjugate twin supplies the matching
      // conjugate for each of the two band-pass poles, one section apiece.
      for (const std::complex<double> q : {t + r, t - r}) {
        const std::complex<double> zp = detail::bilinear(q, fs2);
        BiquadSection s;
        detail::set_pole_pair(s, zp, std::conj(zp));
        sections.push_back(s);
      }
    } else {
      // Real prototype pole: the two band-pass poles pair with each other
      // (mutual conjugates for narrow bands, both real for wide ones).
      const std::complex<double> zp1 = detail::bilinear(t + r, fs2);
      const std::complex<double> zp2 = detail::bilinear(t - r, fs2);
      BiquadSection s;
      detail::set_pole_pair(s, zp1, zp2);
      sections.push_back(s);
    }
  }

  for (BiquadSection& s : sections) {
    s.b0 = 1.0;
    s.b1 = 0.0;
    s.b2 = -1.0;
    const double mag = detail::section_magnitude(s, wc_digital);
    if (!(mag > 0) || !std::isfinite(mag))
      throw ConfigError("bandpass design failed: degenerate section gain");
    s.b0 /= mag;
    s.b2 /= mag;
  }

  BiquadCascade cascade(std::move(sections));
  if (!cascade.is_stable())
    throw ConfigError("bandpass design failed: section poles outside unit circle");
  return cascade;
}

// Second-order notch with both transfer-function zeros on the unit circle at
// +-center_hz, so the gain at the notch frequency is exactly zero. Gain at DC
// and Nyquist is exactly one by construction.
inline BiquadCascade design_notch(double sample_rate, double center_hz, double q) {
  if (sample_rate <= 0) throw ConfigError("sample_rate must be positive");
  if (!(center_hz > 0) || center_hz >= 0.5 * sample_rate)
    throw ConfigError("notch center must lie in (0, sample_rate/2)");
  if (!(q > 0)) throw ConfigError("notch q must be positive");

  const double w0 = 2.0 * std::numbers::pi * center_hz / sample_rate;
  const double alpha = std::sin(w0) / (2.0 * q);
  const double cw = std::cos(w0);
  const double a0 = 1.0 + alpha;

  BiquadSection s;
  s.b0 = 1.0 / a0;
  s.b1 = -2.0 * cw / a0;
  s.b2 = 1.0 / a0;
  s.a1 = -2.0 * cw / a0;
  s.a2 = (1.0 - alpha) / a0;

  BiquadCascade cascade({s});
  if (!cascade.is_stable())
    throw ConfigError("notch design failed: poles outside unit circle");
  return cascade;
}

// Stateful per-tick filtering of one multi-channel frame.
inline std::vector<double> filter_process(BiquadCascade& cascade, std::span<const double> frame) {
  std::vector<double> out(frame.size());
  cascade.process_frame(frame, out);
  return out;
}

}  // namespace emgpr
