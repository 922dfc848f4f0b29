#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "emgpr/errors.hpp"
#include "emgpr/window.hpp"

namespace emgpr {

// Below this, m0 or m2 counts as silence: features are zeroed and flagged
// instead of dividing by ~0.
inline constexpr double kDegenerateEps = 1e-12;

inline constexpr int kFeaturesPerChannel = 4;
inline constexpr const char* kFeatureNames[kFeaturesPerChannel] = {"pap", "zcap", "mwl", "dbm"};

// Root-sum-square moments of a segment and its discrete derivatives.
//   m0 = sqrt(sum x^2), m2 = sqrt(sum (dx)^2), m4 = sqrt(sum (d2x)^2)
// sigma = m4/m2 and theta = m2/m0 are the squared peak-count and
// zero-crossing surrogates.
struct MomentSet {
  double m0 = 0.0;
  double m2 = 0.0;
  double m4 = 0.0;
  double sigma = 0.0;
  double theta = 0.0;
  bool degenerate = false;
};

struct AtdmFeatures {
  double pap = 0.0;   // peak average power, m0/sigma
  double zcap = 0.0;  // zero-crossing average power, m0/theta
  double mwl = 0.0;   // waveform length of the first derivative
  double dbm = 0.0;   // m0 - m2
  bool degenerate = false;
};

// Concatenated per-channel features, channel-major: ch0 [pap,zcap,mwl,dbm],
// ch1 [...], ...
struct FeatureVector {
  std::vector<double> values;
  std::optional<MotionLabel> label;
  std::uint64_t window_start = 0;
  bool degenerate = false;  // true if any channel was silent
};

// Backward sample difference y[j] = x[j+1] - x[j], applied n times.
inline std::vector<double> difference(std::span<const double> x, int n) {
  if (n < 1) throw ConfigError("difference order must be >= 1");
  if (x.size() <= static_cast<std::size_t>(n))
    throw DataError("window too short for difference of order " + std::to_string(n));
  std::vector<double> y(x.begin(), x.end());
  for (int pass = 0; pass < n; ++pass) {
    for (std::size_t j = 0; j + 1 < y.size(); ++j) y[j] = y[j + 1] - y[j];
    y.pop_back();
  }
  return y;
}

inline MomentSet moments(std::span<const double> x) {
  if (x.size() < 3) throw DataError("window too short: need at least 3 samples");
  double s0 = 0.0, s2 = 0.0, s4 = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    s0 += x[j] * x[j];
    if (j + 1 < x.size()) {
      const double d1 = x[j + 1] - x[j];
      s2 += d1 * d1;
    }
    if (j + 2 < x.size()) {
      const double d2 = x[j + 2] - 2.0 * x[j + 1] + x[j];
      s4 += d2 * d2;
    }
  }
  MomentSet m;
  m.m0 = std::sqrt(s0);
  m.m2 = std::sqrt(s2);
  m.m4 = std::sqrt(s4);
  m.degenerate = m.m0 <= kDegenerateEps || m.m2 <= kDegenerateEps;
  if (!m.degenerate) {
    m.sigma = m.m4 / m.m2;
    m.theta = m.m2 / m.m0;
  }
  return m;
}

inline AtdmFeatures atdm(std::span<const double> x) {
  const MomentSet m = moments(x);
  AtdmFeatures f;
  if (m.degenerate) {
    f.degenerate = true;
    return f;
  }
  f.pap = m.m0 / m.sigma;
  f.zcap = m.m0 / m.theta;
  double mwl = 0.0;  // sum |d2x|: waveform length applied to the derivative
  for (std::size_t j = 0; j + 2 < x.size(); ++j)
    mwl += std::abs(x[j + 2] - 2.0 * x[j + 1] + x[j]);
  f.mwl = mwl;
  f.dbm = m.m0 - m.m2;
  return f;
}

inline FeatureVector feature_vector(const Window& w) {
  FeatureVector fv;
  fv.values.resize(static_cast<std::size_t>(w.channel_count) * kFeaturesPerChannel);
  fv.label = w.label;
  fv.window_start = w.start_index;
  for (int ch = 0; ch < w.channel_count; ++ch) {
    const AtdmFeatures f = atdm(w.channel(ch));
    double* out = fv.values.data() + static_cast<std::size_t>(ch) * kFeaturesPerChannel;
    out[0] = f.pap;
    out[1] = f.zcap;
    out[2] = f.mwl;
    out[3] = f.dbm;
    fv.degenerate = fv.degenerate || f.degenerate;
  }
  return fv;
}

// Classical time-domain baseline: mean absolute value, waveform length, and
// threshold-gated zero-crossing / slope-sign-change counts. When no threshold
// is given, 1% of the window RMS is used so the gate stays scale-free.
struct BaselineTd {
  double mav = 0.0;
  double wl = 0.0;
  int zc = 0;
  int ssc = 0;
};

inline BaselineTd baseline_td(std::span<const double> x,
                              std::optional<double> threshold = std::nullopt) {
  if (x.size() < 3) throw DataError("window too short: need at least 3 samples");
  const std::size_t n = x.size();
  double thr;
  if (threshold) {
    thr = *threshold;
  } else {
    double s = 0.0;
    for (double v : x) s += v * v;
    thr = 0.01 * std::sqrt(s / static_cast<double>(n));
  }

  BaselineTd b;
  for (double v : x) b.mav += std::abs(v);
  b.mav /= static_cast<double>(n);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double d = x[j + 1] - x[j];
    b.wl += std::abs(d);
    if (x[j] * x[j + 1] < 0.0 && std::abs(d) >= thr) ++b.zc;
  }
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double dl = x[j] - x[j - 1];
    const double dr = x[j] - x[j + 1];
    if (dl * dr > 0.0 && (std::abs(dl) >= thr || std::abs(dr) >= thr)) ++b.ssc;
  }
  return b;
}

}  // namespace emgpr
