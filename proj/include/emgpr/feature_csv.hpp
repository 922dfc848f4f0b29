#pragma once

#include <cstdio>
#include <ostream>
#include <vector>

#include "emgpr/config.hpp"
#include "emgpr/features.hpp"
#include "emgpr/recording.hpp"
#include "emgpr/session.hpp"

namespace emgpr {

// Feature dump: one row per analysis window, 9 significant digits.
// Header: window_start,label,ch0_pap,ch0_zcap,ch0_mwl,ch0_dbm,ch1_pap,...
//
// Annotated recordings are streamed trial by trial (matching what training
// consumes); unannotated ones are streamed whole with an empty label column.
inline void dump_features_csv(const Recording& rec, const StreamConfig& cfg, std::ostream& out) {
  out << "window_start,label";
  for (int ch = 0; ch < cfg.channel_count; ++ch)
    for (int f = 0; f < kFeaturesPerChannel; ++f) out << ",ch" << ch << '_' << kFeatureNames[f];
  out << '\n';

  char buf[40];
  auto emit = [&](const FeatureVector& fv) {
    out << fv.window_start << ',';
    if (fv.label) out << fv.label->name;
    for (double v : fv.values) {
      std::snprintf(buf, sizeof buf, "%.9g", v);
      out << ',' << buf;
    }
    out << '\n';
  };

  if (!rec.trials.empty()) {
    for (const Trial& t : rec.trials)
      for (const Window& w : stream_trial(rec, t, cfg)) emit(feature_vector(w));
    return;
  }

  StreamPipeline pipe(cfg);
  std::vector<double> frame(static_cast<std::size_t>(cfg.channel_count));
  std::vector<Window> windows;
  const std::uint64_t n = rec.samples_per_channel();
  for (std::uint64_t i = 0; i < n; ++i) {
    for (int ch = 0; ch < cfg.channel_count; ++ch)
      frame[static_cast<std::size_t>(ch)] = static_cast<double>(rec.at(ch, i));
    pipe.push_frame(frame, windows);
    for (const Window& w : windows) emit(feature_vector(w));
    windows.clear();
  }
}

}  // namespace emgpr
