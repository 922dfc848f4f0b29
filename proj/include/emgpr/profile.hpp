#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "emgpr/config.hpp"
#include "emgpr/errors.hpp"
#include "emgpr/features.hpp"
#include "emgpr/lda.hpp"
#include "emgpr/metrics.hpp"
#include "emgpr/pipeline.hpp"
#include "emgpr/recording.hpp"
#include "emgpr/session.hpp"

namespace emgpr {

// Wall-clock per-window means for the four streaming stages, plus the
// real-time budget verdicts: sustained throughput needs feature extraction +
// prediction to finish within one window shift, and the full decision
// latency (window accumulation + processing) must stay within 300 ms.
//
// For scale, representative timings for the same pipeline on an embedded
// Cortex-M4 class target (150 MHz, FPU): circular-buffer fill 75.7 ms (the
// hop itself), pre-processing 10.65 ms, feature extraction 90.88 ms,
// per-class training update 8.23 ms, per-class inference 4.1 ms. Reference
// only; nothing here asserts them.
struct LatencyReport {
  double buffering_ms = 0.0;
  double filtering_ms = 0.0;
  double feature_ms = 0.0;
  double predict_ms = 0.0;
  std::uint64_t windows = 0;
  double window_ms = 0.0;
  double shift_ms = 0.0;

  double processing_ms() const { return buffering_ms + filtering_ms + feature_ms + predict_ms; }
  double decision_latency_ms() const { return window_ms + processing_ms(); }
  bool within_shift_budget() const { return feature_ms + predict_ms <= shift_ms; }
  bool within_decision_budget() const { return decision_latency_ms() <= 300.0; }
};

// Times the full pipeline over the recording. A model is first fitted from
// the recording's own trials so the prediction stage runs against a
// representative class count.
inline LatencyReport profile_latency(const StreamConfig& cfg, const Recording& rec) {
  cfg.validate();
  rec.validate();
  if (rec.channel_count != cfg.channel_count)
    throw DimensionError("recording channel count does not match config");
  if (static_cast<double>(rec.sample_rate) != cfg.sample_rate)
    throw DataError("recording sample rate does not match config");
  const std::uint64_t n = rec.samples_per_channel();
  if (expected_window_count(n, cfg.window_len, cfg.window_shift) < 100)
    throw DataError("recording too short to profile: need at least 100 windows");

  // Fit one class per distinct label over all its trials.
  std::map<std::string, CollectedClass> per_label;
  for (const Trial& t : rec.trials) {
    auto& c = per_label[t.label.name];
    c.label = t.label;
    for (Window& w : stream_trial(rec, t, cfg))
      c.features.push_back(feature_vector(w));
  }
  std::vector<ClassModel> classes;
  for (auto& [name, c] : per_label)
    if (c.features.size() >= 2) classes.push_back(fit_class(c.features, c.label));
  if (classes.size() < 2)
    throw DataError("recording needs at least two labeled classes to profile prediction");
  const PooledModel model = build_pooled(std::move(classes));

  using clock = std::chrono::steady_clock;
  auto ms = [](clock::duration d) {
    return std::chrono::duration<double, std::milli>(d).count();
  };

  LatencyReport report;
  report.window_ms = cfg.window_len_ms();
  report.shift_ms = cfg.window_shift_ms();

  StreamPipeline pipe(cfg);
  std::vector<double> frame(static_cast<std::size_t>(cfg.channel_count));
  std::vector<double> filtered(static_cast<std::size_t>(cfg.channel_count));
  RingBuffer ring(cfg.channel_count, cfg.window_len, cfg.window_shift);
  std::vector<Window> windows;
  clock::duration buffering{};
  clock::duration filtering{};
  clock::duration feature{};
  clock::duration predict{};

  // Filtering and buffering are timed separately from the window pipeline,
  // so run the raw stages by hand rather than through StreamPipeline.
  BiquadCascade bandpass = pipe.bandpass();
  BiquadCascade notch = pipe.notch();
  bandpass.reset(cfg.channel_count);
  notch.reset(cfg.channel_count);

  for (std::uint64_t i = 0; i < n; ++i) {
    for (int ch = 0; ch < cfg.channel_count; ++ch)
      frame[static_cast<std::size_t>(ch)] = static_cast<double>(rec.at(ch, i));

    auto t0 = clock::now();
    bandpass.process_frame(frame, filtered);
    notch.process_frame(filtered, filtered);
    auto t1 = clock::now();
    ring.push_frame(filtered, windows);
    auto t2 = clock::now();
    filtering += t1 - t0;
    buffering += t2 - t1;

    for (const Window& w : windows) {
      auto t3 = clock::now();
      const FeatureVector fv = feature_vector(w);
      auto t4 = clock::now();
      (void)model.predict(fv);
      auto t5 = clock::now();
      feature += t4 - t3;
      predict += t5 - t4;
      ++report.windows;
    }
    windows.clear();
  }

  const double nw = static_cast<double>(report.windows);
  report.buffering_ms = ms(buffering) / nw;
  report.filtering_ms = ms(filtering) / nw;
  report.feature_ms = ms(feature) / nw;
  report.predict_ms = ms(predict) / nw;
  return report;
}

inline nlohmann::ordered_json latency_report_json(const LatencyReport& r) {
  nlohmann::ordered_json j;
  j["windows"] = r.windows;
  j["per_window_ms"] = {{"buffering", r.buffering_ms},
                        {"filtering", r.filtering_ms},
                        {"feature_extraction", r.feature_ms},
                        {"prediction", r.predict_ms}};
  j["window_ms"] = r.window_ms;
  j["shift_ms"] = r.shift_ms;
  j["decision_latency_ms"] = r.decision_latency_ms();
  j["feature_plus_predict_within_shift"] = r.within_shift_budget();
  j["decision_within_300ms"] = r.within_decision_budget();
  return j;
}

}  // namespace emgpr
