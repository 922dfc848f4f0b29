#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "emgpr/config.hpp"
#include "emgpr/errors.hpp"
#include "emgpr/features.hpp"
#include "emgpr/lda.hpp"
#include "emgpr/metrics.hpp"
#include "emgpr/pipeline.hpp"
#include "emgpr/recording.hpp"

namespace emgpr {

enum class PhaseKind { kTrain, kAddClass, kTest };

struct Phase {
  PhaseKind kind = PhaseKind::kTrain;
  std::vector<std::string> labels;  // one entry for train/add, one or more for test
  int trial_count = 0;
};

// Line-oriented session protocol:
//
//   train <label> <trials>
//   add <label> <trials>
//   test <label,label,...> <trials>     # <trials> per listed label
//
// Train phases define the initial class set and must precede the first add or
// test; add introduces a previously unseen label; test may only reference
// labels that are part of the model by that point.
struct SessionScript {
  std::vector<Phase> phases;

  static SessionScript parse(std::istream& in) {
    SessionScript script;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::istringstream ss(line);
      std::string verb;
      if (!(ss >> verb) || verb[0] == '#') continue;
      Phase p;
      std::string labels_field;
      if (verb == "train")
        p.kind = PhaseKind::kTrain;
      else if (verb == "add")
        p.kind = PhaseKind::kAddClass;
      else if (verb == "test")
        p.kind = PhaseKind::kTest;
      else
        throw ScriptError("script line " + std::to_string(lineno) + ": unknown phase '" + verb +
                          "'");
      if (!(ss >> labels_field >> p.trial_count) || p.trial_count < 1)
        throw ScriptError("script line " + std::to_string(lineno) +
                          ": expected '<phase> <labels> <trials>'");
      std::stringstream ls(labels_field);
      std::string one;
      while (std::getline(ls, one, ','))
        if (!one.empty()) p.labels.push_back(one);
      if (p.labels.empty())
        throw ScriptError("script line " + std::to_string(lineno) + ": no labels");
      if (p.kind != PhaseKind::kTest && p.labels.size() != 1)
        throw ScriptError("script line " + std::to_string(lineno) +
                          ": train/add take exactly one label");
      script.phases.push_back(std::move(p));
    }
    script.validate();
    return script;
  }

  static SessionScript parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open script: " + path);
    return parse(in);
  }

  static SessionScript parse_text(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  void validate() const {
    std::vector<std::string> known;
    bool model_started = false;
    bool any_train = false;
    for (const Phase& p : phases) {
      switch (p.kind) {
        case PhaseKind::kTrain:
          if (model_started)
            throw ScriptError("train phase after the model is built; use add");
          for (const auto& k : known)
            if (k == p.labels.front())
              throw ScriptError("label '" + p.labels.front() + "' trained twice");
          known.push_back(p.labels.front());
          any_train = true;
          break;
        case PhaseKind::kAddClass:
          model_started = true;
          for (const auto& k : known)
            if (k == p.labels.front())
              throw ScriptError("add phase label '" + p.labels.front() + "' already trained");
          known.push_back(p.labels.front());
          break;
        case PhaseKind::kTest:
          model_started = true;
          for (const auto& l : p.labels) {
            bool found = false;
            for (const auto& k : known) found = found || k == l;
            if (!found) throw ScriptError("test phase references untrained label '" + l + "'");
          }
          break;
      }
    }
    if (!any_train) throw ScriptError("script has no train phase");
  }
};

// Streams one annotated trial through a fresh pipeline. The filters are fed
// from up to one window length of preceding context (rounded to whole shifts
// so window starts stay aligned to the trial start) and windows beginning
// before the trial are dropped; the IIR state is therefore settled by the
// time the first counted window closes.
inline std::vector<Window> stream_trial(const Recording& rec, const Trial& trial,
                                        const StreamConfig& cfg) {
  const std::uint32_t shift = static_cast<std::uint32_t>(cfg.window_shift);
  const std::uint32_t want_lead =
      ((static_cast<std::uint32_t>(cfg.window_len) + shift - 1) / shift) * shift;
  const std::uint32_t lead = std::min(want_lead, (trial.start / shift) * shift);

  StreamPipeline pipe(cfg);
  pipe.set_label(trial.label);
  std::vector<Window> all;
  std::vector<double> frame(static_cast<std::size_t>(cfg.channel_count));
  const std::uint64_t begin = trial.start - lead;
  for (std::uint64_t i = begin; i < trial.end; ++i) {
    for (int ch = 0; ch < cfg.channel_count; ++ch)
      frame[static_cast<std::size_t>(ch)] = static_cast<double>(rec.at(ch, i));
    pipe.push_frame(frame, all);
  }

  std::vector<Window> kept;
  kept.reserve(all.size());
  for (Window& w : all) {
    w.start_index += begin;
    if (w.start_index >= trial.start) kept.push_back(std::move(w));
  }
  return kept;
}

// Hands out a recording's trials per label, in order, each at most once.
class TrialCursor {
 public:
  explicit TrialCursor(const Recording& rec) : rec_(rec) {
    for (std::size_t i = 0; i < rec.trials.size(); ++i)
      by_name_[rec.trials[i].label.name].push_back(i);
  }

  std::vector<const Trial*> take(const std::string& label, int count) {
    auto it = by_name_.find(label);
    if (it == by_name_.end()) throw DataError("recording has no trials labeled '" + label + "'");
    auto& indices = it->second;
    std::size_t& cursor = cursor_[label];
    if (cursor + static_cast<std::size_t>(count) > indices.size())
      throw DataError("recording has only " + std::to_string(indices.size() - cursor) +
                      " remaining trials labeled '" + label + "', need " + std::to_string(count));
    std::vector<const Trial*> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back(&rec_.trials[indices[cursor++]]);
    return out;
  }

  void skip(const std::string& label, int count) {
    if (count > 0) take(label, count);
  }

 private:
  const Recording& rec_;
  std::map<std::string, std::vector<std::size_t>> by_name_;
  std::map<std::string, std::size_t> cursor_;
};

struct CollectedClass {
  MotionLabel label;
  std::vector<FeatureVector> features;
  std::vector<double> mean_abs;  // per-window mean absolute amplitude
};

inline CollectedClass collect_class(const Recording& rec, TrialCursor& cursor,
                                    const std::string& label, int trial_count,
                                    const StreamConfig& cfg) {
  CollectedClass out;
  const auto trials = cursor.take(label, trial_count);
  out.label = trials.front()->label;
  for (const Trial* t : trials) {
    for (Window& w : stream_trial(rec, *t, cfg)) {
      out.mean_abs.push_back(w.mean_abs());
      out.features.push_back(feature_vector(w));
    }
  }
  return out;
}

struct PhaseReport {
  PhaseKind kind = PhaseKind::kTrain;
  std::vector<std::string> labels;
  int trial_count = 0;
  std::uint64_t windows = 0;
  // Test phases only:
  double mc_percent = 0.0;
  double efficacy_percent = 0.0;
  std::vector<WindowOutcome> outcomes;
  ConfusionMatrix confusion;
};

// Streams and scores one test block: `trial_count` trials of every listed
// label through dsp -> features -> predict, with the speed estimate
// calibrated per target class.
inline PhaseReport run_test_phase(const PooledModel& model, const PropCalibration& calibration,
                                  const Recording& rec, TrialCursor& cursor,
                                  const std::vector<std::string>& labels, int trial_count,
                                  const StreamConfig& cfg, EfficacyMode mode) {
  PhaseReport pr;
  pr.kind = PhaseKind::kTest;
  pr.labels = labels;
  pr.trial_count = trial_count;
  for (const std::string& label : labels) {
    const auto trials = cursor.take(label, trial_count);
    for (const Trial* t : trials) {
      for (const Window& w : stream_trial(rec, *t, cfg)) {
        const MotionLabel predicted = model.predict(feature_vector(w));
        const double prop = proportional_speed(w, calibration.reference_for(t->label.id));
        pr.outcomes.emplace_back(predicted, t->label, prop);
      }
    }
  }
  pr.windows = pr.outcomes.size();
  if (pr.outcomes.empty()) throw DataError("test phase produced no windows");
  pr.mc_percent = motion_completion(pr.outcomes);
  pr.efficacy_percent = motion_efficacy(pr.outcomes, mode);
  std::vector<MotionLabel> model_labels;
  for (const auto& c : model.classes()) model_labels.push_back(c.label);
  pr.confusion = confusion(std::span<const WindowOutcome>(pr.outcomes), std::move(model_labels));
  return pr;
}

struct SessionResult {
  PooledModel model;
  PropCalibration calibration;
  std::vector<PhaseReport> phases;
  std::vector<std::string> warnings;
  EfficacyMode efficacy_mode = EfficacyMode::kLiteral;
};

// Replays a scripted protocol against a recording: train phases fit class
// statistics and build the initial pooled model, add phases extend it without
// refitting anything already learned, test phases stream windows through the
// dsp -> features -> predict path and score them.
inline SessionResult run_session(const SessionScript& script, const Recording& rec,
                                 const StreamConfig& cfg,
                                 EfficacyMode mode = EfficacyMode::kLiteral,
                                 PoolingMode pooling = PoolingMode::kSum) {
  script.validate();
  cfg.validate();
  rec.validate();
  if (rec.channel_count != cfg.channel_count)
    throw DimensionError("recording channel count does not match config");
  if (static_cast<double>(rec.sample_rate) != cfg.sample_rate)
    throw DataError("recording sample rate does not match config");

  SessionResult result;
  result.efficacy_mode = mode;
  if (cfg.bandpass.high_hz >= 0.5 * cfg.sample_rate)
    result.warnings.push_back("band-pass upper edge at or above Nyquist; clamped to " +
                              std::to_string(0.495 * cfg.sample_rate) + " Hz");
  TrialCursor cursor(rec);
  std::vector<ClassModel> initial;
  std::optional<PooledModel> model;
  const int d = cfg.channel_count * kFeaturesPerChannel;

  auto note_small_class = [&](const std::string& label, std::size_t windows) {
    if (windows < static_cast<std::size_t>(d + 1))
      result.warnings.push_back("class '" + label + "' has " + std::to_string(windows) +
                                " training windows (< d+1 = " + std::to_string(d + 1) +
                                "); ridge regularization is load-bearing");
  };

  auto ensure_built = [&]() {
    if (!model) {
      model = build_pooled(std::move(initial), pooling);
      initial.clear();
    }
  };

  for (const Phase& phase : script.phases) {
    switch (phase.kind) {
      case PhaseKind::kTrain: {
        PhaseReport pr;
        pr.kind = phase.kind;
        pr.labels = phase.labels;
        pr.trial_count = phase.trial_count;
        auto c = collect_class(rec, cursor, phase.labels.front(), phase.trial_count, cfg);
        pr.windows = c.features.size();
        note_small_class(phase.labels.front(), c.features.size());
        result.calibration.calibrate(c.label.id, c.mean_abs);
        initial.push_back(fit_class(c.features, c.label));
        result.phases.push_back(std::move(pr));
        break;
      }
      case PhaseKind::kAddClass: {
        PhaseReport pr;
        pr.kind = phase.kind;
        pr.labels = phase.labels;
        pr.trial_count = phase.trial_count;
        ensure_built();
        auto c = collect_class(rec, cursor, phase.labels.front(), phase.trial_count, cfg);
        pr.windows = c.features.size();
        note_small_class(phase.labels.front(), c.features.size());
        result.calibration.calibrate(c.label.id, c.mean_abs);
        model = add_class(*model, fit_class(c.features, c.label));
        result.phases.push_back(std::move(pr));
        break;
      }
      case PhaseKind::kTest: {
        ensure_built();
        result.phases.push_back(run_test_phase(*model, result.calibration, rec, cursor,
                                               phase.labels, phase.trial_count, cfg, mode));
        break;
      }
    }
  }

  ensure_built();
  result.model = std::move(*model);
  return result;
}

// --- report serialization ---------------------------------------------------

inline nlohmann::ordered_json confusion_json(const ConfusionMatrix& cm) {
  nlohmann::ordered_json j;
  j["labels"] = nlohmann::ordered_json::array();
  for (const auto& l : cm.labels()) j["labels"].push_back(l.name);
  auto counts = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < cm.size(); ++r) {
    auto row = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < cm.size(); ++c) row.push_back(cm.at(r, c));
    counts.push_back(std::move(row));
  }
  j["counts"] = std::move(counts);
  return j;
}

inline nlohmann::ordered_json phase_report_json(const PhaseReport& pr) {
  nlohmann::ordered_json j;
  switch (pr.kind) {
    case PhaseKind::kTrain:
      j["phase"] = "train";
      j["label"] = pr.labels.front();
      break;
    case PhaseKind::kAddClass:
      j["phase"] = "add";
      j["label"] = pr.labels.front();
      break;
    case PhaseKind::kTest:
      j["phase"] = "test";
      j["labels"] = pr.labels;
      break;
  }
  j["trials"] = pr.trial_count;
  j["windows"] = pr.windows;
  if (pr.kind == PhaseKind::kTest) {
    j["mc_percent"] = pr.mc_percent;
    j["efficacy_percent"] = pr.efficacy_percent;
    j["confusion"] = confusion_json(pr.confusion);
  }
  return j;
}

inline nlohmann::ordered_json model_summary_json(const PooledModel& model) {
  nlohmann::ordered_json classes = nlohmann::ordered_json::array();
  for (const auto& c : model.classes())
    classes.push_back({{"id", c.label.id}, {"name", c.label.name}, {"count", c.count}});
  return {{"dimension", model.dimension()}, {"ridge", model.ridge()},
          {"classes", std::move(classes)}};
}

inline nlohmann::ordered_json config_json(const StreamConfig& cfg) {
  return {{"sample_rate", cfg.sample_rate},
          {"channels", cfg.channel_count},
          {"window_len", cfg.window_len},
          {"window_shift", cfg.window_shift}};
}

inline nlohmann::ordered_json session_report(const SessionResult& result,
                                             const StreamConfig& cfg) {
  nlohmann::ordered_json j;
  j["config"] = config_json(cfg);
  j["efficacy_mode"] = efficacy_mode_name(result.efficacy_mode);
  j["phases"] = nlohmann::ordered_json::array();
  for (const auto& pr : result.phases) j["phases"].push_back(phase_report_json(pr));
  j["model"] = model_summary_json(result.model);
  if (!result.warnings.empty()) j["warnings"] = result.warnings;
  return j;
}

}  // namespace emgpr
