#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "emgpr/errors.hpp"
#include "emgpr/labels.hpp"
#include "emgpr/window.hpp"

namespace emgpr {

// Outcome of one analysis window: success indicator plus the volitional
// speed estimate that was in force.
struct WindowOutcome {
  int est = 0;       // 1 iff predicted == target
  double prop = 0.0; // [0, 1]
  MotionLabel predicted;
  MotionLabel target;

  WindowOutcome() = default;
  WindowOutcome(MotionLabel predicted_, MotionLabel target_, double prop_)
      : est(predicted_.id == target_.id ? 1 : 0),
        prop(std::clamp(prop_, 0.0, 1.0)),
        predicted(std::move(predicted_)),
        target(std::move(target_)) {}
};

enum class EfficacyMode { kLiteral, kSpeedWeighted };

inline const char* efficacy_mode_name(EfficacyMode m) {
  return m == EfficacyMode::kLiteral ? "literal" : "speed-weighted";
}

// Percentage of windows whose prediction matched the target.
inline double motion_completion(std::span<const WindowOutcome> outcomes) {
  if (outcomes.empty()) throw DataError("motion_completion: empty outcome list");
  std::uint64_t hits = 0;
  for (const auto& o : outcomes) hits += static_cast<std::uint64_t>(o.est);
  return 100.0 * static_cast<double>(hits) / static_cast<double>(outcomes.size());
}

// Amplitude-proportional speed: mean absolute window amplitude over the
// per-class calibration reference, clamped to [0, 1].
inline double proportional_speed(const Window& w, double reference) {
  if (!(reference > 0)) throw ConfigError("calibration reference must be positive");
  return std::clamp(w.mean_abs() / reference, 0.0, 1.0);
}

// Success rate restricted to windows with a usable speed estimate (literal
// mode; the formula's prop/prop ratio cancels), or the prop-weighted success
// mass over all windows (speed-weighted mode).
inline double motion_efficacy(std::span<const WindowOutcome> outcomes, EfficacyMode mode) {
  if (outcomes.empty()) throw DataError("motion_efficacy: empty outcome list");
  if (mode == EfficacyMode::kLiteral) {
    std::uint64_t hits = 0, usable = 0;
    for (const auto& o : outcomes) {
      if (o.prop > 0.0) {
        ++usable;
        hits += static_cast<std::uint64_t>(o.est);
      }
    }
    if (usable == 0) return 0.0;
    return 100.0 * static_cast<double>(hits) / static_cast<double>(usable);
  }
  double mass = 0.0;
  for (const auto& o : outcomes) mass += o.est * o.prop;
  return 100.0 * mass / static_cast<double>(outcomes.size());
}

// Rows = true label, columns = predicted label.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::vector<MotionLabel> labels) : labels_(std::move(labels)) {
    counts_.assign(labels_.size() * labels_.size(), 0);
    for (std::size_t i = 0; i < labels_.size(); ++i) index_[labels_[i].id] = i;
  }

  void add(const MotionLabel& target, const MotionLabel& predicted) {
    counts_[row(target.id) * labels_.size() + row(predicted.id)] += 1;
  }

  std::uint64_t at(std::size_t true_row, std::size_t pred_col) const {
    return counts_[true_row * labels_.size() + pred_col];
  }
  const std::vector<MotionLabel>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }

  std::uint64_t row_sum(std::size_t r) const {
    std::uint64_t s = 0;
    for (std::size_t c = 0; c < labels_.size(); ++c) s += at(r, c);
    return s;
  }
  std::uint64_t trace() const {
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < labels_.size(); ++i) s += at(i, i);
    return s;
  }
  std::uint64_t total() const {
    std::uint64_t s = 0;
    for (auto v : counts_) s += v;
    return s;
  }

  // Diagonal over row sum; rows with no windows report 0.
  std::vector<double> per_class_accuracy() const {
    std::vector<double> acc(labels_.size(), 0.0);
    for (std::size_t r = 0; r < labels_.size(); ++r) {
      const std::uint64_t n = row_sum(r);
      if (n > 0) acc[r] = static_cast<double>(at(r, r)) / static_cast<double>(n);
    }
    return acc;
  }

  // Header row of predicted labels, then one row per true label.
  std::string to_csv() const {
    std::ostringstream out;
    out << "true\\pred";
    for (const auto& l : labels_) out << ',' << l.name;
    out << '\n';
    for (std::size_t r = 0; r < labels_.size(); ++r) {
      out << labels_[r].name;
      for (std::size_t c = 0; c < labels_.size(); ++c) out << ',' << at(r, c);
      out << '\n';
    }
    return out.str();
  }

 private:
  std::size_t row(std::uint16_t id) const {
    auto it = index_.find(id);
    if (it == index_.end())
      throw DataError("confusion matrix: unknown label id " + std::to_string(id));
    return it->second;
  }

  std::vector<MotionLabel> labels_;
  std::vector<std::uint64_t> counts_;
  std::map<std::uint16_t, std::size_t> index_;
};

inline ConfusionMatrix confusion(std::span<const MotionLabel> targets,
                                 std::span<const MotionLabel> predictions,
                                 std::vector<MotionLabel> labels) {
  if (targets.size() != predictions.size())
    throw DimensionError("confusion: target/prediction length mismatch");
  ConfusionMatrix m(std::move(labels));
  for (std::size_t i = 0; i < targets.size(); ++i) m.add(targets[i], predictions[i]);
  return m;
}

inline ConfusionMatrix confusion(std::span<const WindowOutcome> outcomes,
                                 std::vector<MotionLabel> labels) {
  ConfusionMatrix m(std::move(labels));
  for (const auto& o : outcomes) m.add(o.target, o.predicted);
  return m;
}

// Per-class speed calibration: the reference amplitude is the 95th percentile
// (linear interpolation between order statistics) of the training windows'
// mean absolute amplitude for that class.
class PropCalibration {
 public:
  void set_reference(std::uint16_t label_id, double reference) {
    if (!(reference > 0)) throw ConfigError("calibration reference must be positive");
    refs_[label_id] = reference;
  }

  void calibrate(std::uint16_t label_id, std::vector<double> training_mean_abs) {
    if (training_mean_abs.empty())
      throw ConfigError("calibration needs at least one training window");
    std::sort(training_mean_abs.begin(), training_mean_abs.end());
    const double pos = 0.95 * static_cast<double>(training_mean_abs.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    double ref = training_mean_abs[lo];
    if (lo + 1 < training_mean_abs.size())
      ref += frac * (training_mean_abs[lo + 1] - training_mean_abs[lo]);
    if (!(ref > 0)) ref = 1e-12;  // silent training class: prop saturates instead of erroring
    refs_[label_id] = ref;
  }

  double reference_for(std::uint16_t label_id) const {
    auto it = refs_.find(label_id);
    if (it == refs_.end())
      throw ConfigError("no speed calibration for label id " + std::to_string(label_id));
    return it->second;
  }

  bool has(std::uint16_t label_id) const { return refs_.count(label_id) != 0; }
  const std::map<std::uint16_t, double>& references() const { return refs_; }

  // Sidecar text format: one `id value` pair per line, full precision.
  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open calibration file for writing: " + path);
    char buf[64];
    for (const auto& [id, ref] : refs_) {
      std::snprintf(buf, sizeof buf, "%u %.17g\n", static_cast<unsigned>(id), ref);
      out << buf;
    }
  }

  static PropCalibration load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open calibration file: " + path);
    PropCalibration c;
    unsigned id;
    double ref;
    while (in >> id >> ref) c.set_reference(static_cast<std::uint16_t>(id), ref);
    return c;
  }

 private:
  std::map<std::uint16_t, double> refs_;
};

}  // namespace emgpr
