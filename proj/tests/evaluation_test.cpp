#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "emgpr/metrics.hpp"
#include "test_support.hpp"

using namespace emgpr;
using namespace emgpr_test;

namespace {

std::vector<WindowOutcome> outcomes_from(const std::vector<int>& ests,
                                         const std::vector<double>& props) {
  std::vector<WindowOutcome> out;
  for (std::size_t i = 0; i < ests.size(); ++i) out.push_back(make_outcome(ests[i], props[i]));
  return out;
}

Window flat_window(double value, int channels = 2, int len = 10) {
  Window w;
  w.channel_count = channels;
  w.window_len = len;
  w.samples.assign(static_cast<std::size_t>(channels) * len, value);
  return w;
}

}  // namespace

TEST(MotionCompletion, AllSuccess) {
  const auto o = outcomes_from(std::vector<int>(30, 1), std::vector<double>(30, 1.0));
  EXPECT_DOUBLE_EQ(motion_completion(o), 100.0);
}

TEST(MotionCompletion, PartialSuccess) {
  std::vector<int> ests(30, 1);
  ests[4] = ests[17] = 0;
  const auto o = outcomes_from(ests, std::vector<double>(30, 1.0));
  EXPECT_DOUBLE_EQ(motion_completion(o), 100.0 * 28.0 / 30.0);
}

TEST(MotionCompletion, NoSuccess) {
  const auto o = outcomes_from(std::vector<int>(30, 0), std::vector<double>(30, 1.0));
  EXPECT_DOUBLE_EQ(motion_completion(o), 0.0);
}

TEST(MotionCompletion, EmptyListThrows) {
  EXPECT_THROW(motion_completion(std::vector<WindowOutcome>{}), DataError);
}

TEST(MotionCompletion, MonotoneInSuccesses) {
  std::mt19937_64 eng(50);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 5 + static_cast<int>(eng() % 40);
    std::vector<int> ests(static_cast<std::size_t>(n), 0);
    double prev = 0.0;
    for (int k = 0; k <= n; ++k) {
      if (k > 0) ests[static_cast<std::size_t>(k - 1)] = 1;
      const double mc =
          motion_completion(outcomes_from(ests, std::vector<double>(ests.size(), 0.5)));
      EXPECT_GE(mc, prev);
      EXPECT_GE(mc, 0.0);
      EXPECT_LE(mc, 100.0);
      prev = mc;
    }
  }
}

TEST(ProportionalSpeed, ReferenceEqualsAmplitude) {
  EXPECT_DOUBLE_EQ(proportional_speed(flat_window(0.4), 0.4), 1.0);
}

TEST(ProportionalSpeed, ZeroWindow) {
  EXPECT_DOUBLE_EQ(proportional_speed(flat_window(0.0), 0.4), 0.0);
}

TEST(ProportionalSpeed, ClampsAboveReference) {
  EXPECT_DOUBLE_EQ(proportional_speed(flat_window(0.8), 0.4), 1.0);
}

TEST(ProportionalSpeed, NonPositiveReferenceThrows) {
  EXPECT_THROW(proportional_speed(flat_window(0.5), 0.0), ConfigError);
  EXPECT_THROW(proportional_speed(flat_window(0.5), -1.0), ConfigError);
}

TEST(MotionEfficacy, FixtureLiteral) {
  const auto o = outcomes_from({1, 1, 0, 1}, {0.5, 1.0, 0.8, 0.25});
  EXPECT_DOUBLE_EQ(motion_efficacy(o, EfficacyMode::kLiteral), 75.0);
}

TEST(MotionEfficacy, FixtureSpeedWeighted) {
  const auto o = outcomes_from({1, 1, 0, 1}, {0.5, 1.0, 0.8, 0.25});
  EXPECT_DOUBLE_EQ(motion_efficacy(o, EfficacyMode::kSpeedWeighted), 43.75);
}

TEST(MotionEfficacy, PerfectRunIsHundredBothModes) {
  const auto o = outcomes_from(std::vector<int>(12, 1), std::vector<double>(12, 1.0));
  EXPECT_DOUBLE_EQ(motion_efficacy(o, EfficacyMode::kLiteral), 100.0);
  EXPECT_DOUBLE_EQ(motion_efficacy(o, EfficacyMode::kSpeedWeighted), 100.0);
}

TEST(MotionEfficacy, ZeroPropWindowsExcludedInLiteralMode) {
  const auto o = outcomes_from({1, 1}, {0.0, 1.0});
  EXPECT_DOUBLE_EQ(motion_efficacy(o, EfficacyMode::kLiteral), 100.0);
  EXPECT_DOUBLE_EQ(motion_efficacy(o, EfficacyMode::kSpeedWeighted), 50.0);
  const auto all_zero = outcomes_from({1, 1}, {0.0, 0.0});
  EXPECT_DOUBLE_EQ(motion_efficacy(all_zero, EfficacyMode::kLiteral), 0.0);
  EXPECT_THROW(motion_efficacy(std::vector<WindowOutcome>{}, EfficacyMode::kLiteral), DataError);
}

TEST(MotionEfficacy, OrderingInvariants) {
  std::mt19937_64 eng(51);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 1 + static_cast<int>(eng() % 50);
    std::vector<int> ests(static_cast<std::size_t>(n));
    std::vector<double> props(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      ests[static_cast<std::size_t>(i)] = eng() % 2;
      props[static_cast<std::size_t>(i)] = (eng() % 4 == 0) ? 0.0 : uniform01(eng);
    }
    const auto o = outcomes_from(ests, props);
    const double lit = motion_efficacy(o, EfficacyMode::kLiteral);
    const double sw = motion_efficacy(o, EfficacyMode::kSpeedWeighted);

    // Literal mode equals MC over the prop>0 subset, and speed weighting can
    // only lose mass.
    std::vector<WindowOutcome> usable;
    for (const auto& w : o)
      if (w.prop > 0) usable.push_back(w);
    if (!usable.empty()) {
      EXPECT_DOUBLE_EQ(lit, motion_completion(usable));
    }
    EXPECT_LE(sw, lit + 1e-12);
  }
}

TEST(Confusion, PerfectPredictionsAreDiagonal) {
  const std::vector<MotionLabel> labels{lbl(0, "a"), lbl(1, "b"), lbl(2, "c")};
  std::vector<MotionLabel> t, p;
  for (int i = 0; i < 9; ++i) {
    t.push_back(labels[static_cast<std::size_t>(i % 3)]);
    p.push_back(labels[static_cast<std::size_t>(i % 3)]);
  }
  const ConfusionMatrix m = confusion(t, p, labels);
  EXPECT_EQ(m.trace(), 9u);
  EXPECT_EQ(m.total(), 9u);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c)
      EXPECT_EQ(m.at(r, c), r == c ? 3u : 0u);
}

TEST(Confusion, SingleMistakeOffDiagonal) {
  const std::vector<MotionLabel> labels{lbl(0, "a"), lbl(1, "b")};
  const ConfusionMatrix m =
      confusion(std::vector<MotionLabel>{labels[0]}, std::vector<MotionLabel>{labels[1]}, labels);
  EXPECT_EQ(m.at(0, 1), 1u);
  EXPECT_EQ(m.trace(), 0u);
  EXPECT_EQ(m.total(), 1u);
}

TEST(Confusion, UnknownLabelThrows) {
  const std::vector<MotionLabel> labels{lbl(0, "a"), lbl(1, "b")};
  EXPECT_THROW(confusion(std::vector<MotionLabel>{lbl(9, "zz")},
                         std::vector<MotionLabel>{labels[0]}, labels),
               DataError);
}

TEST(Confusion, BalancedMacroAccuracyEqualsMc) {
  std::mt19937_64 eng(52);
  const std::vector<MotionLabel> labels{lbl(0, "a"), lbl(1, "b"), lbl(2, "c"), lbl(3, "d")};
  std::vector<WindowOutcome> outcomes;
  for (int i = 0; i < 400; ++i) {
    const MotionLabel& target = labels[static_cast<std::size_t>(i % 4)];  // balanced
    const MotionLabel& predicted =
        (eng() % 5 == 0) ? labels[eng() % 4] : target;
    outcomes.emplace_back(predicted, target, 1.0);
  }
  const ConfusionMatrix m = confusion(std::span<const WindowOutcome>(outcomes), labels);
  const auto acc = m.per_class_accuracy();
  double macro = 0.0;
  for (double a : acc) macro += a;
  macro = 100.0 * macro / static_cast<double>(acc.size());
  EXPECT_NEAR(macro, motion_completion(outcomes), 1e-9);
  EXPECT_DOUBLE_EQ(100.0 * static_cast<double>(m.trace()) / static_cast<double>(m.total()),
                   motion_completion(outcomes));
}

TEST(Confusion, CsvShape) {
  const std::vector<MotionLabel> labels{lbl(0, "rest"), lbl(1, "grip")};
  ConfusionMatrix m(labels);
  m.add(labels[0], labels[0]);
  m.add(labels[0], labels[1]);
  const std::string csv = m.to_csv();
  EXPECT_NE(csv.find("true\\pred,rest,grip\n"), std::string::npos);
  EXPECT_NE(csv.find("rest,1,1\n"), std::string::npos);
  EXPECT_NE(csv.find("grip,0,0\n"), std::string::npos);
}

TEST(WindowOutcomeType, EstDerivedFromLabels) {
  const WindowOutcome hit(lbl(3, "x"), lbl(3, "x"), 0.5);
  EXPECT_EQ(hit.est, 1);
  const WindowOutcome miss(lbl(3, "x"), lbl(4, "y"), 0.5);
  EXPECT_EQ(miss.est, 0);
  const WindowOutcome clamped(lbl(0, "x"), lbl(0, "x"), 1.7);
  EXPECT_EQ(clamped.prop, 1.0);
}

TEST(Calibration, PercentileInterpolation) {
  std::vector<double> values;
  for (int i = 1; i <= 100; ++i) values.push_back(static_cast<double>(i));
  PropCalibration c;
  c.calibrate(7, values);
  EXPECT_NEAR(c.reference_for(7), 95.05, 1e-12);
  EXPECT_THROW(c.reference_for(8), ConfigError);
}

TEST(Calibration, SaveLoadRoundTrip) {
  PropCalibration c;
  c.set_reference(0, 0.123456789012345);
  c.set_reference(11, 42.0);
  const std::string path =
      (std::filesystem::temp_directory_path() / "emgpr_calib_test.txt").string();
  c.save(path);
  const PropCalibration d = PropCalibration::load(path);
  EXPECT_EQ(d.reference_for(0), c.reference_for(0));
  EXPECT_EQ(d.reference_for(11), c.reference_for(11));
  std::filesystem::remove(path);
}
