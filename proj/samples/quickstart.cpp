// Minimal end-to-end walkthrough: synthesize a four-class set, train, extend
// the model by one class without retraining, and score a test block.

#include <cstdio>

#include "emgpr/emgpr.hpp"

int main() {
  using namespace emgpr;

  SynthSpec spec = default_synth_spec(/*seed=*/7);
  StreamConfig cfg;

  // Ten trials per class covering five of the default labels.
  std::vector<MotionLabel> labels(spec.classes.begin(), spec.classes.begin() + 5);
  const Recording rec = synth_generate(spec, default_trial_order(labels, 10));

  const SessionScript script = SessionScript::parse_text(
      "train rest 6\n"
      "train hand_close 6\n"
      "train hand_open 6\n"
      "train wrist_extension 6\n"
      "add wrist_flexion 6\n"
      "test rest,hand_close,hand_open,wrist_extension,wrist_flexion 4\n");

  const SessionResult result = run_session(script, rec, cfg);
  for (const PhaseReport& p : result.phases) {
    if (p.kind != PhaseKind::kTest) continue;
    std::printf("windows=%llu  motion completion=%.2f%%  efficacy=%.2f%%\n",
                static_cast<unsigned long long>(p.windows), p.mc_percent, p.efficacy_percent);
  }
  return 0;
}
