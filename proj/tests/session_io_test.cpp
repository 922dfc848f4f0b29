#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "emgpr/emgpr.hpp"
#include "test_support.hpp"

using namespace emgpr;
using namespace emgpr_test;

namespace {

// Small four-class synthetic set with amplitude rows a factor of ten apart.
SynthSpec tiny_spec(std::uint64_t seed = 5, int channels = 4) {
  SynthSpec spec;
  spec.seed = seed;
  spec.classes = {lbl(0, "alpha"), lbl(1, "beta"), lbl(2, "gamma"), lbl(3, "delta")};
  spec.amp_matrix.clear();
  for (int c = 0; c < 4; ++c)
    spec.amp_matrix.push_back(
        std::vector<double>(static_cast<std::size_t>(channels), 0.02 * std::pow(10.0, c)));
  spec.envelope = {100.0, 1300.0, 100.0};
  return spec;
}

Recording tiny_recording(int trials_per_class, std::uint64_t seed = 5) {
  const SynthSpec spec = tiny_spec(seed);
  return synth_generate(spec, default_trial_order(spec.classes, trials_per_class));
}

StreamConfig four_channel_config() {
  StreamConfig cfg;
  cfg.channel_count = 4;
  return cfg;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST(RecordingIo, BinaryRoundTripByteIdentical) {
  const Recording rec = tiny_recording(2);
  std::ostringstream first;
  save_recording(rec, first);
  std::istringstream in(first.str());
  const Recording loaded = load_recording_binary(in);
  std::ostringstream second;
  save_recording(loaded, second);
  EXPECT_EQ(first.str(), second.str());
  EXPECT_EQ(loaded.samples, rec.samples);
  ASSERT_EQ(loaded.trials.size(), rec.trials.size());
  for (std::size_t i = 0; i < rec.trials.size(); ++i) {
    EXPECT_EQ(loaded.trials[i].start, rec.trials[i].start);
    EXPECT_EQ(loaded.trials[i].end, rec.trials[i].end);
    EXPECT_EQ(loaded.trials[i].label, rec.trials[i].label);
  }
}

TEST(RecordingIo, BadFilesRaiseDistinctErrors) {
  const Recording rec = tiny_recording(1);
  std::ostringstream out;
  save_recording(rec, out);
  const std::string bytes = out.str();

  {
    std::istringstream in("NOPE");
    EXPECT_THROW(load_recording_binary(in), DataError);
  }
  {
    std::string v = bytes;
    v[4] = 42;
    std::istringstream in(v);
    EXPECT_THROW(load_recording_binary(in), DataError);
  }
  {
    std::istringstream in(bytes.substr(0, 40));
    EXPECT_THROW(load_recording_binary(in), DataError);
  }
  {
    std::istringstream in(bytes.substr(0, bytes.size() - 3));
    EXPECT_THROW(load_recording_binary(in), DataError);
  }
}

TEST(RecordingIo, ValidateRejectsBadTrialTables) {
  Recording rec = tiny_recording(1);
  rec.trials[0].end = rec.trials[0].start;
  EXPECT_THROW(rec.validate(), DataError);
  rec = tiny_recording(2);
  std::swap(rec.trials[0], rec.trials[1]);
  EXPECT_THROW(rec.validate(), DataError);
  rec = tiny_recording(1);
  rec.trials.back().end = static_cast<std::uint32_t>(rec.samples_per_channel()) + 5;
  EXPECT_THROW(rec.validate(), DataError);
}

TEST(RecordingIo, CsvMatchesBinary) {
  const Recording rec = tiny_recording(2);
  std::ostringstream csv;
  save_recording_csv(rec, csv);
  std::istringstream in(csv.str());
  const Recording from_csv = load_recording_csv(in);

  EXPECT_EQ(from_csv.channel_count, rec.channel_count);
  ASSERT_EQ(from_csv.samples.size(), rec.samples.size());
  EXPECT_EQ(from_csv.samples, rec.samples);  // %.9g is f32 round-trip exact
  ASSERT_EQ(from_csv.trials.size(), rec.trials.size());
  for (std::size_t i = 0; i < rec.trials.size(); ++i) {
    EXPECT_EQ(from_csv.trials[i].start, rec.trials[i].start);
    EXPECT_EQ(from_csv.trials[i].end, rec.trials[i].end);
    EXPECT_EQ(from_csv.trials[i].label.name, rec.trials[i].label.name);
  }
}

TEST(Synth, DeterministicForFixedSeed) {
  const Recording a = tiny_recording(3, 77);
  const Recording b = tiny_recording(3, 77);
  EXPECT_EQ(a.samples, b.samples);
  ASSERT_EQ(a.trials.size(), b.trials.size());
  const Recording c = tiny_recording(3, 78);
  EXPECT_NE(a.samples, c.samples);
}

TEST(Synth, RejectsDegenerateSpecs) {
  SynthSpec spec = tiny_spec();
  spec.amp_matrix[1] = spec.amp_matrix[0];
  EXPECT_THROW(synth_generate(spec, {0, 1}), ConfigError);

  spec = tiny_spec();
  spec.band.high_hz = 600;
  EXPECT_THROW(synth_generate(spec, {0, 1}), ConfigError);

  spec = tiny_spec();
  spec.envelope.hold_ms = 0;
  EXPECT_THROW(synth_generate(spec, {0, 1}), ConfigError);

  EXPECT_THROW(synth_generate(tiny_spec(), {9}), ConfigError);
  EXPECT_THROW(synth_generate(tiny_spec(), {}), ConfigError);
}

TEST(Synth, WideAmplitudeGapsYieldNearPerfectMc) {
  const Recording rec = tiny_recording(10);
  const SessionScript script = SessionScript::parse_text(
      "train alpha 6\ntrain beta 6\ntrain gamma 6\ntrain delta 6\n"
      "test alpha,beta,gamma,delta 4\n");
  const SessionResult r = run_session(script, rec, four_channel_config());
  EXPECT_GE(r.phases.back().mc_percent, 99.0);
}

TEST(Synth, SilentClassFlagsDegenerateWindowsAndCompletes) {
  // A zero amplitude row with no noise floor produces all-zero samples; the
  // relax gap keeps the replay lead-in clear of the active class, so every
  // silent window must come out degenerate with zeroed features.
  SynthSpec spec;
  spec.seed = 3;
  spec.classes = {lbl(0, "silent"), lbl(1, "active")};
  spec.amp_matrix = {{0.0, 0.0}, {1.0, 1.0}};
  spec.noise_floor = 0.0;
  spec.envelope = {100.0, 900.0, 100.0, 500.0};
  const Recording rec = synth_generate(spec, default_trial_order(spec.classes, 3));

  StreamConfig cfg;
  cfg.channel_count = 2;
  bool saw_degenerate = false;
  for (const Trial& t : rec.trials) {
    for (const Window& w : stream_trial(rec, t, cfg)) {
      const FeatureVector fv = feature_vector(w);
      if (t.label.id == 0) {
        EXPECT_TRUE(fv.degenerate);
        saw_degenerate = true;
        for (double v : fv.values) EXPECT_EQ(v, 0.0);
      }
    }
  }
  EXPECT_TRUE(saw_degenerate);

  const SessionScript script =
      SessionScript::parse_text("train silent 2\ntrain active 2\ntest silent,active 1\n");
  const SessionResult r = run_session(script, rec, cfg);
  EXPECT_EQ(r.phases.back().windows > 0, true);
}

TEST(Script, ParsesPhasesAndComments) {
  const SessionScript s = SessionScript::parse_text(
      "# protocol\n"
      "train rest 20\n"
      "train hand_open 20\n"
      "\n"
      "add hand_close 20\n"
      "test rest,hand_open,hand_close 10\n");
  ASSERT_EQ(s.phases.size(), 4u);
  EXPECT_EQ(s.phases[0].kind, PhaseKind::kTrain);
  EXPECT_EQ(s.phases[2].kind, PhaseKind::kAddClass);
  EXPECT_EQ(s.phases[3].kind, PhaseKind::kTest);
  EXPECT_EQ(s.phases[3].labels.size(), 3u);
  EXPECT_EQ(s.phases[3].trial_count, 10);
}

TEST(Script, RejectsMalformedProtocols) {
  EXPECT_THROW(SessionScript::parse_text("warmup rest 5\n"), ScriptError);
  EXPECT_THROW(SessionScript::parse_text("train rest\n"), ScriptError);
  EXPECT_THROW(SessionScript::parse_text("train rest 0\n"), ScriptError);
  EXPECT_THROW(SessionScript::parse_text("train rest 5\ntest rest,grip 2\n"), ScriptError);
  EXPECT_THROW(SessionScript::parse_text("train rest 5\nadd rest 5\n"), ScriptError);
  EXPECT_THROW(SessionScript::parse_text("train rest 5\ntrain rest 5\n"), ScriptError);
  EXPECT_THROW(
      SessionScript::parse_text("train rest 5\nadd grip 5\ntrain more 5\n"), ScriptError);
  EXPECT_THROW(SessionScript::parse_text("test rest 5\n"), ScriptError);
  EXPECT_THROW(SessionScript::parse_text("add rest 5\n"), ScriptError);
  EXPECT_THROW(SessionScript::parse_text("train rest,grip 5\n"), ScriptError);
}

TEST(Session, MismatchedDataRaises) {
  const Recording rec = tiny_recording(2);
  const SessionScript script =
      SessionScript::parse_text("train alpha 2\ntrain beta 2\ntest alpha 1\n");
  StreamConfig cfg;  // 8 channels, recording has 4
  EXPECT_THROW(run_session(script, rec, cfg), DimensionError);

  const SessionScript missing =
      SessionScript::parse_text("train alpha 2\ntrain nosuch 2\ntest alpha 1\n");
  EXPECT_THROW(run_session(missing, rec, four_channel_config()), DataError);

  const SessionScript too_many =
      SessionScript::parse_text("train alpha 20\ntrain beta 2\ntest alpha 1\n");
  EXPECT_THROW(run_session(too_many, rec, four_channel_config()), DataError);
}

TEST(Session, AddClassPreservesExistingStatistics) {
  const Recording rec = tiny_recording(8);
  const StreamConfig cfg = four_channel_config();

  const SessionResult base = run_session(
      SessionScript::parse_text("train alpha 5\ntrain beta 5\ntest alpha,beta 2\n"), rec, cfg);
  const SessionResult extended = run_session(
      SessionScript::parse_text(
          "train alpha 5\ntrain beta 5\nadd gamma 5\nadd delta 5\ntest alpha,beta 2\n"),
      rec, cfg);

  // Same trials consumed for the first two classes, so their statistics in
  // the extended model must be bit-identical to the base model's.
  ASSERT_EQ(extended.model.class_count(), 4u);
  for (std::size_t k = 0; k < 2; ++k) {
    const ClassModel& b = base.model.classes()[k];
    const ClassModel& e = extended.model.classes()[k];
    EXPECT_EQ(b.label, e.label);
    EXPECT_EQ(b.count, e.count);
    EXPECT_EQ(b.mean, e.mean);
    EXPECT_EQ(b.cov, e.cov);
  }
}

TEST(Session, IncrementalEqualsBatchEndToEnd) {
  const Recording rec = tiny_recording(8);
  const StreamConfig cfg = four_channel_config();

  const SessionResult inc = run_session(
      SessionScript::parse_text("train alpha 5\ntrain beta 5\nadd gamma 5\nadd delta 5\n"
                                "test alpha,beta,gamma,delta 3\n"),
      rec, cfg);
  const SessionResult batch = run_session(
      SessionScript::parse_text("train alpha 5\ntrain beta 5\ntrain gamma 5\ntrain delta 5\n"
                                "test alpha,beta,gamma,delta 3\n"),
      rec, cfg);

  EXPECT_EQ(inc.model.pooled_cov(), batch.model.pooled_cov());
  EXPECT_EQ(inc.model.ridge(), batch.model.ridge());
  EXPECT_EQ(phase_report_json(inc.phases.back()), phase_report_json(batch.phases.back()));
}

TEST(Session, ReportsAreDeterministic) {
  const Recording rec = tiny_recording(6);
  const StreamConfig cfg = four_channel_config();
  const char* text =
      "train alpha 3\ntrain beta 3\nadd gamma 3\ntest alpha,beta,gamma 2\n";
  const SessionResult a = run_session(SessionScript::parse_text(text), rec, cfg);
  const SessionResult b = run_session(SessionScript::parse_text(text), rec, cfg);
  EXPECT_EQ(session_report(a, cfg).dump(2), session_report(b, cfg).dump(2));
}

TEST(Session, TrainPlusTestMatchesScriptedSession) {
  const Recording rec = tiny_recording(8);
  const StreamConfig cfg = four_channel_config();

  const SessionResult scripted = run_session(
      SessionScript::parse_text("train alpha 5\ntrain beta 5\ntrain gamma 5\ntrain delta 5\n"
                                "test alpha,beta,gamma,delta 3\n"),
      rec, cfg);

  // Separate train and test passes over the same recording, the way the CLI
  // subcommands do it: fit first five trials per class, then test the next
  // three.
  TrialCursor train_cursor(rec);
  std::vector<ClassModel> classes;
  PropCalibration calib;
  for (const char* name : {"alpha", "beta", "gamma", "delta"}) {
    CollectedClass c = collect_class(rec, train_cursor, name, 5, cfg);
    calib.calibrate(c.label.id, c.mean_abs);
    classes.push_back(fit_class(c.features, c.label));
  }
  const PooledModel model = build_pooled(std::move(classes));

  TrialCursor test_cursor(rec);
  for (const char* name : {"alpha", "beta", "gamma", "delta"}) test_cursor.skip(name, 5);
  const PhaseReport test_phase =
      run_test_phase(model, calib, rec, test_cursor, {"alpha", "beta", "gamma", "delta"}, 3, cfg,
                     EfficacyMode::kLiteral);

  EXPECT_EQ(phase_report_json(test_phase), phase_report_json(scripted.phases.back()));
  EXPECT_EQ(model.pooled_cov(), scripted.model.pooled_cov());
}

TEST(FeatureCsv, HeaderAndRowShape) {
  SynthSpec spec = tiny_spec(9, 2);
  spec.classes = {lbl(0, "a"), lbl(1, "b")};
  spec.amp_matrix = {{0.05, 0.05}, {0.9, 0.9}};
  const Recording rec = synth_generate(spec, default_trial_order(spec.classes, 2));
  StreamConfig cfg;
  cfg.channel_count = 2;

  std::ostringstream out;
  dump_features_csv(rec, cfg, out);
  std::istringstream lines(out.str());
  std::string header;
  ASSERT_TRUE(std::getline(lines, header));
  EXPECT_EQ(header,
            "window_start,label,ch0_pap,ch0_zcap,ch0_mwl,ch0_dbm,ch1_pap,ch1_zcap,ch1_mwl,ch1_dbm");

  std::uint64_t expected = 0;
  for (const Trial& t : rec.trials)
    expected += expected_window_count(t.end - t.start, cfg.window_len, cfg.window_shift);
  std::uint64_t rows = 0;
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    ++rows;
    EXPECT_TRUE(line.find(",a,") != std::string::npos || line.find(",b,") != std::string::npos);
  }
  EXPECT_EQ(rows, expected);
}

TEST(Profile, ReportsAllStages) {
  const Recording rec = tiny_recording(4);
  const LatencyReport r = profile_latency(four_channel_config(), rec);
  EXPECT_GE(r.windows, 100u);
  EXPECT_GE(r.buffering_ms, 0.0);
  EXPECT_GE(r.filtering_ms, 0.0);
  EXPECT_GE(r.feature_ms, 0.0);
  EXPECT_GE(r.predict_ms, 0.0);
  EXPECT_EQ(r.window_ms, 200.0);
  EXPECT_EQ(r.shift_ms, 75.0);
}

TEST(Profile, TooShortRecordingThrows) {
  SynthSpec spec = tiny_spec(2);
  spec.envelope = {50.0, 400.0, 50.0};
  const Recording rec = synth_generate(spec, {0, 1});
  EXPECT_THROW(profile_latency(four_channel_config(), rec), DataError);
}

// --- command line interface --------------------------------------------------

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  const std::string out_path = temp_path("emgpr_cli_out.txt");
  const std::string cmd =
      std::string(EMGPR_CLI_PATH) + " " + args + " >" + out_path + " 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out_path);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

}  // namespace

TEST(Cli, ComplexityPrintsTableRow) {
  const CliResult r = run_cli("complexity --classifier lda --w 32");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("adds=32 muls=32 squares=0 roots=0"), std::string::npos);
}

TEST(Cli, NoArgumentsIsUsageError) {
  const CliResult r = run_cli("");
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.out.find("Usage"), std::string::npos);
}

TEST(Cli, UnknownSubcommandIsUsageError) {
  EXPECT_EQ(run_cli("frobnicate").exit_code, 1);
  EXPECT_EQ(run_cli("complexity --classifier lda --w 32 --bogus 1").exit_code, 1);
}

TEST(Cli, MissingDataIsDataError) {
  EXPECT_EQ(run_cli("features --data /nonexistent.myo").exit_code, 2);
  EXPECT_EQ(run_cli("test --model /nonexistent.myom --data /nonexistent.myo --labels a").exit_code,
            2);
}

TEST(Cli, SynthTrainTestSessionWorkflow) {
  const std::string rec = temp_path("emgpr_t.myo");
  const std::string model = temp_path("emgpr_t.myom");
  const std::string script = temp_path("emgpr_t.script");
  const std::string report1 = temp_path("emgpr_t_report1.json");
  const std::string report2 = temp_path("emgpr_t_report2.json");

  ASSERT_EQ(run_cli("synth --out " + rec +
                    " --seed 11 --trials 6 --labels rest,hand_open,hand_close,wrist_flexion")
                .exit_code,
            0);

  {
    std::ofstream s(script);
    s << "train rest 4\ntrain hand_open 4\ntrain hand_close 4\ntrain wrist_flexion 4\n"
      << "test rest,hand_open,hand_close,wrist_flexion 2\n";
  }
  ASSERT_EQ(run_cli("session --script " + script + " --data " + rec + " --out " + report1)
                .exit_code,
            0);

  ASSERT_EQ(run_cli("train --data " + rec +
                    " --labels rest,hand_open,hand_close,wrist_flexion --trials 4 --model " +
                    model)
                .exit_code,
            0);
  ASSERT_EQ(run_cli("test --model " + model + " --data " + rec +
                    " --labels rest,hand_open,hand_close,wrist_flexion --trials 2 --skip 4 "
                    "--out " +
                    report2)
                .exit_code,
            0);

  std::ifstream r1(report1), r2(report2);
  nlohmann::json j1, j2;
  r1 >> j1;
  r2 >> j2;
  EXPECT_EQ(j1["phases"].back(), j2["phases"][0]);
  EXPECT_EQ(j1["model"], j2["model"]);

  for (const std::string& p : {rec, model, model + ".calib", script, report1, report2})
    std::filesystem::remove(p);
}

TEST(Cli, AddClassExtendsSavedModel) {
  const std::string rec = temp_path("emgpr_a.myo");
  const std::string model = temp_path("emgpr_a.myom");
  const std::string extended = temp_path("emgpr_a_ext.myom");

  ASSERT_EQ(run_cli("synth --out " + rec +
                    " --seed 12 --trials 5 --labels rest,hand_open,hand_close")
                .exit_code,
            0);
  ASSERT_EQ(run_cli("train --data " + rec +
                    " --labels rest,hand_open --trials 3 --model " + model)
                .exit_code,
            0);
  ASSERT_EQ(run_cli("add-class --model " + model + " --data " + rec +
                    " --label hand_close --trials 3 --out " + extended)
                .exit_code,
            0);

  const PooledModel base = load_model(model);
  const PooledModel ext = load_model(extended);
  EXPECT_EQ(base.class_count(), 2u);
  EXPECT_EQ(ext.class_count(), 3u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(ext.classes()[k].mean, base.classes()[k].mean);
    EXPECT_EQ(ext.classes()[k].cov, base.classes()[k].cov);
  }

  for (const std::string& p :
       {rec, model, model + ".calib", extended, extended + ".calib"})
    std::filesystem::remove(p);
}

TEST(Cli, ConfusionCsvDump) {
  const std::string rec = temp_path("emgpr_c.myo");
  const std::string script = temp_path("emgpr_c.script");
  const std::string report = temp_path("emgpr_c_report.json");
  const std::string csv = temp_path("emgpr_c_confusion.csv");

  ASSERT_EQ(run_cli("synth --out " + rec + " --seed 13 --trials 4 --labels rest,hand_open")
                .exit_code,
            0);
  {
    std::ofstream s(script);
    s << "train rest 3\ntrain hand_open 3\ntest rest,hand_open 1\n";
  }
  ASSERT_EQ(run_cli("session --script " + script + " --data " + rec + " --out " + report +
                    " --confusion-csv " + csv)
                .exit_code,
            0);
  std::ifstream in(csv);
  std::string header;
  ASSERT_TRUE(std::getline(in, header));
  EXPECT_EQ(header, "true\\pred,rest,hand_open");

  for (const std::string& p : {rec, script, report, csv}) std::filesystem::remove(p);
}

TEST(Cli, DumpFiltersTwelveSignificantDigits) {
  const CliResult r = run_cli("dump-filters");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("# bandpass"), std::string::npos);
  EXPECT_NE(r.out.find("# notch"), std::string::npos);
  // Twelve significant digits: spot-check one stable coefficient string.
  EXPECT_NE(r.out.find("0.994876106264"), std::string::npos);
}
