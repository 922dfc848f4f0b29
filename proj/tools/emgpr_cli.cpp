// Command-line front end: synthesis, feature dumps, training, incremental
// class extension, testing, scripted sessions, latency profiling, operation
// counts, and filter coefficient dumps.
//
// Exit codes: 0 success, 1 usage error, 2 data/model error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "emgpr/emgpr.hpp"

namespace {

using namespace emgpr;

std::vector<std::string> split_labels(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string one;
  while (std::getline(ss, one, ','))
    if (!one.empty()) out.push_back(one);
  return out;
}

StreamConfig config_from(const std::string& path) {
  return path.empty() ? StreamConfig{} : load_config(path);
}

EfficacyMode efficacy_from(const std::string& name) {
  if (name == "literal") return EfficacyMode::kLiteral;
  if (name == "speed-weighted") return EfficacyMode::kSpeedWeighted;
  throw ConfigError("efficacy mode must be literal or speed-weighted");
}

PoolingMode pooling_from(const std::string& name) {
  if (name == "sum") return PoolingMode::kSum;
  if (name == "weighted") return PoolingMode::kWeighted;
  throw ConfigError("pooling must be sum or weighted");
}

std::string calibration_path(const std::string& model_path) { return model_path + ".calib"; }

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open output file: " + path);
  out << text;
}

void print_cascade(const char* name, const BiquadCascade& cascade) {
  std::printf("# %s (b0 b1 b2 a1 a2, one section per line)\n", name);
  for (const BiquadSection& s : cascade.sections())
    std::printf("%.12g %.12g %.12g %.12g %.12g\n", s.b0, s.b1, s.b2, s.a1, s.a2);
}

void dump_filters(const StreamConfig& cfg) {
  bool clamped = false;
  const BiquadCascade bp = design_bandpass(cfg.sample_rate, cfg.bandpass.low_hz,
                                           cfg.bandpass.high_hz, cfg.bandpass.order, &clamped);
  if (clamped)
    std::fprintf(stderr,
                 "warning: band-pass upper edge clamped to %.6g Hz (below Nyquist)\n",
                 0.495 * cfg.sample_rate);
  print_cascade("bandpass", bp);
  print_cascade("notch", design_notch(cfg.sample_rate, cfg.notch.center_hz, cfg.notch.q));
}

// Fits one class per label from the recording, starting `skip` trials into
// each label's sequence.
struct FitResult {
  std::vector<ClassModel> classes;
  PropCalibration calibration;
  std::vector<PhaseReport> phases;
};

FitResult fit_labels(const Recording& rec, TrialCursor& cursor,
                     const std::vector<std::string>& labels, int trials, const StreamConfig& cfg) {
  FitResult out;
  const int d = cfg.channel_count * kFeaturesPerChannel;
  for (const std::string& label : labels) {
    CollectedClass c = collect_class(rec, cursor, label, trials, cfg);
    if (c.features.size() < static_cast<std::size_t>(d + 1))
      std::fprintf(stderr, "warning: class '%s' has %zu training windows (< d+1 = %d)\n",
                   label.c_str(), c.features.size(), d + 1);
    out.calibration.calibrate(c.label.id, c.mean_abs);
    PhaseReport pr;
    pr.kind = PhaseKind::kTrain;
    pr.labels = {label};
    pr.trial_count = trials;
    pr.windows = c.features.size();
    out.phases.push_back(std::move(pr));
    out.classes.push_back(fit_class(c.features, c.label));
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Real-time EMG pattern recognition: streaming DSP front end, time-derivative "
               "moment features, and an incrementally extensible LDA classifier"};
  app.require_subcommand(0, 1);
  bool top_dump_filters = false;
  std::string top_config;
  app.add_flag("--dump-filters", top_dump_filters,
               "Print designed filter coefficients and exit");
  app.add_option("--config", top_config, "Stream config file (key = value lines)");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic EMG recording");
  std::string synth_out, synth_config, synth_labels;
  std::uint64_t synth_seed = 42;
  int synth_trials = 30;
  synth->add_option("--out", synth_out, "Output recording (.csv for CSV, binary otherwise)")
      ->required();
  synth->add_option("--seed", synth_seed, "RNG seed");
  synth->add_option("--trials", synth_trials, "Trials per class");
  synth->add_option("--labels", synth_labels, "Comma-separated subset of the default label set");
  synth->add_option("--config", synth_config, "Stream config file");

  // features
  auto* features = app.add_subcommand("features", "Dump per-window features as CSV");
  std::string feat_data, feat_out, feat_config;
  features->add_option("--data", feat_data, "Input recording")->required();
  features->add_option("--out", feat_out, "Output CSV (default stdout)");
  features->add_option("--config", feat_config, "Stream config file");

  // train
  auto* train = app.add_subcommand("train", "Fit the initial classes and write a model");
  std::string train_data, train_model, train_labels, train_config, train_pooling = "sum";
  int train_trials = 20;
  train->add_option("--data", train_data, "Input recording")->required();
  train->add_option("--model", train_model, "Output model path")->required();
  train->add_option("--labels", train_labels, "Comma-separated class labels")->required();
  train->add_option("--trials", train_trials, "Trials per class");
  train->add_option("--pooling", train_pooling, "Covariance pooling: sum | weighted");
  train->add_option("--config", train_config, "Stream config file");

  // add-class
  auto* add = app.add_subcommand("add-class", "Extend a model with one new class");
  std::string add_data, add_model, add_out, add_label, add_config;
  int add_trials = 20, add_skip = 0;
  add->add_option("--model", add_model, "Input model path")->required();
  add->add_option("--out", add_out, "Output model path (default: overwrite input)");
  add->add_option("--data", add_data, "Input recording")->required();
  add->add_option("--label", add_label, "New class label")->required();
  add->add_option("--trials", add_trials, "Trials for the new class");
  add->add_option("--skip", add_skip, "Trials to skip first for that label");
  add->add_option("--config", add_config, "Stream config file");

  // test
  auto* test = app.add_subcommand("test", "Score a test block against a model");
  std::string test_data, test_model, test_labels, test_config, test_out, test_mode = "literal";
  int test_trials = 10, test_skip = 0;
  test->add_option("--model", test_model, "Model path")->required();
  test->add_option("--data", test_data, "Input recording")->required();
  test->add_option("--labels", test_labels, "Comma-separated labels to test")->required();
  test->add_option("--trials", test_trials, "Trials per label");
  test->add_option("--skip", test_skip, "Trials to skip first per label (e.g. those trained on)");
  test->add_option("--efficacy-mode", test_mode, "literal | speed-weighted");
  test->add_option("--out", test_out, "Report path (default stdout)");
  std::string test_confusion_csv;
  test->add_option("--confusion-csv", test_confusion_csv, "Also dump the confusion matrix as CSV");
  test->add_option("--config", test_config, "Stream config file");

  // session
  auto* session = app.add_subcommand("session", "Replay a scripted train/add/test session");
  std::string sess_script, sess_data, sess_out, sess_config, sess_mode = "literal",
              sess_pooling = "sum", sess_model_out;
  bool sess_timing = false;
  session->add_option("--script", sess_script, "Session script file")->required();
  session->add_option("--data", sess_data, "Input recording")->required();
  session->add_option("--out", sess_out, "Report path (default stdout)");
  session->add_option("--model", sess_model_out, "Also save the final model here");
  session->add_option("--efficacy-mode", sess_mode, "literal | speed-weighted");
  session->add_option("--pooling", sess_pooling, "Covariance pooling: sum | weighted");
  session->add_flag("--timing", sess_timing,
                    "Append wall-clock timing (makes the report non-reproducible)");
  std::string sess_confusion_csv;
  session->add_option("--confusion-csv", sess_confusion_csv,
                      "Dump the last test phase's confusion matrix as CSV");
  session->add_option("--config", sess_config, "Stream config file");

  // profile
  auto* profile = app.add_subcommand("profile", "Measure per-stage latency on a recording");
  std::string prof_data, prof_config, prof_out;
  profile->add_option("--data", prof_data, "Input recording")->required();
  profile->add_option("--out", prof_out, "Report path (default stdout)");
  profile->add_option("--config", prof_config, "Stream config file");

  // complexity
  auto* complexity = app.add_subcommand("complexity", "Per-decision operation counts");
  std::string cx_kind = "lda";
  long long cx_w = 32;
  std::optional<long long> cx_q, cx_s;
  complexity->add_option("--classifier", cx_kind, "lda|qda|svm-linear|svm-quadratic|knn");
  complexity->add_option("--w", cx_w, "Feature dimension W");
  complexity->add_option("--q", cx_q, "Support vector count Q (SVM kinds)");
  complexity->add_option("--s", cx_s, "Training sample count S (k-NN)");

  // dump-filters
  auto* dumpf = app.add_subcommand("dump-filters", "Print designed filter coefficients");
  std::string dumpf_config;
  dumpf->add_option("--config", dumpf_config, "Stream config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      std::cout << app.help();
      return 0;
    }
    std::cerr << e.what() << "\n\n" << app.help();
    return 1;
  }

  if (app.get_subcommands().empty() && !top_dump_filters) {
    std::cerr << app.help();
    return 1;
  }

  try {
    if (top_dump_filters) {
      dump_filters(config_from(top_config));
      return 0;
    }

    if (synth->parsed()) {
      const StreamConfig cfg = config_from(synth_config);
      SynthSpec spec = default_synth_spec(synth_seed);
      if (!synth_labels.empty()) {
        const auto want = split_labels(synth_labels);
        SynthSpec filtered = spec;
        filtered.classes.clear();
        filtered.amp_matrix.clear();
        for (const std::string& name : want) {
          bool found = false;
          for (std::size_t i = 0; i < spec.classes.size(); ++i) {
            if (spec.classes[i].name == name) {
              filtered.classes.push_back(spec.classes[i]);
              filtered.amp_matrix.push_back(spec.amp_matrix[i]);
              found = true;
            }
          }
          if (!found) throw ConfigError("unknown label '" + name + "'");
        }
        spec = std::move(filtered);
      }
      const Recording rec =
          synth_generate(spec, default_trial_order(spec.classes, synth_trials), cfg.sample_rate);
      save_recording(rec, synth_out);
      return 0;
    }

    if (features->parsed()) {
      const StreamConfig cfg = config_from(feat_config);
      const Recording rec = load_recording(feat_data);
      std::ostringstream csv;
      dump_features_csv(rec, cfg, csv);
      write_text(feat_out, csv.str());
      return 0;
    }

    if (train->parsed()) {
      const StreamConfig cfg = config_from(train_config);
      const Recording rec = load_recording(train_data);
      TrialCursor cursor(rec);
      FitResult fit = fit_labels(rec, cursor, split_labels(train_labels), train_trials, cfg);
      const PooledModel model = build_pooled(std::move(fit.classes), pooling_from(train_pooling));
      save_model(model, train_model);
      fit.calibration.save(calibration_path(train_model));
      return 0;
    }

    if (add->parsed()) {
      const StreamConfig cfg = config_from(add_config);
      const Recording rec = load_recording(add_data);
      const PooledModel model = load_model(add_model);
      PropCalibration calib = PropCalibration::load(calibration_path(add_model));
      TrialCursor cursor(rec);
      cursor.skip(add_label, add_skip);
      CollectedClass c = collect_class(rec, cursor, add_label, add_trials, cfg);
      calib.calibrate(c.label.id, c.mean_abs);
      const PooledModel extended = add_class(model, fit_class(c.features, c.label));
      const std::string out_path = add_out.empty() ? add_model : add_out;
      save_model(extended, out_path);
      calib.save(calibration_path(out_path));
      return 0;
    }

    if (test->parsed()) {
      const StreamConfig cfg = config_from(test_config);
      const Recording rec = load_recording(test_data);
      const PooledModel model = load_model(test_model);
      const PropCalibration calib = PropCalibration::load(calibration_path(test_model));
      const EfficacyMode mode = efficacy_from(test_mode);
      TrialCursor cursor(rec);
      const auto labels = split_labels(test_labels);
      for (const std::string& l : labels) cursor.skip(l, test_skip);
      const PhaseReport pr =
          run_test_phase(model, calib, rec, cursor, labels, test_trials, cfg, mode);
      nlohmann::ordered_json j;
      j["config"] = config_json(cfg);
      j["efficacy_mode"] = efficacy_mode_name(mode);
      j["phases"] = nlohmann::ordered_json::array({phase_report_json(pr)});
      j["model"] = model_summary_json(model);
      write_text(test_out, j.dump(2) + "\n");
      if (!test_confusion_csv.empty()) write_text(test_confusion_csv, pr.confusion.to_csv());
      return 0;
    }

    if (session->parsed()) {
      const StreamConfig cfg = config_from(sess_config);
      const Recording rec = load_recording(sess_data);
      const SessionScript script = SessionScript::parse_file(sess_script);
      const auto t0 = std::chrono::steady_clock::now();
      const SessionResult result =
          run_session(script, rec, cfg, efficacy_from(sess_mode), pooling_from(sess_pooling));
      const auto t1 = std::chrono::steady_clock::now();
      nlohmann::ordered_json j = session_report(result, cfg);
      if (sess_timing)
        j["timing"] = {{"session_wall_ms",
                        std::chrono::duration<double, std::milli>(t1 - t0).count()}};
      for (const std::string& w : result.warnings)
        std::fprintf(stderr, "warning: %s\n", w.c_str());
      write_text(sess_out, j.dump(2) + "\n");
      if (!sess_confusion_csv.empty()) {
        for (auto it = result.phases.rbegin(); it != result.phases.rend(); ++it) {
          if (it->kind == PhaseKind::kTest) {
            write_text(sess_confusion_csv, it->confusion.to_csv());
            break;
          }
        }
      }
      if (!sess_model_out.empty()) {
        save_model(result.model, sess_model_out);
        result.calibration.save(calibration_path(sess_model_out));
      }
      return 0;
    }

    if (profile->parsed()) {
      const StreamConfig cfg = config_from(prof_config);
      const Recording rec = load_recording(prof_data);
      const LatencyReport r = profile_latency(cfg, rec);
      write_text(prof_out, latency_report_json(r).dump(2) + "\n");
      return 0;
    }

    if (complexity->parsed()) {
      const OpCounts c = complexity_report(classifier_kind_from_name(cx_kind), cx_w, cx_q, cx_s);
      std::printf("adds=%lld muls=%lld squares=%lld roots=%lld\n", c.adds, c.muls, c.squares,
                  c.roots);
      return 0;
    }

    if (dumpf->parsed()) {
      dump_filters(config_from(dumpf_config));
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  std::cerr << app.help();
  return 1;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
