#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "emgpr/errors.hpp"

namespace emgpr {

struct BandpassSpec {
  double low_hz = 10.0;
  double high_hz = 450.0;
  int order = 3;
};

struct NotchSpec {
  double center_hz = 50.0;
  double q = 30.0;
};

// Acquisition and windowing parameters for one streaming session.
// Window length and shift are in samples (200 / 75 samples = 200 ms / 75 ms
// at the default 1000 SPS).
struct StreamConfig {
  double sample_rate = 1000.0;
  int channel_count = 8;
  int window_len = 200;
  int window_shift = 75;
  BandpassSpec bandpass;
  NotchSpec notch;

  double window_len_ms() const { return 1000.0 * window_len / sample_rate; }
  double window_shift_ms() const { return 1000.0 * window_shift / sample_rate; }

  void validate() const {
    if (sample_rate <= 0) throw ConfigError("sample_rate must be positive");
    if (channel_count < 1) throw ConfigError("channel_count must be >= 1");
    if (window_shift < 1) throw ConfigError("window_shift must be >= 1");
    if (window_shift > window_len)
      throw ConfigError("window_shift must not exceed window_len");
    if (window_len < 3) throw ConfigError("window_len must be >= 3");
    if (!(bandpass.low_hz > 0) || !(bandpass.high_hz > bandpass.low_hz))
      throw ConfigError("band edges must satisfy 0 < low < high");
    if (bandpass.order < 1) throw ConfigError("bandpass order must be >= 1");
    if (!(notch.center_hz > 0) || notch.center_hz >= 0.5 * sample_rate)
      throw ConfigError("notch center must lie in (0, sample_rate/2)");
    if (!(notch.q > 0)) throw ConfigError("notch q must be positive");
  }
};

namespace detail {

inline double parse_number(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    double v = std::stod(value, &pos);
    while (pos < value.size() && std::isspace(static_cast<unsigned char>(value[pos]))) ++pos;
    if (pos != value.size()) throw ConfigError("trailing junk");
    return v;
  } catch (const ConfigError&) {
    throw ConfigError("config: bad numeric value for '" + key + "': " + value);
  } catch (const std::exception&) {
    throw ConfigError("config: bad numeric value for '" + key + "': " + value);
  }
}

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

// Flat `key = value` config text. Unknown keys are rejected so typos do not
// silently fall back to defaults. Window sizes are given in milliseconds and
// converted against the configured rate.
inline StreamConfig parse_config(std::istream& in) {
  StreamConfig cfg;
  double window_len_ms = cfg.window_len_ms();
  double window_shift_ms = cfg.window_shift_ms();

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = detail::trim(line);
    if (s.empty() || s[0] == '#') continue;
    std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = detail::trim(s.substr(0, eq));
    std::string value = detail::trim(s.substr(eq + 1));
    double v = detail::parse_number(key, value);

    if (key == "sample_rate") cfg.sample_rate = v;
    else if (key == "channels") cfg.channel_count = static_cast<int>(v);
    else if (key == "window_len_ms") window_len_ms = v;
    else if (key == "window_shift_ms") window_shift_ms = v;
    else if (key == "bp_low_hz") cfg.bandpass.low_hz = v;
    else if (key == "bp_high_hz") cfg.bandpass.high_hz = v;
    else if (key == "bp_order") cfg.bandpass.order = static_cast<int>(v);
    else if (key == "notch_hz") cfg.notch.center_hz = v;
    else if (key == "notch_q") cfg.notch.q = v;
    else throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }

  cfg.window_len = static_cast<int>(std::llround(window_len_ms * cfg.sample_rate / 1000.0));
  cfg.window_shift = static_cast<int>(std::llround(window_shift_ms * cfg.sample_rate / 1000.0));
  cfg.validate();
  return cfg;
}

inline StreamConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  return parse_config(in);
}

}  // namespace emgpr
