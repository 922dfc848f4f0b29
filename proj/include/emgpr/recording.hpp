#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "emgpr/errors.hpp"
#include "emgpr/labels.hpp"

namespace emgpr {

// One labeled segment of a recording, [start, end) in samples.
struct Trial {
  std::uint32_t start = 0;
  std::uint32_t end = 0;
  MotionLabel label;
};

// Multi-channel sampled EMG with trial annotations. Samples are channel-major
// f32, matching the on-disk layout.
struct Recording {
  std::uint32_t sample_rate = 1000;
  std::uint16_t channel_count = 8;
  std::vector<float> samples;  // channel_count * n, channel-major
  std::vector<Trial> trials;

  std::uint64_t samples_per_channel() const {
    return channel_count == 0 ? 0 : samples.size() / channel_count;
  }

  float at(int ch, std::uint64_t i) const {
    return samples[static_cast<std::uint64_t>(ch) * samples_per_channel() + i];
  }
  float& at(int ch, std::uint64_t i) {
    return samples[static_cast<std::uint64_t>(ch) * samples_per_channel() + i];
  }

  void validate() const {
    const std::uint64_t n = samples_per_channel();
    if (samples.size() != static_cast<std::uint64_t>(channel_count) * n)
      throw DataError("recording: sample buffer is not channel_count * n");
    std::uint32_t prev_end = 0;
    for (std::size_t i = 0; i < trials.size(); ++i) {
      const Trial& t = trials[i];
      if (t.end <= t.start || t.end > n)
        throw DataError("recording: trial range out of bounds");
      if (i > 0 && t.start < prev_end)
        throw DataError("recording: trials overlap or are out of order");
      prev_end = t.end;
    }
  }
};

// Binary recording file, all fields little-endian:
//
//   "MYO1"  magic
//   u16     format version (1)
//   u32     sample rate
//   u16     channel count
//   u64     samples per channel
//   f32[]   samples, channel-major
//   u32     trial count
//   per trial: u32 start, u32 end, u16 label id,
//              u16 name byte length + UTF-8 name

inline constexpr char kRecordingMagic[4] = {'M', 'Y', 'O', '1'};
inline constexpr std::uint16_t kRecordingVersion = 1;

namespace detail {

template <typename T>
void rec_write(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T rec_read(std::istream& in, const char* what) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw DataError(std::string("truncated recording while reading ") + what);
  return v;
}

}  // namespace detail

inline void save_recording(const Recording& rec, std::ostream& out) {
  rec.validate();
  out.write(kRecordingMagic, 4);
  detail::rec_write<std::uint16_t>(out, kRecordingVersion);
  detail::rec_write<std::uint32_t>(out, rec.sample_rate);
  detail::rec_write<std::uint16_t>(out, rec.channel_count);
  detail::rec_write<std::uint64_t>(out, rec.samples_per_channel());
  out.write(reinterpret_cast<const char*>(rec.samples.data()),
            static_cast<std::streamsize>(rec.samples.size() * sizeof(float)));
  detail::rec_write<std::uint32_t>(out, static_cast<std::uint32_t>(rec.trials.size()));
  for (const Trial& t : rec.trials) {
    detail::rec_write<std::uint32_t>(out, t.start);
    detail::rec_write<std::uint32_t>(out, t.end);
    detail::rec_write<std::uint16_t>(out, t.label.id);
    if (t.label.name.size() > 0xFFFF) throw DataError("label name too long for format");
    detail::rec_write<std::uint16_t>(out, static_cast<std::uint16_t>(t.label.name.size()));
    out.write(t.label.name.data(), static_cast<std::streamsize>(t.label.name.size()));
  }
  if (!out) throw DataError("recording write failed");
}

inline Recording load_recording_binary(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kRecordingMagic, 4) != 0)
    throw DataError("not a recording file: bad magic");
  const auto version = detail::rec_read<std::uint16_t>(in, "version");
  if (version != kRecordingVersion)
    throw DataError("unsupported recording format version " + std::to_string(version));

  Recording rec;
  rec.sample_rate = detail::rec_read<std::uint32_t>(in, "sample rate");
  rec.channel_count = detail::rec_read<std::uint16_t>(in, "channel count");
  const auto n = detail::rec_read<std::uint64_t>(in, "sample count");
  if (rec.channel_count == 0) throw DataError("recording: zero channels");
  rec.samples.resize(static_cast<std::size_t>(n) * rec.channel_count);
  in.read(reinterpret_cast<char*>(rec.samples.data()),
          static_cast<std::streamsize>(rec.samples.size() * sizeof(float)));
  if (!in) throw DataError("truncated recording while reading samples");
  const auto ntrials = detail::rec_read<std::uint32_t>(in, "trial count");
  rec.trials.reserve(ntrials);
  for (std::uint32_t i = 0; i < ntrials; ++i) {
    Trial t;
    t.start = detail::rec_read<std::uint32_t>(in, "trial start");
    t.end = detail::rec_read<std::uint32_t>(in, "trial end");
    t.label.id = detail::rec_read<std::uint16_t>(in, "trial label id");
    const auto len = detail::rec_read<std::uint16_t>(in, "trial label name");
    t.label.name.resize(len);
    in.read(t.label.name.data(), len);
    if (!in) throw DataError("truncated recording while reading trial label name");
    rec.trials.push_back(std::move(t));
  }
  rec.validate();
  return rec;
}

// CSV interchange: header `t,ch0..chN,label`, one row per sample tick, values
// printed with 9 significant digits (round-trip exact for f32). The label
// column carries the trial's label name on samples inside a trial and is
// empty elsewhere; on load, trials are rebuilt from maximal same-label runs
// and ids are assigned in order of first appearance.
inline void save_recording_csv(const Recording& rec, std::ostream& out) {
  rec.validate();
  out << 't';
  for (int ch = 0; ch < rec.channel_count; ++ch) out << ",ch" << ch;
  out << ",label\n";
  const std::uint64_t n = rec.samples_per_channel();
  std::size_t trial_idx = 0;
  char buf[40];
  for (std::uint64_t i = 0; i < n; ++i) {
    while (trial_idx < rec.trials.size() && rec.trials[trial_idx].end <= i) ++trial_idx;
    out << i;
    for (int ch = 0; ch < rec.channel_count; ++ch) {
      std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(rec.at(ch, i)));
      out << ',' << buf;
    }
    out << ',';
    if (trial_idx < rec.trials.size() && rec.trials[trial_idx].start <= i &&
        i < rec.trials[trial_idx].end)
      out << rec.trials[trial_idx].label.name;
    out << '\n';
  }
  if (!out) throw DataError("recording CSV write failed");
}

inline Recording load_recording_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty CSV recording");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 3 || header.front() != "t" || header.back() != "label")
    throw DataError("CSV recording: expected header t,ch0..chN,label");
  const int channels = static_cast<int>(header.size()) - 2;

  Recording rec;
  rec.channel_count = static_cast<std::uint16_t>(channels);
  std::vector<std::vector<float>> cols(static_cast<std::size_t>(channels));
  std::vector<std::string> labels;  // per-sample label name, "" outside trials

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    if (!std::getline(ss, cell, ',')) throw DataError("CSV recording: short row");
    for (int ch = 0; ch < channels; ++ch) {
      if (!std::getline(ss, cell, ',')) throw DataError("CSV recording: short row");
      try {
        cols[static_cast<std::size_t>(ch)].push_back(std::stof(cell));
      } catch (const std::exception&) {
        throw DataError("CSV recording: bad sample value '" + cell + "'");
      }
    }
    if (!std::getline(ss, cell, ',')) cell.clear();
    labels.push_back(cell);
  }

  const std::size_t n = cols.empty() ? 0 : cols[0].size();
  rec.samples.resize(static_cast<std::size_t>(channels) * n);
  for (int ch = 0; ch < channels; ++ch)
    std::memcpy(rec.samples.data() + static_cast<std::size_t>(ch) * n,
                cols[static_cast<std::size_t>(ch)].data(), n * sizeof(float));

  std::map<std::string, std::uint16_t> ids;
  std::size_t i = 0;
  while (i < n) {
    if (labels[i].empty()) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && labels[j] == labels[i]) ++j;
    auto [it, inserted] = ids.try_emplace(labels[i], static_cast<std::uint16_t>(ids.size()));
    rec.trials.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                          {it->second, labels[i]}});
    i = j;
  }
  rec.validate();
  return rec;
}

inline bool has_csv_extension(const std::string& path) {
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
}

// Loads a recording, choosing the CSV reader for *.csv paths and the binary
// reader otherwise.
inline Recording load_recording(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open recording: " + path);
  return has_csv_extension(path) ? load_recording_csv(in) : load_recording_binary(in);
}

inline void save_recording(const Recording& rec, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open recording for writing: " + path);
  if (has_csv_extension(path))
    save_recording_csv(rec, out);
  else
    save_recording(rec, out);
}

}  // namespace emgpr
