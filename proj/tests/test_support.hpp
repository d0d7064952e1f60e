#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "gazelearn/aoi_geometry.hpp"
#include "gazelearn/lecture.hpp"

namespace gazelearn::testing {

inline std::filesystem::path data_dir() { return GAZELEARN_TEST_DATA_DIR; }

inline LectureDescriptor fixture_lecture() { return load_lecture_descriptor(data_dir() / "lecture.json"); }

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 gen{std::random_device{}()};
    path_ = std::filesystem::temp_directory_path() / ("gazelearn-test-" + std::to_string(gen()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct TraceShape {
  std::int64_t duration_ms = 180'000;
  std::vector<std::string> labels{"slides", "avatar", "window", "away"};
  double mean_run = 20.0;       // samples per label run
  double gap_probability = 0.002;  // chance of a tracking gap after a sample
  double invalid_probability = 0.01;
};

// Random labeled trace with jittered ~60 Hz timing, label runs, occasional
// long gaps and invalid samples. Built with <random> so it shares nothing
// with the library's simulator.
inline std::vector<LabeledSample> random_trace(std::uint64_t seed, const TraceShape& shape = {}) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> step(14, 19);
  std::uniform_int_distribution<int> long_gap(300, 2500);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, shape.labels.size() - 1);
  std::vector<LabeledSample> out;
  std::string label = shape.labels[pick(gen)];
  std::int64_t t = std::uniform_int_distribution<int>(0, 40)(gen);
  while (t < shape.duration_ms) {
    if (u01(gen) < 1.0 / shape.mean_run) label = shape.labels[pick(gen)];
    out.push_back(LabeledSample{t, label, u01(gen) >= shape.invalid_probability, std::nullopt});
    t += u01(gen) < shape.gap_probability ? long_gap(gen) : step(gen);
  }
  return out;
}

// Per-millisecond label of a sample stream under the documented dwell rules:
// sample i covers [t_i, min(t_{i+1}, t_i + clamp)), the rest up to t_{i+1} is
// "away", the last sample covers the lower-median interval (clamped), and
// invalid samples count as "away". Times before the first sample or after the
// last dwell map to "" (no data).
class MillisecondTimeline {
 public:
  MillisecondTimeline(const std::vector<LabeledSample>& samples, std::int64_t clamp_ms, std::int64_t horizon_ms)
      : labels_(static_cast<std::size_t>(horizon_ms)) {
    std::vector<std::int64_t> gaps;
    for (std::size_t i = 1; i < samples.size(); ++i) gaps.push_back(samples[i].t_ms - samples[i - 1].t_ms);
    std::sort(gaps.begin(), gaps.end());
    const std::int64_t last = gaps.empty() ? 17 : std::min(gaps[(gaps.size() - 1) / 2], clamp_ms);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const std::int64_t start = samples[i].t_ms;
      const std::int64_t next = i + 1 < samples.size() ? samples[i + 1].t_ms : start + last;
      const std::string label = samples[i].valid ? samples[i].label : "away";
      for (std::int64_t t = start; t < next && t < horizon_ms; ++t) {
        labels_[static_cast<std::size_t>(t)] = (t - start < clamp_ms) ? label : "away";
      }
    }
  }

  double coverage(std::int64_t from, std::int64_t to, const std::vector<std::string>& learning) const {
    std::int64_t hits = 0;
    for (std::int64_t t = from; t < to; ++t) {
      const auto& l = labels_[static_cast<std::size_t>(t)];
      if (std::find(learning.begin(), learning.end(), l) != learning.end()) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(to - from);
  }

 private:
  std::vector<std::string> labels_;
};

// Label transitions between consecutive valid-adjusted samples, located at
// the later sample's time, counting a gap's away run as its own label.
inline int naive_transitions(const std::vector<LabeledSample>& samples, std::int64_t clamp_ms, std::int64_t from,
                             std::int64_t to) {
  std::vector<std::pair<std::int64_t, std::string>> runs;  // (start, label) run-length encoded
  auto push = [&](std::int64_t t, const std::string& label) {
    if (runs.empty() || runs.back().second != label) runs.emplace_back(t, label);
  };
  for (std::size_t i = 0; i < samples.size(); ++i) {
    push(samples[i].t_ms, samples[i].valid ? samples[i].label : "away");
    if (i + 1 < samples.size() && samples[i + 1].t_ms - samples[i].t_ms > clamp_ms) {
      push(samples[i].t_ms + clamp_ms, "away");
    }
  }
  int count = 0;
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (runs[i].first >= from && runs[i].first < to) ++count;
  }
  return count;
}

}  // namespace gazelearn::testing
