#include "gazelearn/attention_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace gazelearn {
namespace {

constexpr std::int64_t kMinuteMs = 60'000;

bool is_learning(const std::string& label, std::span<const std::string> learning_labels) {
  return std::find(learning_labels.begin(), learning_labels.end(), label) != learning_labels.end();
}

std::int64_t median_interval(std::span<const LabeledSample> samples, const EngineConfig& config) {
  if (samples.size() < 2) {
    return std::max<std::int64_t>(1, std::llround(1000.0 / config.nominal_rate_hz));
  }
  std::vector<std::int64_t> gaps;
  gaps.reserve(samples.size() - 1);
  for (std::size_t i = 1; i < samples.size(); ++i) {
    gaps.push_back(samples[i].t_ms - samples[i - 1].t_ms);
  }
  // Lower median keeps the value an observed interval.
  auto mid = gaps.begin() + static_cast<std::ptrdiff_t>((gaps.size() - 1) / 2);
  std::nth_element(gaps.begin(), mid, gaps.end());
  return *mid;
}

void append_segment(std::vector<DwellSegment>& out, const std::string& label, std::int64_t start,
                    std::int64_t end) {
  if (end <= start) {
    return;
  }
  if (!out.empty() && out.back().label == label && out.back().end_ms == start) {
    out.back().end_ms = end;
    return;
  }
  out.push_back(DwellSegment{label, start, end});
}

std::vector<DwellSegment> debounce(std::vector<DwellSegment> raw, std::int64_t debounce_ms) {
  if (debounce_ms <= 0 || raw.size() < 2) {
    return raw;
  }
  std::vector<DwellSegment> out;
  out.reserve(raw.size());
  for (auto& seg : raw) {
    if (out.empty()) {
      out.push_back(std::move(seg));
      continue;
    }
    if (seg.length_ms() < debounce_ms || seg.label == out.back().label) {
      out.back().end_ms = seg.end_ms;
      continue;
    }
    // A short leading run has nothing before it to absorb it; hand it forward.
    if (out.size() == 1 && out.front().length_ms() < debounce_ms) {
      seg.start_ms = out.front().start_ms;
      out.front() = std::move(seg);
      continue;
    }
    out.push_back(std::move(seg));
  }
  return out;
}

}  // namespace

std::vector<DwellSegment> build_dwell_segments(std::span<const LabeledSample> samples,
                                               const EngineConfig& config, std::int64_t debounce_ms) {
  if (samples.empty()) {
    throw Error(ErrorCode::empty_trace, "cannot build dwell segments from an empty trace");
  }
  const std::int64_t last_dwell = std::min(median_interval(samples, config), config.gap_clamp_ms);
  std::vector<DwellSegment> raw;
  raw.reserve(samples.size() / 8 + 4);
  const std::string away(kAwayLabel);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    const std::int64_t start = s.t_ms;
    const std::int64_t next = (i + 1 < samples.size()) ? samples[i + 1].t_ms : start + last_dwell;
    if (next <= start) {
      throw Error(ErrorCode::invalid_argument, "samples must be strictly ordered by t_ms");
    }
    const std::int64_t dwell_end = std::min(next, start + config.gap_clamp_ms);
    append_segment(raw, s.valid ? s.label : away, start, dwell_end);
    append_segment(raw, away, dwell_end, next);
  }
  return debounce(std::move(raw), debounce_ms);
}

std::vector<DwellSegment> build_dwell_segments(std::span<const LabeledSample> samples,
                                               const EngineConfig& config) {
  return build_dwell_segments(samples, config, config.switch_debounce_ms);
}

double coverage(std::span<const DwellSegment> segments, std::int64_t window_start_ms,
                std::int64_t window_end_ms, std::span<const std::string> learning_labels) {
  if (window_end_ms <= window_start_ms) {
    throw Error(ErrorCode::invalid_argument, "coverage window must have positive length");
  }
  // First segment that ends after the window start.
  auto it = std::upper_bound(segments.begin(), segments.end(), window_start_ms,
                             [](std::int64_t t, const DwellSegment& s) { return t < s.end_ms; });
  std::int64_t on_target = 0;
  for (; it != segments.end() && it->start_ms < window_end_ms; ++it) {
    if (!is_learning(it->label, learning_labels)) {
      continue;
    }
    const std::int64_t lo = std::max(it->start_ms, window_start_ms);
    const std::int64_t hi = std::min(it->end_ms, window_end_ms);
    if (hi > lo) {
      on_target += hi - lo;
    }
  }
  return std::clamp(static_cast<double>(on_target) / static_cast<double>(window_end_ms - window_start_ms),
                    0.0, 1.0);
}

std::vector<double> per_minute_coverage(std::span<const DwellSegment> segments, std::int64_t duration_ms,
                                        std::span<const std::string> learning_labels) {
  if (duration_ms <= 0) {
    throw Error(ErrorCode::invalid_argument, "duration must be positive");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>((duration_ms + kMinuteMs - 1) / kMinuteMs));
  for (std::int64_t start = 0; start < duration_ms; start += kMinuteMs) {
    out.push_back(coverage(segments, start, std::min(start + kMinuteMs, duration_ms), learning_labels));
  }
  return out;
}

int count_switches(std::span<const DwellSegment> segments, std::int64_t window_start_ms,
                   std::int64_t window_end_ms, bool count_away) {
  int switches = 0;
  if (count_away) {
    for (std::size_t i = 1; i < segments.size(); ++i) {
      const auto boundary = segments[i].start_ms;
      if (boundary >= window_start_ms && boundary < window_end_ms &&
          segments[i].label != segments[i - 1].label) {
        ++switches;
      }
    }
    return switches;
  }
  // Without away transitions, a switch is entering a target different from the
  // last non-away target.
  const std::string* last_target = nullptr;
  for (const auto& seg : segments) {
    if (seg.label == kAwayLabel) {
      continue;
    }
    if (last_target && *last_target != seg.label && seg.start_ms >= window_start_ms &&
        seg.start_ms < window_end_ms) {
      ++switches;
    }
    last_target = &seg.label;
  }
  return switches;
}

double adi(double coverage, double switch_rate_per_min, const EngineConfig& config) {
  const double c = std::clamp(coverage, 0.0, 1.0);
  const double r = std::max(0.0, switch_rate_per_min);
  const double penalty = std::min(1.0, r / config.switch_rate_cap_per_min);
  const double value = config.adi_coverage_weight * c + config.adi_switch_weight * (1.0 - penalty);
  return std::clamp(value, 0.0, 1.0);
}

AttentionReport section_metrics(std::span<const LabeledSample> samples, const LectureTimeline& timeline,
                                std::span<const std::string> learning_labels, const EngineConfig& config,
                                const ReportContext& context) {
  config.validate();
  if (samples.empty()) {
    throw Error(ErrorCode::empty_trace, "cannot compute metrics from an empty trace");
  }
  const auto dwell = build_dwell_segments(samples, config, 0);
  const auto debounced = build_dwell_segments(samples, config, config.switch_debounce_ms);

  AttentionReport report;
  report.session_id = context.session_id;
  report.lecture_id = timeline.lecture_id();
  report.generated_at_ms = dwell.back().end_ms;
  report.per_minute_coverage = per_minute_coverage(dwell, timeline.duration_ms(), learning_labels);

  std::size_t cursor = 0;
  for (const auto& section : timeline.sections()) {
    SectionMetrics m;
    m.index = section.index;
    m.start_ms = section.start_ms;
    m.end_ms = section.end_ms;
    while (cursor < samples.size() && samples[cursor].t_ms < section.start_ms) ++cursor;
    while (cursor < samples.size() && samples[cursor].t_ms < section.end_ms) {
      if (samples[cursor].valid) ++m.sample_count;
      ++cursor;
    }
    const double minutes = static_cast<double>(section.length_ms()) / kMinuteMs;
    m.aoi_coverage = coverage(dwell, section.start_ms, section.end_ms, learning_labels);
    m.attention_switches =
        count_switches(debounced, section.start_ms, section.end_ms, config.count_away_switches);
    m.switch_rate_per_min = m.attention_switches / minutes;
    m.adi = adi(m.aoi_coverage, m.switch_rate_per_min, config);
    const double required = config.min_section_sample_fraction * config.nominal_rate_hz *
                            (static_cast<double>(section.length_ms()) / 1000.0);
    m.valid = static_cast<double>(m.sample_count) >= required;
    report.sections.push_back(m);
  }
  return report;
}

std::pair<double, double> gaze_angles_deg(Vec3 direction) {
  constexpr double to_deg = 180.0 / std::numbers::pi;
  const double yaw = std::atan2(direction.x, -direction.z) * to_deg;
  const double pitch = std::asin(std::clamp(direction.y, -1.0, 1.0)) * to_deg;
  return {yaw, pitch};
}

std::vector<LabeledSample> fixation_filter(std::span<const LabeledSample> samples, double dispersion_deg,
                                           std::int64_t min_duration_ms) {
  if (dispersion_deg < 0.0 || min_duration_ms < 0) {
    throw Error(ErrorCode::invalid_argument, "fixation thresholds must be non-negative");
  }
  const std::size_t n = samples.size();
  std::vector<std::pair<double, double>> angles(n);
  std::vector<bool> usable(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!samples[i].direction) {
      throw Error(ErrorCode::inapplicable, "fixation filtering needs geometric samples");
    }
    usable[i] = samples[i].valid;
    angles[i] = gaze_angles_deg(*samples[i].direction);
  }

  struct Extent {
    double min_x = std::numeric_limits<double>::infinity();
    double max_x = -std::numeric_limits<double>::infinity();
    double min_y = std::numeric_limits<double>::infinity();
    double max_y = -std::numeric_limits<double>::infinity();
    void add(std::pair<double, double> p) {
      min_x = std::min(min_x, p.first);
      max_x = std::max(max_x, p.first);
      min_y = std::min(min_y, p.second);
      max_y = std::max(max_y, p.second);
    }
    double dispersion() const { return (max_x - min_x) + (max_y - min_y); }
  };

  std::vector<bool> in_fixation(n, false);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && samples[j].t_ms - samples[i].t_ms < min_duration_ms) ++j;
    if (j == n) {
      break;
    }
    Extent extent;
    bool ok = true;
    for (std::size_t k = i; k <= j && ok; ++k) {
      ok = usable[k];
      if (ok) extent.add(angles[k]);
    }
    if (!ok || extent.dispersion() > dispersion_deg) {
      ++i;
      continue;
    }
    while (j + 1 < n && usable[j + 1]) {
      Extent grown = extent;
      grown.add(angles[j + 1]);
      if (grown.dispersion() > dispersion_deg) break;
      extent = grown;
      ++j;
    }
    for (std::size_t k = i; k <= j; ++k) in_fixation[k] = true;
    i = j + 1;
  }

  std::vector<LabeledSample> out(samples.begin(), samples.end());
  for (std::size_t k = 0; k < n; ++k) {
    if (!in_fixation[k]) {
      out[k].label = std::string(kAwayLabel);
    }
  }
  return out;
}

}  // namespace gazelearn
