#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gazelearn/aoi_geometry.hpp"
#include "gazelearn/model.hpp"

namespace gazelearn {

struct DwellSegment {
  std::string label;
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;

  std::int64_t length_ms() const noexcept { return end_ms - start_ms; }
  friend bool operator==(const DwellSegment&, const DwellSegment&) = default;
};

struct SectionMetrics {
  int index = 0;
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  double aoi_coverage = 0.0;
  int attention_switches = 0;
  double switch_rate_per_min = 0.0;
  double adi = 0.0;
  bool valid = false;
  std::int64_t sample_count = 0;

  friend bool operator==(const SectionMetrics&, const SectionMetrics&) = default;
};

struct AttentionReport {
  std::string session_id;
  std::string lecture_id;
  std::int64_t generated_at_ms = 0;
  std::vector<double> per_minute_coverage;
  std::vector<SectionMetrics> sections;

  friend bool operator==(const AttentionReport&, const AttentionReport&) = default;
};

/// Turns an ordered labeled trace into contiguous dwell segments.
///
/// Sample i dwells over [t_i, t_{i+1}); any part of that interval beyond
/// gap_clamp_ms becomes an "away" segment (tracking loss). The last sample
/// dwells for the median inter-sample interval. Label changes shorter than
/// debounce_ms are absorbed by the label in effect before them (or, for a
/// short leading run, by the one after). Consecutive output segments always
/// carry distinct labels.
std::vector<DwellSegment> build_dwell_segments(std::span<const LabeledSample> samples,
                                               const EngineConfig& config, std::int64_t debounce_ms);

/// Same, with config.switch_debounce_ms.
std::vector<DwellSegment> build_dwell_segments(std::span<const LabeledSample> samples,
                                               const EngineConfig& config);

/// Share of [window_start, window_end) spent on the given labels.
double coverage(std::span<const DwellSegment> segments, std::int64_t window_start_ms,
                std::int64_t window_end_ms, std::span<const std::string> learning_labels);

/// One coverage value per 60 s window; a trailing partial window is
/// normalized by its own length.
std::vector<double> per_minute_coverage(std::span<const DwellSegment> segments, std::int64_t duration_ms,
                                        std::span<const std::string> learning_labels);

/// Label changes whose boundary falls in [window_start, window_end).
int count_switches(std::span<const DwellSegment> segments, std::int64_t window_start_ms,
                   std::int64_t window_end_ms, bool count_away = true);

/// clamp01(w_c * c + w_s * (1 - min(1, r / r_max)))
double adi(double coverage, double switch_rate_per_min, const EngineConfig& config);

struct ReportContext {
  std::string session_id;
};

/// Per-section coverage, switches, switch rate, and ADI for a labeled trace.
///
/// Coverage and per-minute coverage use undebounced dwell; switch counts use
/// the debounced segments. A section with fewer valid samples than
/// min_section_sample_fraction x nominal rate x section seconds is reported
/// with valid=false. generated_at_ms is the end of the analysed trace, which
/// keeps reports reproducible.
AttentionReport section_metrics(std::span<const LabeledSample> samples, const LectureTimeline& timeline,
                                std::span<const std::string> learning_labels, const EngineConfig& config,
                                const ReportContext& context = {});

/// I-DT fixation identification over gaze angles (yaw/pitch, degrees).
/// Samples outside every fixation window are relabeled "away".
/// Throws Error(inapplicable) if any sample lacks a direction.
std::vector<LabeledSample> fixation_filter(std::span<const LabeledSample> samples, double dispersion_deg,
                                           std::int64_t min_duration_ms);

/// Yaw and pitch of a unit direction, degrees. Forward is -z, up is +y.
std::pair<double, double> gaze_angles_deg(Vec3 direction);

}  // namespace gazelearn
