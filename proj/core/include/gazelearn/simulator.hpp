#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gazelearn/gaze_ingest.hpp"
#include "gazelearn/lecture.hpp"

namespace gazelearn {

struct SectionAttentionProfile {
  double on_aoi_probability = 1.0;
  double mean_dwell_ms = 2000.0;
  // Targets used when the draw is off-AOI: "away" or non-learning AOI labels.
  std::vector<std::string> distractor_labels{std::string(kAwayLabel)};
};

/// Seeded synthetic-attention profile, one entry per lecture section.
///
/// JSON: {"sample_rate_hz": 60, "seed": 7, "eye_origin": [0, 1.2, 0],
///        "sections": [{"on_aoi_probability": .9, "mean_dwell_ms": 2000,
///                      "distractor_labels": ["away"]}, ...]}
struct AttentionProfile {
  std::vector<SectionAttentionProfile> sections;
  double sample_rate_hz = 60.0;
  std::uint64_t seed = 0;
  Vec3 eye_origin{0.0, 1.2, 0.0};

  void validate() const;
  static AttentionProfile from_json(std::string_view text);
  std::string to_json() const;

  /// Same dwell and distractors in every section, one probability per section.
  static AttentionProfile with_probabilities(const std::vector<double>& probabilities, std::uint64_t seed,
                                             double mean_dwell_ms = 2000.0, double sample_rate_hz = 60.0);
};

struct SimulatedTrace {
  std::vector<GazeSample> samples;
  // Label each sample was generated to look at, in sample order.
  std::vector<std::string> intended_labels;
};

/// Alternating dwell segments with exponential lengths; each segment looks at
/// a learning AOI with the section's probability, otherwise at a distractor.
/// Samples fall at floor(i * 1000 / rate). In geometric mode each sample is a
/// ray from the eye origin through a random point of its target AOI (or a
/// direction that hits nothing, for "away"), rejection-sampled so the target
/// is the nearest hit. Same seed, same output.
SimulatedTrace simulate_trace(const AttentionProfile& profile, const LectureDescriptor& lecture, GazeLogMode mode);

/// simulate_trace rendered in the gaze-ingest CSV format.
std::string simulate(const AttentionProfile& profile, const LectureDescriptor& lecture, GazeLogMode mode);

}  // namespace gazelearn
