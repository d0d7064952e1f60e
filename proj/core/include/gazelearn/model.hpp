#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "gazelearn/errors.hpp"

namespace gazelearn {

/// Label assigned to gaze that hits no AOI, and to tracking loss.
inline constexpr std::string_view kAwayLabel = "away";

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
  friend constexpr bool operator==(Vec3, Vec3) = default;
};

constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 v) { return std::sqrt(dot(v, v)); }
inline bool is_finite(Vec3 v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

inline constexpr double kUnitNormTolerance = 1e-6;

// Gaze row as read from a log, before direction normalization. Either the
// geometric pair or the target is populated, depending on the log mode.
struct RawGazeRecord {
  std::int64_t t_ms = 0;
  std::optional<Vec3> origin;
  std::optional<Vec3> direction;
  std::optional<std::string> target;
  bool valid = true;

  friend bool operator==(const RawGazeRecord&, const RawGazeRecord&) = default;
};

/// One timestamped gaze record. Immutable; built only through the factories,
/// which enforce the record invariants. A valid geometric sample always has a
/// unit-norm direction; an invalid one may carry a degenerate direction.
class GazeSample {
 public:
  static GazeSample geometric(std::int64_t t_ms, Vec3 origin, Vec3 direction, bool valid = true);
  static GazeSample labeled(std::int64_t t_ms, std::string target, bool valid = true);

  std::int64_t t_ms() const noexcept { return t_ms_; }
  const std::optional<Vec3>& origin() const noexcept { return origin_; }
  const std::optional<Vec3>& direction() const noexcept { return direction_; }
  const std::optional<std::string>& target() const noexcept { return target_; }
  bool valid() const noexcept { return valid_; }
  bool is_geometric() const noexcept { return direction_.has_value(); }

  friend bool operator==(const GazeSample&, const GazeSample&) = default;

 private:
  GazeSample() = default;

  std::int64_t t_ms_ = 0;
  std::optional<Vec3> origin_;
  std::optional<Vec3> direction_;
  std::optional<std::string> target_;
  bool valid_ = true;
};

/// Planar rectangle: center plus two orthogonal half-edge vectors.
struct Rectangle {
  Vec3 center;
  Vec3 half_u;
  Vec3 half_v;
  friend bool operator==(const Rectangle&, const Rectangle&) = default;
};

/// Axis-aligned box.
struct Box {
  Vec3 min;
  Vec3 max;
  friend bool operator==(const Box&, const Box&) = default;
};

using AoiShape = std::variant<Rectangle, Box>;

class AoiDefinition {
 public:
  static AoiDefinition make(std::string label, AoiShape shape, bool learning_related);

  const std::string& label() const noexcept { return label_; }
  const AoiShape& shape() const noexcept { return shape_; }
  bool learning_related() const noexcept { return learning_related_; }

  friend bool operator==(const AoiDefinition&, const AoiDefinition&) = default;

 private:
  AoiDefinition(std::string label, AoiShape shape, bool learning_related)
      : label_(std::move(label)), shape_(std::move(shape)), learning_related_(learning_related) {}

  std::string label_;
  AoiShape shape_;
  bool learning_related_;
};

/// Ordered AOI set with unique labels. Declaration order is the tie-break
/// order for equidistant hits.
class AoiSet {
 public:
  AoiSet() = default;
  explicit AoiSet(std::vector<AoiDefinition> aois);

  std::span<const AoiDefinition> aois() const noexcept { return aois_; }
  std::size_t size() const noexcept { return aois_.size(); }
  bool empty() const noexcept { return aois_.empty(); }
  bool contains(std::string_view label) const;
  const AoiDefinition* find(std::string_view label) const;
  std::vector<std::string> learning_labels() const;

 private:
  std::vector<AoiDefinition> aois_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct Section {
  int index = 0;  // 1-based
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;

  std::int64_t length_ms() const noexcept { return end_ms - start_ms; }
  friend bool operator==(const Section&, const Section&) = default;
};

/// Contiguous sections covering [0, duration). Only validate_timeline builds one.
class LectureTimeline {
 public:
  const std::string& lecture_id() const noexcept { return lecture_id_; }
  std::int64_t duration_ms() const noexcept { return duration_ms_; }
  std::span<const Section> sections() const noexcept { return sections_; }
  std::size_t section_count() const noexcept { return sections_.size(); }
  const Section& section(int index) const { return sections_.at(static_cast<std::size_t>(index - 1)); }

  /// Index of the section containing t (clamped to the last section for t ≥ duration).
  int section_at(std::int64_t t_ms) const;

  friend bool operator==(const LectureTimeline&, const LectureTimeline&) = default;

 private:
  friend LectureTimeline validate_timeline(std::span<const std::pair<std::int64_t, std::int64_t>>,
                                           std::int64_t, std::string);
  LectureTimeline() = default;

  std::string lecture_id_;
  std::int64_t duration_ms_ = 0;
  std::vector<Section> sections_;
};

LectureTimeline validate_timeline(std::span<const std::pair<std::int64_t, std::int64_t>> raw_sections,
                                  std::int64_t duration_ms, std::string lecture_id = {});

/// Six equal sections over the given duration (the remainder goes to the last one).
LectureTimeline uniform_timeline(std::int64_t duration_ms, int section_count = 6,
                                 std::string lecture_id = {});

std::vector<std::pair<std::int64_t, std::int64_t>> section_bounds(const LectureTimeline& timeline);

enum class Difficulty { easy, medium, hard };

struct EngineConfig {
  double nominal_rate_hz = 60.0;
  std::int64_t switch_debounce_ms = 100;
  std::int64_t gap_clamp_ms = 500;
  double adi_coverage_weight = 0.7;
  double adi_switch_weight = 0.3;
  double switch_rate_cap_per_min = 30.0;
  double min_section_sample_fraction = 0.5;
  int question_count = 6;
  std::uint64_t rng_seed = 0;

  // Transitions into and out of "away" count as switches.
  bool count_away_switches = true;
  Difficulty difficulty = Difficulty::medium;
  int generation_retry_budget = 2;

  /// Throws InvariantError naming the first out-of-range field.
  void validate() const;
};

const char* to_string(Difficulty difficulty);
Difficulty difficulty_from_string(std::string_view text);

}  // namespace gazelearn
