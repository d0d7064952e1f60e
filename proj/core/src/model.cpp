#include "gazelearn/model.hpp"

#include <algorithm>
#include <cmath>

namespace gazelearn {
namespace {

void require_finite(Vec3 v, const char* what) {
  if (!is_finite(v)) {
    throw InvariantError(Violation::non_finite_value, what);
  }
}

void require_label(const std::string& label) {
  if (label.empty()) {
    throw InvariantError(Violation::empty_label, "label must be nonempty");
  }
}

}  // namespace

GazeSample GazeSample::geometric(std::int64_t t_ms, Vec3 origin, Vec3 direction, bool valid) {
  if (t_ms < 0) {
    throw InvariantError(Violation::negative_timestamp, "t_ms=" + std::to_string(t_ms));
  }
  require_finite(origin, "origin");
  require_finite(direction, "direction");
  if (valid && std::abs(norm(direction) - 1.0) > kUnitNormTolerance) {
    throw InvariantError(Violation::non_unit_direction, "direction norm must be 1 for valid samples");
  }
  GazeSample s;
  s.t_ms_ = t_ms;
  s.origin_ = origin;
  s.direction_ = direction;
  s.valid_ = valid;
  return s;
}

GazeSample GazeSample::labeled(std::int64_t t_ms, std::string target, bool valid) {
  if (t_ms < 0) {
    throw InvariantError(Violation::negative_timestamp, "t_ms=" + std::to_string(t_ms));
  }
  if (target.empty()) {
    throw InvariantError(Violation::missing_gaze_payload, "labeled sample needs a target");
  }
  GazeSample s;
  s.t_ms_ = t_ms;
  s.target_ = std::move(target);
  s.valid_ = valid;
  return s;
}

AoiDefinition AoiDefinition::make(std::string label, AoiShape shape, bool learning_related) {
  require_label(label);
  if (label == kAwayLabel) {
    throw InvariantError(Violation::reserved_label, "'away' is reserved");
  }
  if (const auto* rect = std::get_if<Rectangle>(&shape)) {
    require_finite(rect->center, "rectangle center");
    require_finite(rect->half_u, "rectangle half_u");
    require_finite(rect->half_v, "rectangle half_v");
    const double nu = norm(rect->half_u);
    const double nv = norm(rect->half_v);
    if (nu == 0.0 || nv == 0.0) {
      throw InvariantError(Violation::degenerate_edge, label);
    }
    // Relative orthogonality: |cos angle| ≤ 1e-6.
    if (std::abs(dot(rect->half_u, rect->half_v)) > 1e-6 * nu * nv) {
      throw InvariantError(Violation::non_orthogonal_edges, label);
    }
  } else {
    const auto& box = std::get<Box>(shape);
    require_finite(box.min, "box min");
    require_finite(box.max, "box max");
    if (box.min.x > box.max.x || box.min.y > box.max.y || box.min.z > box.max.z) {
      throw InvariantError(Violation::inverted_box, label);
    }
  }
  return AoiDefinition(std::move(label), std::move(shape), learning_related);
}

AoiSet::AoiSet(std::vector<AoiDefinition> aois) : aois_(std::move(aois)) {
  for (std::size_t i = 0; i < aois_.size(); ++i) {
    if (!index_.emplace(aois_[i].label(), i).second) {
      throw InvariantError(Violation::duplicate_label, aois_[i].label());
    }
  }
}

bool AoiSet::contains(std::string_view label) const { return find(label) != nullptr; }

const AoiDefinition* AoiSet::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  return it == index_.end() ? nullptr : &aois_[it->second];
}

std::vector<std::string> AoiSet::learning_labels() const {
  std::vector<std::string> out;
  for (const auto& aoi : aois_) {
    if (aoi.learning_related()) {
      out.push_back(aoi.label());
    }
  }
  return out;
}

int LectureTimeline::section_at(std::int64_t t_ms) const {
  auto it = std::upper_bound(sections_.begin(), sections_.end(), t_ms,
                             [](std::int64_t t, const Section& s) { return t < s.end_ms; });
  if (it == sections_.end()) {
    return sections_.back().index;
  }
  return it->index;
}

LectureTimeline validate_timeline(std::span<const std::pair<std::int64_t, std::int64_t>> raw_sections,
                                  std::int64_t duration_ms, std::string lecture_id) {
  if (raw_sections.empty()) {
    throw InvariantError(Violation::empty_timeline, "timeline needs at least one section");
  }
  if (duration_ms <= 0) {
    throw OutOfRangeError(0, duration_ms, "duration must be positive");
  }
  LectureTimeline timeline;
  timeline.lecture_id_ = std::move(lecture_id);
  timeline.duration_ms_ = duration_ms;
  std::int64_t cursor = 0;
  int index = 0;
  for (const auto& [start, end] : raw_sections) {
    ++index;
    if (start < 0 || start >= duration_ms) {
      throw OutOfRangeError(index, start, "start outside [0, duration)");
    }
    if (end > duration_ms) {
      throw OutOfRangeError(index, end, "end beyond duration " + std::to_string(duration_ms));
    }
    if (end <= start) {
      throw OutOfRangeError(index, end, "end must exceed start");
    }
    if (start < cursor) {
      throw OverlapError(index, start);
    }
    if (start > cursor) {
      throw GapError(index, cursor);
    }
    timeline.sections_.push_back(Section{index, start, end});
    cursor = end;
  }
  if (cursor != duration_ms) {
    throw GapError(index + 1, cursor);
  }
  return timeline;
}

LectureTimeline uniform_timeline(std::int64_t duration_ms, int section_count, std::string lecture_id) {
  if (section_count < 1 || duration_ms < section_count) {
    throw Error(ErrorCode::invalid_argument, "uniform_timeline: bad section count or duration");
  }
  std::vector<std::pair<std::int64_t, std::int64_t>> raw;
  const std::int64_t step = duration_ms / section_count;
  for (int i = 0; i < section_count; ++i) {
    const std::int64_t start = step * i;
    const std::int64_t end = (i + 1 == section_count) ? duration_ms : step * (i + 1);
    raw.emplace_back(start, end);
  }
  return validate_timeline(raw, duration_ms, std::move(lecture_id));
}

std::vector<std::pair<std::int64_t, std::int64_t>> section_bounds(const LectureTimeline& timeline) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (const auto& s : timeline.sections()) {
    out.emplace_back(s.start_ms, s.end_ms);
  }
  return out;
}

void EngineConfig::validate() const {
  auto fail = [](const std::string& what) { throw InvariantError(Violation::config_range, what); };
  if (!(nominal_rate_hz > 0.0) || !std::isfinite(nominal_rate_hz)) fail("nominal_rate_hz must be > 0");
  if (switch_debounce_ms < 0) fail("switch_debounce_ms must be >= 0");
  if (gap_clamp_ms <= 0) fail("gap_clamp_ms must be > 0");
  if (!(adi_coverage_weight >= 0.0 && adi_coverage_weight <= 1.0)) fail("adi_coverage_weight in [0,1]");
  if (!(adi_switch_weight >= 0.0 && adi_switch_weight <= 1.0)) fail("adi_switch_weight in [0,1]");
  if (!(switch_rate_cap_per_min > 0.0) || !std::isfinite(switch_rate_cap_per_min)) {
    fail("switch_rate_cap_per_min must be > 0");
  }
  if (!(min_section_sample_fraction > 0.0 && min_section_sample_fraction <= 1.0)) {
    fail("min_section_sample_fraction in (0,1]");
  }
  if (question_count < 1) fail("question_count must be >= 1");
  if (generation_retry_budget < 0) fail("generation_retry_budget must be >= 0");
  if (std::abs(adi_coverage_weight + adi_switch_weight - 1.0) > 1e-9) {
    throw InvariantError(Violation::config_weight_sum, "adi weights must sum to 1");
  }
}

const char* to_string(Difficulty difficulty) {
  switch (difficulty) {
    case Difficulty::easy: return "easy";
    case Difficulty::medium: return "medium";
    case Difficulty::hard: return "hard";
  }
  return "medium";
}

Difficulty difficulty_from_string(std::string_view text) {
  if (text == "easy") return Difficulty::easy;
  if (text == "medium") return Difficulty::medium;
  if (text == "hard") return Difficulty::hard;
  throw Error(ErrorCode::invalid_argument, "unknown difficulty '" + std::string(text) + "'");
}

}  // namespace gazelearn
