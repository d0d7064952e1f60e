#include "gazelearn/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "gazelearn/aoi_geometry.hpp"
#include "gazelearn/rng.hpp"

namespace gazelearn {
namespace {

using nlohmann::json;

constexpr int kMaxPointTries = 256;
constexpr double kInteriorFraction = 0.9;

struct DwellPlan {
  std::int64_t start_ms;
  std::int64_t end_ms;
  std::string label;
};

Vec3 unit(Vec3 v) { return (1.0 / norm(v)) * v; }

Vec3 random_point(const AoiShape& shape, Rng& rng) {
  if (const auto* rect = std::get_if<Rectangle>(&shape)) {
    const double a = rng.uniform(-kInteriorFraction, kInteriorFraction);
    const double b = rng.uniform(-kInteriorFraction, kInteriorFraction);
    return rect->center + a * rect->half_u + b * rect->half_v;
  }
  const auto& box = std::get<Box>(shape);
  const Vec3 mid = 0.5 * (box.min + box.max);
  const Vec3 half = 0.5 * (box.max - box.min);
  return Vec3{mid.x + rng.uniform(-kInteriorFraction, kInteriorFraction) * half.x,
              mid.y + rng.uniform(-kInteriorFraction, kInteriorFraction) * half.y,
              mid.z + rng.uniform(-kInteriorFraction, kInteriorFraction) * half.z};
}

Vec3 random_unit_vector(Rng& rng) {
  const double z = rng.uniform(-1.0, 1.0);
  const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return unit(Vec3{r * std::cos(phi), r * std::sin(phi), z});
}

Vec3 direction_for(const std::string& label, const AoiSet& aois, Vec3 origin, Rng& rng) {
  if (label == kAwayLabel) {
    for (int i = 0; i < kMaxPointTries; ++i) {
      const Vec3 dir = random_unit_vector(rng);
      if (nearest_hit(origin, dir, aois) == nullptr) return dir;
    }
    throw Error(ErrorCode::invalid_argument, "scene leaves no direction that misses every AOI");
  }
  const auto* aoi = aois.find(label);
  for (int i = 0; i < kMaxPointTries; ++i) {
    const Vec3 to_point = random_point(aoi->shape(), rng) - origin;
    if (norm(to_point) == 0.0) continue;
    const Vec3 dir = unit(to_point);
    if (nearest_hit(origin, dir, aois) == aoi) return dir;
  }
  throw Error(ErrorCode::invalid_argument, "AOI '" + label + "' is not visible from the eye origin");
}

Vec3 vec_from_json(const json& j) {
  return Vec3{j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

}  // namespace

void AttentionProfile::validate() const {
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
    throw InvariantError(Violation::config_range, "sample_rate_hz must be > 0");
  }
  if (sections.empty()) {
    throw InvariantError(Violation::config_range, "profile needs at least one section");
  }
  for (const auto& s : sections) {
    if (!(s.on_aoi_probability >= 0.0 && s.on_aoi_probability <= 1.0)) {
      throw InvariantError(Violation::config_range, "on_aoi_probability must lie in [0,1]");
    }
    if (!(s.mean_dwell_ms > 0.0) || !std::isfinite(s.mean_dwell_ms)) {
      throw InvariantError(Violation::config_range, "mean_dwell_ms must be > 0");
    }
    if (s.distractor_labels.empty()) {
      throw InvariantError(Violation::config_range, "distractor_labels must not be empty");
    }
  }
}

AttentionProfile AttentionProfile::from_json(std::string_view text) {
  try {
    const auto doc = json::parse(text);
    AttentionProfile p;
    p.sample_rate_hz = doc.value("sample_rate_hz", 60.0);
    p.seed = doc.value("seed", std::uint64_t{0});
    if (auto it = doc.find("eye_origin"); it != doc.end()) p.eye_origin = vec_from_json(*it);
    for (const auto& s : doc.at("sections")) {
      SectionAttentionProfile sp;
      sp.on_aoi_probability = s.at("on_aoi_probability").get<double>();
      sp.mean_dwell_ms = s.value("mean_dwell_ms", 2000.0);
      if (auto it = s.find("distractor_labels"); it != s.end()) {
        sp.distractor_labels = it->get<std::vector<std::string>>();
      }
      p.sections.push_back(std::move(sp));
    }
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::format, std::string("attention profile: ") + e.what());
  }
}

std::string AttentionProfile::to_json() const {
  nlohmann::ordered_json doc;
  doc["sample_rate_hz"] = sample_rate_hz;
  doc["seed"] = seed;
  doc["eye_origin"] = {eye_origin.x, eye_origin.y, eye_origin.z};
  doc["sections"] = nlohmann::ordered_json::array();
  for (const auto& s : sections) {
    doc["sections"].push_back(nlohmann::ordered_json{{"on_aoi_probability", s.on_aoi_probability},
                                                     {"mean_dwell_ms", s.mean_dwell_ms},
                                                     {"distractor_labels", s.distractor_labels}});
  }
  return doc.dump(2) + "\n";
}

AttentionProfile AttentionProfile::with_probabilities(const std::vector<double>& probabilities, std::uint64_t seed,
                                                      double mean_dwell_ms, double sample_rate_hz) {
  AttentionProfile p;
  p.seed = seed;
  p.sample_rate_hz = sample_rate_hz;
  for (double prob : probabilities) {
    SectionAttentionProfile s;
    s.on_aoi_probability = prob;
    s.mean_dwell_ms = mean_dwell_ms;
    p.sections.push_back(std::move(s));
  }
  p.validate();
  return p;
}

SimulatedTrace simulate_trace(const AttentionProfile& profile, const LectureDescriptor& lecture, GazeLogMode mode) {
  profile.validate();
  const auto& timeline = lecture.timeline;
  if (profile.sections.size() != timeline.section_count()) {
    throw Error(ErrorCode::invalid_argument, "profile has " + std::to_string(profile.sections.size()) +
                                                 " sections, lecture has " +
                                                 std::to_string(timeline.section_count()));
  }
  const auto learning = lecture.aois.learning_labels();
  if (learning.empty()) {
    throw Error(ErrorCode::invalid_argument, "lecture declares no learning-related AOI");
  }
  for (const auto& s : profile.sections) {
    for (const auto& d : s.distractor_labels) {
      if (d != kAwayLabel && !lecture.aois.contains(d)) {
        throw Error(ErrorCode::invalid_argument, "distractor '" + d + "' is not a declared AOI");
      }
      if (std::find(learning.begin(), learning.end(), d) != learning.end()) {
        throw Error(ErrorCode::invalid_argument, "distractor '" + d + "' is a learning AOI");
      }
    }
  }

  // Dwell plan, drawn per section from a section-derived seed.
  std::vector<DwellPlan> plan;
  for (const auto& section : timeline.sections()) {
    const auto& sp = profile.sections[static_cast<std::size_t>(section.index - 1)];
    Rng rng(mix_seed(profile.seed, static_cast<std::uint64_t>(section.index)));
    std::int64_t cursor = section.start_ms;
    while (cursor < section.end_ms) {
      const auto dwell = std::max<std::int64_t>(1, std::llround(rng.exponential(sp.mean_dwell_ms)));
      const std::string& label =
          rng.bernoulli(sp.on_aoi_probability)
              ? learning[rng.uniform_index(learning.size())]
              : sp.distractor_labels[rng.uniform_index(sp.distractor_labels.size())];
      const std::int64_t end = std::min(cursor + dwell, section.end_ms);
      plan.push_back(DwellPlan{cursor, end, label});
      cursor = end;
    }
  }

  SimulatedTrace trace;
  Rng geometry_rng(mix_seed(profile.seed, 0xA01));
  std::size_t seg = 0;
  for (std::int64_t i = 0;; ++i) {
    const auto t = static_cast<std::int64_t>(std::floor(static_cast<double>(i) * 1000.0 / profile.sample_rate_hz));
    if (t >= timeline.duration_ms()) break;
    while (plan[seg].end_ms <= t) ++seg;
    const auto& label = plan[seg].label;
    if (mode == GazeLogMode::labeled) {
      trace.samples.push_back(GazeSample::labeled(t, label));
    } else {
      const Vec3 dir = direction_for(label, lecture.aois, profile.eye_origin, geometry_rng);
      trace.samples.push_back(GazeSample::geometric(t, profile.eye_origin, dir));
    }
    trace.intended_labels.push_back(label);
  }
  return trace;
}

std::string simulate(const AttentionProfile& profile, const LectureDescriptor& lecture, GazeLogMode mode) {
  const auto trace = simulate_trace(profile, lecture, mode);
  return write_gaze_csv(trace.samples, mode, false);
}

}  // namespace gazelearn
