#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gazelearn/model.hpp"

namespace gazelearn {

/// A gaze sample after AOI resolution. The direction is carried along for
/// samples that came from a geometric log so fixation filtering can run later.
struct LabeledSample {
  std::int64_t t_ms = 0;
  std::string label;
  bool valid = true;
  std::optional<Vec3> direction;

  friend bool operator==(const LabeledSample&, const LabeledSample&) = default;
};

// Both intersectors expect a unit-norm direction and return the distance along
// the ray, or nothing on a miss.
std::optional<double> ray_hits_rectangle(Vec3 origin, Vec3 direction, const Rectangle& rect);

// Slab test. An origin inside the box is a hit at distance 0.
std::optional<double> ray_hits_box(Vec3 origin, Vec3 direction, const Box& box);

std::optional<double> ray_hits(Vec3 origin, Vec3 direction, const AoiShape& shape);

/// Nearest AOI hit by the ray, ties broken by declaration order.
const AoiDefinition* nearest_hit(Vec3 origin, Vec3 direction, const AoiSet& aois);

/// Resolves every sample to an AOI label or "away". Length and timestamps are
/// preserved. Labeled samples must name a declared AOI (or "away").
std::vector<LabeledSample> label_samples(std::span<const GazeSample> samples, const AoiSet& aois);

}  // namespace gazelearn
