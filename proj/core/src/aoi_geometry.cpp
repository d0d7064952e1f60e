#include "gazelearn/aoi_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gazelearn {
namespace {

// Edge slack in rectangle-local coordinates; keeps exact boundary hits inside
// after floating-point rounding of the hit point.
constexpr double kEdgeTolerance = 1e-9;
constexpr double kParallelTolerance = 1e-12;

}  // namespace

std::optional<double> ray_hits_rectangle(Vec3 origin, Vec3 direction, const Rectangle& rect) {
  const Vec3 normal = cross(rect.half_u, rect.half_v);
  const double normal_len = norm(normal);
  const double denom = dot(direction, normal);
  if (std::abs(denom) <= kParallelTolerance * normal_len) {
    return std::nullopt;
  }
  const double t = dot(rect.center - origin, normal) / denom;
  if (!(t >= 0.0)) {
    return std::nullopt;
  }
  const Vec3 rel = (origin + t * direction) - rect.center;
  const double a = dot(rel, rect.half_u) / dot(rect.half_u, rect.half_u);
  const double b = dot(rel, rect.half_v) / dot(rect.half_v, rect.half_v);
  if (std::abs(a) > 1.0 + kEdgeTolerance || std::abs(b) > 1.0 + kEdgeTolerance) {
    return std::nullopt;
  }
  return t;
}

std::optional<double> ray_hits_box(Vec3 origin, Vec3 direction, const Box& box) {
  double t_enter = -std::numeric_limits<double>::infinity();
  double t_exit = std::numeric_limits<double>::infinity();
  const double o[3] = {origin.x, origin.y, origin.z};
  const double d[3] = {direction.x, direction.y, direction.z};
  const double lo[3] = {box.min.x, box.min.y, box.min.z};
  const double hi[3] = {box.max.x, box.max.y, box.max.z};
  for (int axis = 0; axis < 3; ++axis) {
    if (d[axis] == 0.0) {
      if (o[axis] < lo[axis] || o[axis] > hi[axis]) {
        return std::nullopt;
      }
      continue;
    }
    const double inv = 1.0 / d[axis];
    double t0 = (lo[axis] - o[axis]) * inv;
    double t1 = (hi[axis] - o[axis]) * inv;
    if (t0 > t1) std::swap(t0, t1);
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
  }
  if (t_exit < t_enter || t_exit < 0.0) {
    return std::nullopt;
  }
  return std::max(t_enter, 0.0);
}

std::optional<double> ray_hits(Vec3 origin, Vec3 direction, const AoiShape& shape) {
  return std::visit(
      [&](const auto& s) -> std::optional<double> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Rectangle>) {
          return ray_hits_rectangle(origin, direction, s);
        } else {
          return ray_hits_box(origin, direction, s);
        }
      },
      shape);
}

const AoiDefinition* nearest_hit(Vec3 origin, Vec3 direction, const AoiSet& aois) {
  const AoiDefinition* best = nullptr;
  double best_t = std::numeric_limits<double>::infinity();
  for (const auto& aoi : aois.aois()) {
    auto t = ray_hits(origin, direction, aoi.shape());
    if (t && *t < best_t) {
      best_t = *t;
      best = &aoi;
    }
  }
  return best;
}

std::vector<LabeledSample> label_samples(std::span<const GazeSample> samples, const AoiSet& aois) {
  std::vector<LabeledSample> out;
  out.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    LabeledSample labeled{s.t_ms(), std::string(kAwayLabel), s.valid(), s.direction()};
    if (s.target()) {
      const auto& target = *s.target();
      if (target != kAwayLabel && !aois.contains(target)) {
        throw UnknownLabelError(i, target);
      }
      if (s.valid()) {
        labeled.label = target;
      }
    } else if (s.valid() && s.origin() && s.direction()) {
      if (const auto* hit = nearest_hit(*s.origin(), *s.direction(), aois)) {
        labeled.label = hit->label();
      }
    }
    out.push_back(std::move(labeled));
  }
  return out;
}

}  // namespace gazelearn
