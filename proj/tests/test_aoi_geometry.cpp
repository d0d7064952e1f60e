#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gazelearn/aoi_geometry.hpp"
#include "gazelearn/errors.hpp"
#include "test_support.hpp"

using namespace gazelearn;

namespace {

const Rectangle kSquare{{0, 0, -2}, {1, 0, 0}, {0, 1, 0}};

Vec3 unit(Vec3 v) { return (1.0 / norm(v)) * v; }

// Solves origin + t*d = c + a*u + b*v by Cramer's rule.
std::optional<double> cramer_rectangle(Vec3 o, Vec3 d, const Rectangle& r) {
  const Vec3 rhs = o - r.center;
  // Columns: u, v, -d.
  const Vec3 c0 = r.half_u, c1 = r.half_v, c2 = -1.0 * d;
  const double det = dot(c0, cross(c1, c2));
  if (std::abs(det) < 1e-12) return std::nullopt;
  const double a = dot(rhs, cross(c1, c2)) / det;
  const double b = dot(c0, cross(rhs, c2)) / det;
  const double t = dot(c0, cross(c1, rhs)) / det;
  if (t < 0 || std::abs(a) > 1 + 1e-9 || std::abs(b) > 1 + 1e-9) return std::nullopt;
  return t;
}

// A box as its six faces, plus the containment rule.
std::optional<double> faces_box(Vec3 o, Vec3 d, const Box& b) {
  if (o.x >= b.min.x && o.x <= b.max.x && o.y >= b.min.y && o.y <= b.max.y && o.z >= b.min.z && o.z <= b.max.z) {
    return 0.0;
  }
  const Vec3 c = 0.5 * (b.min + b.max);
  const Vec3 h = 0.5 * (b.max - b.min);
  const Rectangle faces[] = {
      {{b.min.x, c.y, c.z}, {0, h.y, 0}, {0, 0, h.z}}, {{b.max.x, c.y, c.z}, {0, h.y, 0}, {0, 0, h.z}},
      {{c.x, b.min.y, c.z}, {h.x, 0, 0}, {0, 0, h.z}}, {{c.x, b.max.y, c.z}, {h.x, 0, 0}, {0, 0, h.z}},
      {{c.x, c.y, b.min.z}, {h.x, 0, 0}, {0, h.y, 0}}, {{c.x, c.y, b.max.z}, {h.x, 0, 0}, {0, h.y, 0}},
  };
  std::optional<double> best;
  for (const auto& f : faces) {
    if (auto t = cramer_rectangle(o, d, f); t && (!best || *t < *best)) best = t;
  }
  return best;
}

std::optional<double> oracle_hit(Vec3 o, Vec3 d, const AoiShape& shape) {
  if (const auto* r = std::get_if<Rectangle>(&shape)) return cramer_rectangle(o, d, *r);
  return faces_box(o, d, std::get<Box>(shape));
}

std::string oracle_label(Vec3 o, Vec3 d, const AoiSet& set) {
  std::string label = "away";
  double best = INFINITY;
  for (const auto& aoi : set.aois()) {
    if (auto t = oracle_hit(o, d, aoi.shape()); t && *t < best) {
      best = *t;
      label = aoi.label();
    }
  }
  return label;
}

}  // namespace

TEST(RayRectangle, CenterShot) {
  const auto t = ray_hits_rectangle({0, 0, 0}, {0, 0, -1}, kSquare);
  ASSERT_TRUE(t);
  EXPECT_DOUBLE_EQ(*t, 2.0);
}

TEST(RayRectangle, ParallelMisses) { EXPECT_FALSE(ray_hits_rectangle({0, 0, 0}, {1, 0, 0}, kSquare)); }

TEST(RayRectangle, BoundaryHitAtRootFive) {
  const auto t = ray_hits_rectangle({0, 0, 0}, unit({1, 0, -2}), kSquare);
  ASSERT_TRUE(t);
  EXPECT_NEAR(*t, std::sqrt(5.0), 1e-12);
}

TEST(RayRectangle, BehindAndOutside) {
  EXPECT_FALSE(ray_hits_rectangle({0, 0, 0}, {0, 0, 1}, kSquare));
  EXPECT_FALSE(ray_hits_rectangle({0, 0, 0}, unit({1.2, 0, -2}), kSquare));
  EXPECT_TRUE(ray_hits_rectangle({0, 0, -4}, {0, 0, 1}, kSquare));  // back face counts
}

TEST(RayBox, FrontFaceAndContainment) {
  const Box box{{-1, -1, -3}, {1, 1, -2}};
  const auto t = ray_hits_box({0, 0, 0}, {0, 0, -1}, box);
  ASSERT_TRUE(t);
  EXPECT_DOUBLE_EQ(*t, 2.0);
  EXPECT_EQ(ray_hits_box({0, 0, -2.5}, {0, 0, -1}, box), 0.0);
  EXPECT_FALSE(ray_hits_box({0, 0, 0}, {0, 0, 1}, box));
  EXPECT_FALSE(ray_hits_box({5, 0, 0}, {0, 0, -1}, box));
}

TEST(RayBox, ObliqueAgreesWithRayMarch) {
  const Box box{{0, 0, 0}, {1, 1, 1}};
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int hits = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3 origin{-1.5 + 0.2 * u(gen), -1.2 + 0.2 * u(gen), -1.3 + 0.2 * u(gen)};
    const Vec3 target{0.5 + 0.6 * u(gen), 0.5 + 0.6 * u(gen), 0.5 + 0.6 * u(gen)};
    const Vec3 d = unit(target - origin);
    std::optional<double> marched;
    for (double t = 0.0; t < 6.0; t += 1e-4) {
      const Vec3 p = origin + t * d;
      if (p.x >= 0 && p.x <= 1 && p.y >= 0 && p.y <= 1 && p.z >= 0 && p.z <= 1) {
        marched = t;
        break;
      }
    }
    const auto exact = ray_hits_box(origin, d, box);
    ASSERT_EQ(exact.has_value(), marched.has_value()) << trial;
    if (exact) {
      ++hits;
      EXPECT_NEAR(*exact, *marched, 1e-3);
    }
  }
  EXPECT_GT(hits, 10);
}

TEST(LabelSamples, NearestHitWins) {
  const AoiSet set({AoiDefinition::make("slides", Rectangle{{0, 0, -2}, {2, 0, 0}, {0, 2, 0}}, true),
                    AoiDefinition::make("avatar", Box{{-0.2, -0.2, -1.7}, {0.2, 0.2, -1.5}}, true)});
  const std::vector<GazeSample> samples{GazeSample::geometric(0, {0, 0, 0}, {0, 0, -1}),
                                        GazeSample::geometric(16, {0, 0, 0}, unit({1, 0, -2}))};
  const auto labeled = label_samples(samples, set);
  EXPECT_EQ(labeled[0].label, "avatar");
  EXPECT_EQ(labeled[1].label, "slides");
}

TEST(LabelSamples, SlideCenterAndAway) {
  const auto lecture = gazelearn::testing::fixture_lecture();
  const Vec3 eye{0, 1.2, 0};
  const std::vector<GazeSample> samples{GazeSample::geometric(0, eye, unit(Vec3{0, 1.5, -4} - eye)),
                                        GazeSample::geometric(16, eye, {0, 1, 0}),
                                        GazeSample::geometric(33, eye, {0, 0, 0}, false)};
  const auto labeled = label_samples(samples, lecture.aois);
  EXPECT_EQ(labeled[0].label, "slides");
  EXPECT_EQ(labeled[1].label, "away");
  EXPECT_EQ(labeled[2].label, "away");
  EXPECT_FALSE(labeled[2].valid);
}

TEST(LabelSamples, EquidistantTieGoesToDeclarationOrder) {
  const Rectangle same{{0, 0, -2}, {1, 0, 0}, {0, 1, 0}};
  const AoiSet ab({AoiDefinition::make("first", same, true), AoiDefinition::make("second", same, false)});
  const AoiSet ba({AoiDefinition::make("second", same, false), AoiDefinition::make("first", same, true)});
  const std::vector<GazeSample> s{GazeSample::geometric(0, {}, {0, 0, -1})};
  EXPECT_EQ(label_samples(s, ab)[0].label, "first");
  EXPECT_EQ(label_samples(s, ba)[0].label, "second");
}

TEST(LabelSamples, LabeledPassThroughAndUnknownLabel) {
  const auto lecture = gazelearn::testing::fixture_lecture();
  const std::vector<GazeSample> ok{GazeSample::labeled(0, "slides"), GazeSample::labeled(16, "away"),
                                   GazeSample::labeled(33, "window", false)};
  const auto labeled = label_samples(ok, lecture.aois);
  EXPECT_EQ(labeled[0].label, "slides");
  EXPECT_EQ(labeled[1].label, "away");
  EXPECT_EQ(labeled[2].label, "away");
  const std::vector<GazeSample> bad{GazeSample::labeled(0, "slides"), GazeSample::labeled(16, "ceiling")};
  try {
    label_samples(bad, lecture.aois);
    FAIL();
  } catch (const UnknownLabelError& e) {
    EXPECT_EQ(e.sample_index(), 1u);
    EXPECT_EQ(e.label(), "ceiling");
  }
}

TEST(LabelSamples, ThousandRandomRaysMatchExhaustiveOracle) {
  const auto lecture = gazelearn::testing::fixture_lecture();
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<GazeSample> samples;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 origin{0.3 * u(gen), 1.2 + 0.3 * u(gen), 0.3 * u(gen)};
    Vec3 d{u(gen), 0.5 * u(gen), -std::abs(u(gen))};
    if (norm(d) < 1e-3) d = {0, 0, -1};
    samples.push_back(GazeSample::geometric(i * 16, origin, unit(d)));
  }
  const auto labeled = label_samples(samples, lecture.aois);
  ASSERT_EQ(labeled.size(), samples.size());
  std::map<std::string, int> seen;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    EXPECT_EQ(labeled[i].t_ms, samples[i].t_ms());
    EXPECT_EQ(labeled[i].label, oracle_label(*samples[i].origin(), *samples[i].direction(), lecture.aois)) << i;
    ++seen[labeled[i].label];
  }
  EXPECT_GT(seen["slides"], 0);
  EXPECT_GT(seen["avatar"], 0);
  EXPECT_GT(seen["away"], 0);
}

TEST(LabelSamples, TranslationInvariance) {
  const auto lecture = gazelearn::testing::fixture_lecture();
  const Vec3 shift{3.25, -1.5, 7.0};
  std::vector<AoiDefinition> moved;
  for (const auto& a : lecture.aois.aois()) {
    AoiShape shape = a.shape();
    if (auto* r = std::get_if<Rectangle>(&shape)) {
      r->center = r->center + shift;
    } else {
      auto& b = std::get<Box>(shape);
      b.min = b.min + shift;
      b.max = b.max + shift;
    }
    moved.push_back(AoiDefinition::make(a.label(), shape, a.learning_related()));
  }
  const AoiSet moved_set(moved);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<GazeSample> base, shifted;
  for (int i = 0; i < 500; ++i) {
    const Vec3 o{0.2 * u(gen), 1.2 + 0.2 * u(gen), 0.2 * u(gen)};
    const Vec3 d = unit({u(gen), 0.4 * u(gen), -0.2 - std::abs(u(gen))});
    base.push_back(GazeSample::geometric(i, o, d));
    shifted.push_back(GazeSample::geometric(i, o + shift, d));
  }
  const auto a = label_samples(base, lecture.aois);
  const auto b = label_samples(shifted, moved_set);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].label, b[i].label) << i;
}
