#include <gtest/gtest.h>

#include <set>

#include <nlohmann/json.hpp>

#include "gazelearn/aoi_geometry.hpp"
#include "gazelearn/attention_metrics.hpp"
#include "gazelearn/errors.hpp"
#include "gazelearn/gaze_ingest.hpp"
#include "gazelearn/simulator.hpp"
#include "test_support.hpp"

using namespace gazelearn;

namespace {

// Fixture AOIs with a single section of the given length.
LectureDescriptor single_section_lecture(std::int64_t duration_ms) {
  auto j = nlohmann::json::parse(read_file(gazelearn::testing::data_dir() / "lecture.json"));
  j["duration_ms"] = duration_ms;
  auto section = j["sections"][0];
  section["end_ms"] = duration_ms;
  j["sections"] = nlohmann::json::array({section});
  return parse_lecture_descriptor(j.dump());
}

double section_coverage(const SimulatedTrace& trace, const LectureDescriptor& lecture, int index) {
  const auto labeled = label_samples(trace.samples, lecture.aois);
  const auto report = section_metrics(labeled, lecture.timeline, lecture.aois.learning_labels(), EngineConfig{});
  return report.sections.at(static_cast<std::size_t>(index - 1)).aoi_coverage;
}

}  // namespace

TEST(Simulator, ExtremeProbabilities) {
  const auto lecture = gazelearn::testing::fixture_lecture();
  const auto all_on = simulate_trace(AttentionProfile::with_probabilities(std::vector<double>(6, 1.0), 3), lecture,
                                     GazeLogMode::labeled);
  const auto all_off = simulate_trace(AttentionProfile::with_probabilities(std::vector<double>(6, 0.0), 3), lecture,
                                      GazeLogMode::labeled);
  for (int k = 1; k <= 6; ++k) {
    EXPECT_NEAR(section_coverage(all_on, lecture, k), 1.0, 1e-12) << k;
    EXPECT_NEAR(section_coverage(all_off, lecture, k), 0.0, 1e-12) << k;
  }
}

TEST(Simulator, CoverageTracksProbability) {
  const auto lecture = single_section_lecture(600'000);
  const auto trace =
      simulate_trace(AttentionProfile::with_probabilities({0.7}, 7), lecture, GazeLogMode::labeled);
  EXPECT_NEAR(section_coverage(trace, lecture, 1), 0.7, 0.05);
}

TEST(Simulator, SampleTimesFollowRate) {
  const auto lecture = single_section_lecture(10'000);
  const auto trace = simulate_trace(AttentionProfile::with_probabilities({0.5}, 1), lecture, GazeLogMode::labeled);
  ASSERT_EQ(trace.samples.size(), 600u);
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    EXPECT_EQ(trace.samples[i].t_ms(), static_cast<std::int64_t>(i) * 1000 / 60);
  }
  EXPECT_EQ(trace.intended_labels.size(), trace.samples.size());
}

TEST(Simulator, SameSeedSameBytes) {
  const auto lecture = gazelearn::testing::fixture_lecture();
  const auto profile = AttentionProfile::from_json(read_file(gazelearn::testing::data_dir() / "profile_low_section3.json"));
  for (auto mode : {GazeLogMode::labeled, GazeLogMode::geometric}) {
    const auto a = simulate(profile, lecture, mode);
    EXPECT_EQ(a, simulate(profile, lecture, mode));
    auto other = profile;
    other.seed += 1;
    EXPECT_NE(a, simulate(other, lecture, mode));
    EXPECT_EQ(parse_gaze_csv(a).samples.size(), 72'000u);
  }
}

TEST(Simulator, GeometricClosedLoop) {
  const auto lecture = single_section_lecture(600'000);
  ASSERT_EQ(lecture.aois.size(), 3u);
  AttentionProfile profile = AttentionProfile::with_probabilities({0.6}, 11);
  profile.sections[0].distractor_labels = {"away", "window"};
  const auto trace = simulate_trace(profile, lecture, GazeLogMode::geometric);
  const auto labeled = label_samples(trace.samples, lecture.aois);
  std::size_t mismatches = 0;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    mismatches += labeled[i].label != trace.intended_labels[i];
    seen.insert(trace.intended_labels[i]);
  }
  EXPECT_EQ(mismatches, 0u);
  EXPECT_EQ(seen, (std::set<std::string>{"slides", "avatar", "window", "away"}));
  // The CSV path agrees with the in-memory one.
  const auto reparsed = parse_gaze_csv(simulate(profile, lecture, GazeLogMode::geometric));
  const auto relabeled = label_samples(reparsed.samples, lecture.aois);
  ASSERT_EQ(relabeled.size(), labeled.size());
  std::size_t csv_mismatches = 0;
  for (std::size_t i = 0; i < labeled.size(); ++i) csv_mismatches += relabeled[i].label != trace.intended_labels[i];
  EXPECT_EQ(csv_mismatches, 0u);
}

TEST(AttentionProfile, JsonAndValidation) {
  const auto p = AttentionProfile::from_json(read_file(gazelearn::testing::data_dir() / "profile_low_section3.json"));
  EXPECT_EQ(p.sections.size(), 6u);
  EXPECT_EQ(p.seed, 7u);
  EXPECT_DOUBLE_EQ(p.sections[2].on_aoi_probability, 0.2);
  const auto again = AttentionProfile::from_json(p.to_json());
  EXPECT_EQ(again.to_json(), p.to_json());
  EXPECT_THROW(AttentionProfile::from_json(R"({"sections":[{"on_aoi_probability":1.5}]})"), Error);
  EXPECT_THROW(AttentionProfile::from_json(R"({"sections":[]})"), Error);
  EXPECT_THROW(AttentionProfile::from_json(R"({"sample_rate_hz":0,"sections":[{"on_aoi_probability":0.5}]})"), Error);
  const auto lecture = gazelearn::testing::fixture_lecture();
  EXPECT_THROW(simulate(AttentionProfile::with_probabilities({1.0}, 1), lecture, GazeLogMode::labeled), Error);
  auto bad = AttentionProfile::with_probabilities(std::vector<double>(6, 0.5), 1);
  bad.sections[1].distractor_labels = {"slides"};
  EXPECT_THROW(simulate(bad, lecture, GazeLogMode::labeled), Error);
}
