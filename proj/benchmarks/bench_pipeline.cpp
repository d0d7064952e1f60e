#include <benchmark/benchmark.h>

#include <random>

#include "gazelearn/apportion.hpp"
#include "gazelearn/aoi_geometry.hpp"
#include "gazelearn/gaze_ingest.hpp"
#include "gazelearn/lecture.hpp"
#include "gazelearn/pipeline.hpp"
#include "gazelearn/quiz.hpp"
#include "gazelearn/retrieval.hpp"
#include "gazelearn/simulator.hpp"

using namespace gazelearn;

namespace {

const LectureDescriptor& lecture() {
  static const auto l = load_lecture_descriptor(std::filesystem::path(GAZELEARN_BENCH_DATA_DIR) / "lecture.json");
  return l;
}

const std::string& trace_csv(GazeLogMode mode) {
  static const auto profile = AttentionProfile::from_json(
      read_file(std::filesystem::path(GAZELEARN_BENCH_DATA_DIR) / "profile_low_section3.json"));
  static const std::string labeled = simulate(profile, lecture(), GazeLogMode::labeled);
  static const std::string geometric = simulate(profile, lecture(), GazeLogMode::geometric);
  return mode == GazeLogMode::labeled ? labeled : geometric;
}

void BM_ParseCsv(benchmark::State& state) {
  const auto& csv = trace_csv(static_cast<GazeLogMode>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(parse_gaze_csv(csv));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * csv.size()));
}
BENCHMARK(BM_ParseCsv)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_LabelGeometric(benchmark::State& state) {
  const auto samples = parse_gaze_csv(trace_csv(GazeLogMode::geometric)).samples;
  for (auto _ : state) benchmark::DoNotOptimize(label_samples(samples, lecture().aois));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * samples.size()));
}
BENCHMARK(BM_LabelGeometric)->Unit(benchmark::kMillisecond);

// Full 72k-sample lecture: parse, label, report.
void BM_AnalyzeLecture(benchmark::State& state) {
  const auto& csv = trace_csv(static_cast<GazeLogMode>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(analyze_gaze(csv, lecture(), EngineConfig{}, "bench"));
}
BENCHMARK(BM_AnalyzeLecture)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Search(benchmark::State& state) {
  HashingEmbedder embedder;
  KnowledgeStore store(embedder.dimension());
  std::mt19937_64 gen(1);
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    std::string text;
    for (int w = 0; w < 30; ++w) text += "w" + std::to_string(gen() % 5000) + " ";
    store.add({"doc#" + std::to_string(i), std::nullopt, text, embedder.embed(text)});
  }
  const auto query = embedder.embed("w17 w42 w999 w1234");
  for (auto _ : state) benchmark::DoNotOptimize(store.search(query, 5));
}
BENCHMARK(BM_Search)->Arg(500)->Arg(5000)->Arg(50000);

void BM_LargestRemainder(benchmark::State& state) {
  std::mt19937_64 gen(2);
  std::vector<double> weights(static_cast<std::size_t>(state.range(0)));
  for (auto& w : weights) w = std::uniform_real_distribution<double>(0, 1)(gen);
  for (auto _ : state) benchmark::DoNotOptimize(largest_remainder(weights, 6));
}
BENCHMARK(BM_LargestRemainder)->Arg(6)->Arg(64);

}  // namespace

// The distro libbenchmark_main.a does not link with this toolchain.
BENCHMARK_MAIN();
