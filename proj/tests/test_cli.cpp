#include <gtest/gtest.h>

#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "gazelearn/pipeline.hpp"
#include "gazelearn/quiz.hpp"
#include "gazelearn/report_io.hpp"
#include "test_support.hpp"

using namespace gazelearn;
using gazelearn::testing::data_dir;
using gazelearn::testing::TempDir;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "gazelearn");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string path(const std::filesystem::path& p) { return p.string(); }

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"bogus"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"analyze", "--lecture", path(data_dir() / "lecture.json")}).code, cli::kExitUsage);
  EXPECT_EQ(run({"analyze", "--lecture", "/no/such/file", "--gaze", "/no/such/file"}).code, cli::kExitUsage);
  const auto help = run({"--help"});
  EXPECT_EQ(help.code, cli::kExitOk);
  EXPECT_NE(help.out.find("analyze"), std::string::npos);
}

TEST(Cli, SimulateAnalyzeQuizRoundTrip) {
  TempDir dir;
  const auto csv = dir.path() / "gaze.csv";
  auto r = run({"simulate", "--profile", path(data_dir() / "profile_low_section3.json"), "--lecture",
                path(data_dir() / "lecture.json"), "--mode", "geometric", "--out", path(csv)});
  ASSERT_EQ(r.code, 0) << r.err;

  r = run({"analyze", "--lecture", path(data_dir() / "lecture.json"), "--gaze", path(csv), "--session-id", "abc"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto expected = write_report_json(
      analyze_gaze(read_file(csv), gazelearn::testing::fixture_lecture(), EngineConfig{}, "abc").report);
  EXPECT_EQ(r.out, expected);

  const auto report = dir.path() / "report.json";
  ASSERT_EQ(run({"analyze", "--lecture", path(data_dir() / "lecture.json"), "--gaze", path(csv), "--session-id", "abc",
                 "--out", path(report)})
                .code,
            0);
  EXPECT_EQ(read_file(report), expected);

  r = run({"quiz", "--report", path(report), "--lecture", path(data_dir() / "lecture.json"), "--mode", "attentive",
           "--out-dir", path(dir.path())});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("wrote 6 items"), std::string::npos);
  const auto items = parse_quiz_json(read_file(dir.path() / "quiz.json"));
  EXPECT_EQ(items.size(), 6u);
  const auto plan = quiz_plan_from_json(nlohmann::json::parse(read_file(dir.path() / "quiz_plan.json")));
  EXPECT_EQ(plan, allocate_questions(parse_report_json(expected), EngineConfig{}));

  r = run({"quiz", "--report", path(report), "--lecture", path(data_dir() / "lecture.json"), "--mode", "random",
           "--seed", "42", "--out-dir", path(dir.path())});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(quiz_plan_from_json(nlohmann::json::parse(read_file(dir.path() / "quiz_plan.json"))).counts(),
            allocate_random(gazelearn::testing::fixture_lecture().timeline, EngineConfig{}, 42, "abc").counts());
}

TEST(Cli, InputErrorsExitTwo) {
  TempDir dir;
  const auto csv = dir.path() / "bad.csv";
  write_file_atomic(csv, "t_ms,target,valid\n0,slides,1\n10,slides,yes\n");
  const auto r = run({"analyze", "--lecture", path(data_dir() / "lecture.json"), "--gaze", path(csv)});
  EXPECT_EQ(r.code, cli::kExitInput);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("valid"), std::string::npos);

  write_file_atomic(csv, "t_ms,where,valid\n");
  EXPECT_EQ(run({"analyze", "--lecture", path(data_dir() / "lecture.json"), "--gaze", path(csv)}).code, cli::kExitInput);
}

TEST(Cli, ContractErrorsExitThree) {
  TempDir dir;
  const auto csv = dir.path() / "short.csv";
  write_file_atomic(csv, "t_ms,target,valid\n0,slides,1\n17,slides,1\n");
  const auto report = dir.path() / "report.json";
  ASSERT_EQ(run({"analyze", "--lecture", path(data_dir() / "lecture.json"), "--gaze", path(csv), "--out", path(report)})
                .code,
            0);
  const auto r = run({"quiz", "--report", path(report), "--lecture", path(data_dir() / "lecture.json"), "--mode",
                      "attentive", "--out-dir", path(dir.path())});
  EXPECT_EQ(r.code, cli::kExitContract);
  EXPECT_FALSE(std::filesystem::exists(dir.path() / "quiz.json"));
}

TEST(Cli, KnowledgeBaseBuildAndSearch) {
  TempDir dir;
  std::filesystem::create_directories(dir.path() / "docs");
  write_file_atomic(dir.path() / "docs" / "ml-intro-s3.txt", "gradient descent learning rate step size");
  write_file_atomic(dir.path() / "docs" / "glossary.md", "overfitting regularization penalty weights");
  const auto kb = dir.path() / "kb.json";
  auto r = run({"kb", "build", "--docs", path(dir.path() / "docs"), "--out", path(kb)});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(KnowledgeStore::load(kb).size(), 2u);
  r = run({"kb", "search", "--kb", path(kb), "--query", "learning rate", "-k", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto hits = nlohmann::json::parse(r.out);
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].at("id"), "ml-intro-s3#0000");
  EXPECT_EQ(hits[0].at("section_index"), 3);

  std::filesystem::create_directories(dir.path() / "empty");
  write_file_atomic(dir.path() / "empty" / "blank.txt", "   ");
  EXPECT_EQ(run({"kb", "build", "--docs", path(dir.path() / "empty"), "--out", path(kb)}).code, cli::kExitInput);
}
