#include "cli.hpp"

#include <algorithm>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <regex>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gazelearn/format.hpp"
#include "gazelearn/http_server.hpp"
#include "gazelearn/pipeline.hpp"
#include "gazelearn/quiz.hpp"
#include "gazelearn/remote.hpp"
#include "gazelearn/report_io.hpp"
#include "gazelearn/session_service.hpp"
#include "gazelearn/simulator.hpp"

namespace gazelearn::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct AnalyzeArgs {
  std::string lecture;
  std::string gaze;
  std::string out;
  std::string session_id;
  std::string engine;
};

struct QuizArgs {
  std::string report;
  std::string lecture;
  std::string mode;
  std::optional<std::uint64_t> seed;
  std::string adapter = "mock";
  std::string out_dir = ".";
  std::string engine;
  std::string kb;
};

struct SimulateArgs {
  std::string profile;
  std::string lecture;
  std::string mode;
  std::string out;
};

struct KbArgs {
  std::string docs;
  std::string out;
  std::string kb;
  std::string query;
  std::size_t k = 5;
  std::string embedder = "hash";
  std::size_t dimension = 64;
  std::size_t chunk_tokens = 200;
  std::size_t overlap_tokens = 40;
};

EngineConfig load_engine(const std::string& path) {
  if (path.empty()) return EngineConfig{};
  auto config = engine_config_from_json(json::parse(read_file(path)));
  config.validate();
  return config;
}

std::unique_ptr<Embedder> make_embedder(const std::string& spec, std::size_t dimension) {
  if (spec == "hash") return std::make_unique<HashingEmbedder>(dimension);
  return std::make_unique<RemoteEmbedder>(spec, dimension);
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_file_atomic(path, text);
  }
}

int analyze(const AnalyzeArgs& a, std::ostream& out) {
  const auto lecture = load_lecture_descriptor(a.lecture);
  const auto config = load_engine(a.engine);
  const auto result = analyze_gaze(read_file(a.gaze), lecture, config, a.session_id);
  write_output(a.out, write_report_json(result.report), out);
  return kExitOk;
}

int quiz(const QuizArgs& a, std::ostream& out) {
  const auto report = parse_report_json(read_file(a.report));
  const auto lecture = load_lecture_descriptor(a.lecture);
  if (!report.lecture_id.empty() && report.lecture_id != lecture.lecture_id()) {
    throw Error(ErrorCode::invalid_argument,
                "report is for lecture '" + report.lecture_id + "', descriptor is '" + lecture.lecture_id() + "'");
  }
  const auto config = load_engine(a.engine);
  const auto mode = to_lower_ascii(a.mode) == "random" ? QuizMode::random : QuizMode::attentive;
  const auto plan = mode == QuizMode::attentive
                        ? allocate_questions(report, config)
                        : allocate_random(lecture.timeline, config, a.seed.value_or(seed_for_session(report.session_id)),
                                          report.session_id);

  HashingEmbedder embedder;
  KnowledgeStore store(embedder.dimension());
  add_lecture_sections(store, lecture, embedder);
  if (!a.kb.empty()) {
    for (auto& chunk : KnowledgeStore::load(a.kb).chunks()) store.add(std::move(chunk));
  }
  auto adapter = make_text_adapter(a.adapter);
  const auto grounding = select_grounding(plan, lecture, store, embedder);
  const auto items = generate_quiz(plan, lecture, grounding, *adapter, config);

  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  write_file_atomic(dir / "quiz_plan.json", write_quiz_plan_json(plan));
  write_file_atomic(dir / "quiz.json", write_quiz_json(report.session_id, items));
  out << "wrote " << items.size() << " items to " << (dir / "quiz.json").string() << "\n";
  return kExitOk;
}

int simulate_cmd(const SimulateArgs& a) {
  const auto profile = AttentionProfile::from_json(read_file(a.profile));
  const auto lecture = load_lecture_descriptor(a.lecture);
  const auto mode = to_lower_ascii(a.mode) == "geometric" ? GazeLogMode::geometric : GazeLogMode::labeled;
  write_file_atomic(a.out, simulate(profile, lecture, mode));
  return kExitOk;
}

int serve(const std::string& config_path, std::ostream& out) {
  const auto config = service::ServiceConfig::load(config_path);
  auto svc = service::SessionService::from_config(config);
  service::HttpServer server(*svc);

  // Park SIGINT/SIGTERM for a waiter thread that stops the server.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });

  out << "listening on " << config.host << ":" << config.port << std::endl;
  const bool ok = server.listen(config.host, config.port);
  if (!ok) {
    // Wake the waiter so it can exit.
    pthread_kill(waiter.native_handle(), SIGTERM);
  }
  waiter.join();
  pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
  if (!ok) throw Error(ErrorCode::io, "cannot listen on " + config.host + ":" + std::to_string(config.port));
  return kExitOk;
}

int kb_build(const KbArgs& a, std::ostream& out) {
  if (!fs::is_directory(a.docs)) throw Error(ErrorCode::io, a.docs + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(a.docs)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".txt" || ext == ".md")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  const auto embedder = make_embedder(a.embedder, a.dimension);
  KnowledgeStore store(embedder->dimension());
  ChunkingOptions options;
  options.target_tokens = a.chunk_tokens;
  options.overlap_tokens = a.overlap_tokens;
  // "<name>-s<k>.txt" is tagged with section k.
  static const std::regex section_suffix(R"(.*-s([0-9]+)$)");
  for (const auto& file : files) {
    const auto stem = file.stem().string();
    std::optional<int> section;
    std::smatch m;
    if (std::regex_match(stem, m, section_suffix)) section = std::stoi(m[1].str());
    store.add_document(stem, read_file(file), section, *embedder, options);
  }
  store.save(a.out);
  out << "indexed " << store.size() << " chunks from " << files.size() << " documents\n";
  return kExitOk;
}

int kb_search(const KbArgs& a, std::ostream& out) {
  const auto store = KnowledgeStore::load(a.kb);
  const auto embedder = make_embedder(a.embedder, store.dimension());
  json hits = json::array();
  for (const auto& hit : search(a.query, store, *embedder, a.k)) {
    json h{{"id", hit.chunk.id}, {"score", hit.score}, {"text", hit.chunk.text}};
    if (hit.chunk.section_index) h["section_index"] = *hit.chunk.section_index;
    hits.push_back(std::move(h));
  }
  out << hits.dump(2) << "\n";
  return kExitOk;
}

bool is_contract_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::no_valid_section:
    case ErrorCode::empty_plan:
    case ErrorCode::missing_grounding:
    case ErrorCode::malformed_generation:
    case ErrorCode::adapter:
    case ErrorCode::inapplicable:
    case ErrorCode::empty_store:
      return true;
    default:
      return false;
  }
}

void report_error(const Error& e, std::ostream& err) {
  if (const auto* row = dynamic_cast<const RowError*>(&e)) {
    err << "error: line " << row->line();
    if (!row->field().empty()) err << ", field " << row->field();
    err << ": " << row->reason() << "\n";
  } else if (const auto* mono = dynamic_cast<const MonotonicityError*>(&e)) {
    err << "error: line " << mono->line() << ": " << e.what() << "\n";
  } else if (const auto* header = dynamic_cast<const HeaderError*>(&e)) {
    err << "error: line 1, column " << header->column() << ": " << e.what() << "\n";
  } else {
    err << "error: " << e.what() << "\n";
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gaze-driven attention metrics and quiz personalization", "gazelearn"};
  app.require_subcommand(1);

  AnalyzeArgs analyze_args;
  auto* analyze_cmd = app.add_subcommand("analyze", "Compute the section attention report for a gaze log");
  analyze_cmd->add_option("--lecture", analyze_args.lecture, "Lecture descriptor JSON")->required()->check(CLI::ExistingFile);
  analyze_cmd->add_option("--gaze", analyze_args.gaze, "Gaze CSV")->required()->check(CLI::ExistingFile);
  analyze_cmd->add_option("--out", analyze_args.out, "Report path (default stdout)");
  analyze_cmd->add_option("--session-id", analyze_args.session_id, "Session id recorded in the report");
  analyze_cmd->add_option("--engine", analyze_args.engine, "EngineConfig overrides JSON")->check(CLI::ExistingFile);

  QuizArgs quiz_args;
  auto* quiz_cmd = app.add_subcommand("quiz", "Plan and generate a post-lecture quiz");
  quiz_cmd->add_option("--report", quiz_args.report, "AttentionReport JSON")->required()->check(CLI::ExistingFile);
  quiz_cmd->add_option("--lecture", quiz_args.lecture, "Lecture descriptor JSON")->required()->check(CLI::ExistingFile);
  quiz_cmd->add_option("--mode", quiz_args.mode, "attentive or random")
      ->required()
      ->check(CLI::IsMember({"attentive", "random"}, CLI::ignore_case));
  quiz_cmd->add_option("--seed", quiz_args.seed, "Random-mode seed (default: hash of the session id)");
  quiz_cmd->add_option("--adapter", quiz_args.adapter, "mock or an http:// endpoint")->capture_default_str();
  quiz_cmd->add_option("--out-dir", quiz_args.out_dir, "Directory for quiz_plan.json and quiz.json")->capture_default_str();
  quiz_cmd->add_option("--engine", quiz_args.engine, "EngineConfig overrides JSON")->check(CLI::ExistingFile);
  quiz_cmd->add_option("--kb", quiz_args.kb, "Extra knowledge-base snapshot")->check(CLI::ExistingFile);

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic gaze log");
  sim_cmd->add_option("--profile", sim_args.profile, "AttentionProfile JSON")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--lecture", sim_args.lecture, "Lecture descriptor JSON")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--mode", sim_args.mode, "labeled or geometric")
      ->required()
      ->check(CLI::IsMember({"labeled", "geometric"}, CLI::ignore_case));
  sim_cmd->add_option("--out", sim_args.out, "Output CSV")->required();

  std::string config_path;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP session service");
  serve_cmd->add_option("--config", config_path, "Service config JSON")->required()->check(CLI::ExistingFile);

  KbArgs kb_args;
  auto* kb_cmd = app.add_subcommand("kb", "Knowledge-base tools");
  kb_cmd->require_subcommand(1);
  auto* kb_build_cmd = kb_cmd->add_subcommand("build", "Chunk and embed a directory of .txt/.md documents");
  kb_build_cmd->add_option("--docs", kb_args.docs, "Document directory")->required()->check(CLI::ExistingDirectory);
  kb_build_cmd->add_option("--out", kb_args.out, "Snapshot path")->required();
  kb_build_cmd->add_option("--embedder", kb_args.embedder, "hash or an http:// endpoint")->capture_default_str();
  kb_build_cmd->add_option("--dimension", kb_args.dimension, "Embedding dimension")->capture_default_str()->check(CLI::PositiveNumber);
  kb_build_cmd->add_option("--chunk-tokens", kb_args.chunk_tokens, "Tokens per chunk")->capture_default_str()->check(CLI::PositiveNumber);
  kb_build_cmd->add_option("--overlap-tokens", kb_args.overlap_tokens, "Tokens shared by neighbours")->capture_default_str();
  auto* kb_search_cmd = kb_cmd->add_subcommand("search", "Top-k cosine search");
  kb_search_cmd->add_option("--kb", kb_args.kb, "Snapshot path")->required()->check(CLI::ExistingFile);
  kb_search_cmd->add_option("--query", kb_args.query, "Query text")->required();
  kb_search_cmd->add_option("-k", kb_args.k, "Number of hits")->capture_default_str()->check(CLI::PositiveNumber);
  kb_search_cmd->add_option("--embedder", kb_args.embedder, "hash or an http:// endpoint")->capture_default_str();

  std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rest.begin(), rest.end());  // CLI11 consumes a reversed vector
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*analyze_cmd) return analyze(analyze_args, out);
    if (*quiz_cmd) return quiz(quiz_args, out);
    if (*sim_cmd) return simulate_cmd(sim_args);
    if (*serve_cmd) return serve(config_path, out);
    if (*kb_build_cmd) return kb_build(kb_args, out);
    if (*kb_search_cmd) return kb_search(kb_args, out);
  } catch (const Error& e) {
    report_error(e, err);
    return is_contract_error(e.code()) ? kExitContract : kExitInput;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitUsage;
}

}  // namespace gazelearn::cli
