#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "gazelearn/adapter.hpp"
#include "gazelearn/confusion.hpp"
#include "gazelearn/lecture.hpp"
#include "gazelearn/quiz.hpp"
#include "gazelearn/retrieval.hpp"

namespace gazelearn::service {

enum class SessionState { created, gaze_uploaded, metrics_ready, quiz_ready };

const char* to_string(SessionState state);

struct SessionRecord {
  std::string session_id;
  std::string lecture_id;
  QuizMode group_mode = QuizMode::attentive;
  SessionState state = SessionState::created;
  std::int64_t created_at_ms = 0;  // unix epoch
  std::filesystem::path directory;
};

// Artifact file names inside a session directory.
inline constexpr const char* kSessionFile = "session.json";
inline constexpr const char* kGazeFile = "gaze.csv";
inline constexpr const char* kMetricsFile = "metrics.json";
inline constexpr const char* kQuizPlanFile = "quiz_plan.json";
inline constexpr const char* kQuizFile = "quiz.json";
inline constexpr const char* kChatFile = "chat.jsonl";
inline constexpr const char* kChatQuizFile = "chatquiz.json";

/// Service config file:
///   {"listen": "127.0.0.1:8080", "lecture_dir": "...", "data_dir": "...",
///    "adapter": "mock" | "http://...", "embedder": "hash" | {"url": ..., "dimension": N},
///    "lexicon": "path/to/lexicon.json", "knowledge_bases": {"<lecture_id>": "kb.json"},
///    "chat_top_k": 3, "engine": {EngineConfig overrides}}
/// Relative paths resolve against the config file's directory.
struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path lecture_dir = "lectures";
  std::filesystem::path data_dir = "data";
  std::string adapter = "mock";
  std::string embedder_url;  // empty: hashing embedder
  std::size_t embedder_dimension = 64;
  std::optional<std::filesystem::path> lexicon_path;
  std::map<std::string, std::filesystem::path> knowledge_bases;
  std::size_t chat_top_k = 3;
  EngineConfig engine;

  static ServiceConfig from_json(std::string_view text, const std::filesystem::path& base_dir = {});
  static ServiceConfig load(const std::filesystem::path& path);
};

/// Transport-independent response.
struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// The per-session pipeline behind the HTTP routes. Each session lives in its
/// own directory and its state is derived from which artifacts exist, so a
/// restarted service recovers every session from disk. Requests on one
/// session are serialized; distinct sessions proceed in parallel. Artifacts
/// are written to a temp file and renamed into place.
class SessionService {
 public:
  SessionService(ServiceConfig config, std::unique_ptr<TextAdapter> adapter, std::unique_ptr<Embedder> embedder);
  ~SessionService();

  SessionService(const SessionService&) = delete;
  SessionService& operator=(const SessionService&) = delete;

  /// Builds adapter and embedder from the config.
  static std::unique_ptr<SessionService> from_config(const ServiceConfig& config);

  Response create_session(std::string_view body);
  Response get_session(std::string_view session_id);
  Response upload_gaze(std::string_view session_id, std::string_view csv);
  Response create_quiz(std::string_view session_id);
  Response grade(std::string_view session_id, std::string_view body);
  Response chat(std::string_view session_id, std::string_view body);
  Response chatquiz(std::string_view session_id);

  std::optional<SessionRecord> session(std::string_view session_id) const;
  std::vector<SessionRecord> sessions() const;
  const ServiceConfig& config() const noexcept { return config_; }

 private:
  struct Lecture;
  struct Entry;

  std::shared_ptr<Entry> find_entry(std::string_view session_id) const;
  const Lecture* find_lecture(std::string_view lecture_id) const;
  void load_lectures();
  void recover_sessions();
  std::filesystem::path sessions_root() const;

  ServiceConfig config_;
  std::unique_ptr<TextAdapter> adapter_;  // must tolerate concurrent calls
  std::unique_ptr<Embedder> embedder_;
  Lexicon lexicon_;
  std::map<std::string, std::unique_ptr<Lecture>, std::less<>> lectures_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Entry>, std::less<>> sessions_;
};

/// Random RFC 4122 version-4 UUID.
std::string make_uuid_v4();
bool is_uuid(std::string_view text);

}  // namespace gazelearn::service
