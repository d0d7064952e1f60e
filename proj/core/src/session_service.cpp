#include "gazelearn/session_service.hpp"

#include <chrono>
#include <random>
#include <regex>

#include <nlohmann/json.hpp>

#include "gazelearn/format.hpp"
#include "gazelearn/pipeline.hpp"
#include "gazelearn/remote.hpp"
#include "gazelearn/report_io.hpp"

namespace gazelearn::service {
namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

Response json_response(int status, const json& body) { return Response{status, body.dump(), "application/json"}; }

Response error_response(int status, std::string_view code, std::string_view message,
                        std::optional<json> detail = std::nullopt) {
  ordered_json body;
  body["code"] = code;
  body["message"] = message;
  if (detail) body["detail"] = *detail;
  return Response{status, body.dump(), "application/json"};
}

Response wrong_state(const SessionRecord& record, std::string_view needed) {
  return error_response(409, "WRONG_STATE",
                        "session is " + std::string(to_string(record.state)) + ", operation needs " +
                            std::string(needed),
                        json{{"state", to_string(record.state)}});
}

Response session_not_found(std::string_view id) {
  return error_response(404, "SESSION_NOT_FOUND", "no session '" + std::string(id) + "'");
}

// Error from a gaze-log parse, with line/field detail where there is one.
Response parse_error_response(const Error& e) {
  json detail{{"kind", to_string(e.code())}};
  if (const auto* row = dynamic_cast<const RowError*>(&e)) {
    detail["line"] = row->line();
    detail["field"] = row->field();
    detail["reason"] = row->reason();
  } else if (const auto* header = dynamic_cast<const HeaderError*>(&e)) {
    detail["line"] = 1;
    detail["column"] = header->column();
  } else if (const auto* mono = dynamic_cast<const MonotonicityError*>(&e)) {
    detail["line"] = mono->line();
  } else if (const auto* label = dynamic_cast<const UnknownLabelError*>(&e)) {
    detail["sample_index"] = label->sample_index();
    detail["label"] = label->label();
  }
  return error_response(422, "GAZE_PARSE_ERROR", e.what(), detail);
}

std::int64_t now_epoch_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

fs::path resolve(const fs::path& base, const fs::path& p) {
  return (p.is_absolute() || base.empty()) ? p : base / p;
}

std::optional<json> parse_body(std::string_view body) {
  try {
    auto j = json::parse(body);
    if (!j.is_object()) return std::nullopt;
    return j;
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

SessionState derive_state(const fs::path& dir) {
  if (fs::exists(dir / kQuizFile)) return SessionState::quiz_ready;
  if (fs::exists(dir / kMetricsFile)) return SessionState::metrics_ready;
  if (fs::exists(dir / kGazeFile)) return SessionState::gaze_uploaded;
  return SessionState::created;
}

json session_json(const SessionRecord& r) {
  return json{{"session_id", r.session_id},
              {"lecture_id", r.lecture_id},
              {"group_mode", to_string(r.group_mode)},
              {"state", to_string(r.state)}};
}

}  // namespace

const char* to_string(SessionState state) {
  switch (state) {
    case SessionState::created: return "CREATED";
    case SessionState::gaze_uploaded: return "GAZE_UPLOADED";
    case SessionState::metrics_ready: return "METRICS_READY";
    case SessionState::quiz_ready: return "QUIZ_READY";
  }
  return "CREATED";
}

struct SessionService::Lecture {
  LectureDescriptor descriptor;
  KnowledgeStore store;
};

struct SessionService::Entry {
  std::mutex mutex;
  SessionRecord record;
};

ServiceConfig ServiceConfig::from_json(std::string_view text, const fs::path& base_dir) {
  try {
    const auto doc = json::parse(text);
    ServiceConfig c;
    if (auto it = doc.find("listen"); it != doc.end()) {
      const auto listen = it->get<std::string>();
      const auto colon = listen.rfind(':');
      if (colon == std::string::npos) {
        throw Error(ErrorCode::format, "listen must be host:port");
      }
      c.host = listen.substr(0, colon);
      c.port = std::stoi(listen.substr(colon + 1));
    }
    c.lecture_dir = resolve(base_dir, doc.value("lecture_dir", std::string("lectures")));
    c.data_dir = resolve(base_dir, doc.value("data_dir", std::string("data")));
    c.adapter = doc.value("adapter", std::string("mock"));
    if (auto it = doc.find("embedder"); it != doc.end()) {
      if (it->is_string()) {
        const auto spec = it->get<std::string>();
        if (spec != "hash") c.embedder_url = spec;
      } else {
        c.embedder_url = it->at("url").get<std::string>();
        c.embedder_dimension = it->value("dimension", std::size_t{64});
      }
    }
    if (auto it = doc.find("lexicon"); it != doc.end()) {
      c.lexicon_path = resolve(base_dir, it->get<std::string>());
    }
    if (auto it = doc.find("knowledge_bases"); it != doc.end()) {
      for (const auto& [lecture, path] : it->items()) {
        c.knowledge_bases[lecture] = resolve(base_dir, path.get<std::string>());
      }
    }
    c.chat_top_k = doc.value("chat_top_k", std::size_t{3});
    if (auto it = doc.find("engine"); it != doc.end()) {
      c.engine = engine_config_from_json(*it);
    }
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::format, std::string("service config: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::format, "service config: bad listen port");
  }
}

ServiceConfig ServiceConfig::load(const fs::path& path) {
  return from_json(read_file(path), path.parent_path());
}

SessionService::SessionService(ServiceConfig config, std::unique_ptr<TextAdapter> adapter,
                               std::unique_ptr<Embedder> embedder)
    : config_(std::move(config)),
      adapter_(std::move(adapter)),
      embedder_(std::move(embedder)),
      lexicon_(config_.lexicon_path ? Lexicon::from_json(read_file(*config_.lexicon_path)) : Lexicon::defaults()) {
  config_.engine.validate();
  fs::create_directories(sessions_root());
  load_lectures();
  recover_sessions();
}

SessionService::~SessionService() = default;

std::unique_ptr<SessionService> SessionService::from_config(const ServiceConfig& config) {
  std::unique_ptr<Embedder> embedder;
  if (config.embedder_url.empty()) {
    embedder = std::make_unique<HashingEmbedder>(config.embedder_dimension);
  } else {
    embedder = std::make_unique<RemoteEmbedder>(config.embedder_url, config.embedder_dimension);
  }
  return std::make_unique<SessionService>(config, make_text_adapter(config.adapter), std::move(embedder));
}

fs::path SessionService::sessions_root() const { return config_.data_dir / "sessions"; }

void SessionService::load_lectures() {
  if (!fs::exists(config_.lecture_dir)) {
    throw Error(ErrorCode::io, "lecture directory " + config_.lecture_dir.string() + " does not exist");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(config_.lecture_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    auto lecture = std::make_unique<Lecture>(Lecture{load_lecture_descriptor(file), KnowledgeStore(embedder_->dimension())});
    add_lecture_sections(lecture->store, lecture->descriptor, *embedder_);
    if (auto it = config_.knowledge_bases.find(lecture->descriptor.lecture_id()); it != config_.knowledge_bases.end()) {
      for (auto& chunk : KnowledgeStore::load(it->second).chunks()) {
        lecture->store.add(std::move(chunk));
      }
    }
    const auto id = lecture->descriptor.lecture_id();
    lectures_.emplace(id, std::move(lecture));
  }
}

void SessionService::recover_sessions() {
  for (const auto& entry : fs::directory_iterator(sessions_root())) {
    if (!entry.is_directory() || !is_uuid(entry.path().filename().string())) continue;
    const auto dir = entry.path();
    if (!fs::exists(dir / kSessionFile)) continue;
    const auto meta = json::parse(read_file(dir / kSessionFile));
    auto e = std::make_shared<Entry>();
    e->record.session_id = meta.at("session_id").get<std::string>();
    e->record.lecture_id = meta.at("lecture_id").get<std::string>();
    e->record.group_mode = quiz_mode_from_string(meta.at("group_mode").get<std::string>());
    e->record.created_at_ms = meta.value("created_at_ms", std::int64_t{0});
    e->record.directory = dir;
    e->record.state = derive_state(dir);
    // Gaze stored but metrics missing: finish the interrupted computation.
    if (e->record.state == SessionState::gaze_uploaded) {
      if (const auto* lecture = find_lecture(e->record.lecture_id)) {
        const auto result = analyze_gaze(read_file(dir / kGazeFile), lecture->descriptor, config_.engine,
                                         e->record.session_id);
        write_file_atomic(dir / kMetricsFile, write_report_json(result.report));
        e->record.state = SessionState::metrics_ready;
      }
    }
    sessions_.emplace(e->record.session_id, std::move(e));
  }
}

const SessionService::Lecture* SessionService::find_lecture(std::string_view lecture_id) const {
  auto it = lectures_.find(lecture_id);
  return it == lectures_.end() ? nullptr : it->second.get();
}

std::shared_ptr<SessionService::Entry> SessionService::find_entry(std::string_view session_id) const {
  std::shared_lock lock(sessions_mutex_);
  auto it = sessions_.find(session_id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::optional<SessionRecord> SessionService::session(std::string_view session_id) const {
  auto e = find_entry(session_id);
  if (!e) return std::nullopt;
  std::lock_guard lock(e->mutex);
  return e->record;
}

std::vector<SessionRecord> SessionService::sessions() const {
  std::vector<std::shared_ptr<Entry>> entries;
  {
    std::shared_lock lock(sessions_mutex_);
    for (const auto& [id, e] : sessions_) entries.push_back(e);
  }
  std::vector<SessionRecord> out;
  for (const auto& e : entries) {
    std::lock_guard lock(e->mutex);
    out.push_back(e->record);
  }
  return out;
}

Response SessionService::create_session(std::string_view body) {
  const auto request = parse_body(body);
  if (!request) {
    return error_response(400, "BAD_REQUEST", "body must be a JSON object");
  }
  const auto lecture_it = request->find("lecture_id");
  const auto mode_it = request->find("group_mode");
  if (lecture_it == request->end() || !lecture_it->is_string() || mode_it == request->end() ||
      !mode_it->is_string()) {
    return error_response(400, "BAD_REQUEST", "lecture_id and group_mode are required strings");
  }
  QuizMode mode;
  try {
    mode = quiz_mode_from_string(mode_it->get<std::string>());
  } catch (const Error&) {
    mode = QuizMode::confusion;
  }
  if (mode == QuizMode::confusion) {
    return error_response(400, "BAD_MODE", "group_mode must be ATTENTIVE or RANDOM");
  }
  const auto lecture_id = lecture_it->get<std::string>();
  if (!find_lecture(lecture_id)) {
    return error_response(404, "LECTURE_NOT_FOUND", "no lecture descriptor for '" + lecture_id + "'");
  }

  auto e = std::make_shared<Entry>();
  e->record.session_id = make_uuid_v4();
  e->record.lecture_id = lecture_id;
  e->record.group_mode = mode;
  e->record.created_at_ms = now_epoch_ms();
  e->record.directory = sessions_root() / e->record.session_id;

  // Build the directory under a temp name, then rename it into place.
  const auto staging = sessions_root() / (e->record.session_id + ".tmp");
  fs::create_directories(staging);
  ordered_json meta;
  meta["session_id"] = e->record.session_id;
  meta["lecture_id"] = lecture_id;
  meta["group_mode"] = to_string(mode);
  meta["created_at_ms"] = e->record.created_at_ms;
  write_file_atomic(staging / kSessionFile, meta.dump(2) + "\n");
  fs::rename(staging, e->record.directory);

  const auto record = e->record;
  {
    std::unique_lock lock(sessions_mutex_);
    sessions_.emplace(record.session_id, std::move(e));
  }
  return json_response(201, json{{"session_id", record.session_id}});
}

Response SessionService::get_session(std::string_view session_id) {
  auto record = session(session_id);
  if (!record) return session_not_found(session_id);
  return json_response(200, session_json(*record));
}

Response SessionService::upload_gaze(std::string_view session_id, std::string_view csv) {
  auto e = find_entry(session_id);
  if (!e) return session_not_found(session_id);
  std::lock_guard lock(e->mutex);
  auto& record = e->record;
  if (record.state != SessionState::created) {
    return wrong_state(record, "CREATED");
  }
  const auto* lecture = find_lecture(record.lecture_id);
  if (!lecture) {
    return error_response(404, "LECTURE_NOT_FOUND", "lecture '" + record.lecture_id + "' is no longer loaded");
  }
  AnalysisResult result;
  try {
    result = analyze_gaze(csv, lecture->descriptor, config_.engine, record.session_id);
  } catch (const Error& err) {
    if (err.code() == ErrorCode::invariant || err.code() == ErrorCode::io) throw;
    return parse_error_response(err);
  }
  const auto report_json = write_report_json(result.report);
  write_file_atomic(record.directory / kGazeFile, csv);
  record.state = SessionState::gaze_uploaded;
  write_file_atomic(record.directory / kMetricsFile, report_json);
  record.state = SessionState::metrics_ready;
  return Response{200, report_json, "application/json"};
}

Response SessionService::create_quiz(std::string_view session_id) {
  auto e = find_entry(session_id);
  if (!e) return session_not_found(session_id);
  std::lock_guard lock(e->mutex);
  auto& record = e->record;
  if (record.state != SessionState::metrics_ready) {
    return wrong_state(record, "METRICS_READY");
  }
  const auto* lecture = find_lecture(record.lecture_id);
  if (!lecture) {
    return error_response(404, "LECTURE_NOT_FOUND", "lecture '" + record.lecture_id + "' is no longer loaded");
  }
  const auto report = parse_report_json(read_file(record.directory / kMetricsFile));
  QuizPlan plan;
  try {
    plan = record.group_mode == QuizMode::attentive
               ? allocate_questions(report, config_.engine)
               : allocate_random(lecture->descriptor.timeline, config_.engine, seed_for_session(record.session_id),
                                 record.session_id);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::no_valid_section) throw;
    return error_response(422, "NO_VALID_SECTION", err.what());
  }
  std::vector<QuizItem> items;
  try {
    const auto grounding = select_grounding(plan, lecture->descriptor, lecture->store, *embedder_);
    items = generate_quiz(plan, lecture->descriptor, grounding, *adapter_, config_.engine);
  } catch (const AdapterError& err) {
    return error_response(502, "ADAPTER_ERROR", err.what());
  } catch (const Error& err) {
    if (err.code() == ErrorCode::malformed_generation) {
      return error_response(502, "MALFORMED_GENERATION", err.what());
    }
    if (err.code() == ErrorCode::missing_grounding) {
      return error_response(422, "MISSING_GROUNDING", err.what());
    }
    throw;
  }
  write_file_atomic(record.directory / kQuizPlanFile, write_quiz_plan_json(plan));
  const auto quiz_text = write_quiz_json(record.session_id, items);
  write_file_atomic(record.directory / kQuizFile, quiz_text);
  record.state = SessionState::quiz_ready;

  json body{{"session_id", record.session_id}, {"plan", to_json(plan)}, {"items", json::array()}};
  for (const auto& item : items) body["items"].push_back(to_json(item));
  return json_response(200, body);
}

Response SessionService::grade(std::string_view session_id, std::string_view body) {
  auto e = find_entry(session_id);
  if (!e) return session_not_found(session_id);
  std::lock_guard lock(e->mutex);
  auto& record = e->record;
  if (record.state != SessionState::quiz_ready) {
    return wrong_state(record, "QUIZ_READY");
  }
  const auto request = parse_body(body);
  if (!request || !request->contains("item_id") || !request->contains("response") ||
      !(*request)["item_id"].is_string() || !(*request)["response"].is_string()) {
    return error_response(400, "BAD_REQUEST", "item_id and response are required strings");
  }
  const auto item_id = (*request)["item_id"].get<std::string>();
  const auto response_text = (*request)["response"].get<std::string>();
  const auto items = parse_quiz_json(read_file(record.directory / kQuizFile));
  auto it = std::find_if(items.begin(), items.end(), [&](const QuizItem& i) { return i.id == item_id; });
  if (it == items.end()) {
    return error_response(404, "ITEM_NOT_FOUND", "no quiz item '" + item_id + "'");
  }
  if (trim(response_text).empty()) {
    return error_response(400, "BAD_REQUEST", "response must be nonempty");
  }
  try {
    return json_response(200, to_json(gazelearn::grade(*it, response_text, *adapter_)));
  } catch (const AdapterError& err) {
    return error_response(502, "ADAPTER_ERROR", err.what());
  }
}

Response SessionService::chat(std::string_view session_id, std::string_view body) {
  auto e = find_entry(session_id);
  if (!e) return session_not_found(session_id);
  std::lock_guard lock(e->mutex);
  auto& record = e->record;
  const auto request = parse_body(body);
  if (!request || !request->contains("text") || !(*request)["text"].is_string() ||
      trim((*request)["text"].get<std::string>()).empty()) {
    return error_response(400, "BAD_REQUEST", "text is a required nonempty string");
  }
  const auto text = (*request)["text"].get<std::string>();
  const auto* lecture = find_lecture(record.lecture_id);
  if (!lecture) {
    return error_response(404, "LECTURE_NOT_FOUND", "lecture '" + record.lecture_id + "' is no longer loaded");
  }
  if (lecture->store.empty()) {
    return error_response(422, "EMPTY_KNOWLEDGE_BASE", "lecture has no knowledge-base content");
  }
  const auto ranked = search(text, lecture->store, *embedder_, config_.chat_top_k);
  std::vector<Chunk> chunks;
  json ids = json::array();
  for (const auto& r : ranked) {
    chunks.push_back(r.chunk);
    ids.push_back(r.chunk.id);
  }
  std::string answer;
  try {
    answer = adapter_->answer(build_grounded_prompt(text, chunks));
  } catch (const AdapterError& err) {
    return error_response(502, "ADAPTER_ERROR", err.what());
  }
  const auto offset = std::max<std::int64_t>(0, now_epoch_ms() - record.created_at_ms);
  const auto chat_path = record.directory / kChatFile;
  std::string log = fs::exists(chat_path) ? read_file(chat_path) : std::string{};
  log += to_jsonl_line(ChatMessage{offset, Author::user, text});
  log += to_jsonl_line(ChatMessage{offset, Author::assistant, answer});
  write_file_atomic(chat_path, log);
  return json_response(200, json{{"answer", answer}, {"grounding_chunk_ids", ids}});
}

Response SessionService::chatquiz(std::string_view session_id) {
  auto e = find_entry(session_id);
  if (!e) return session_not_found(session_id);
  std::lock_guard lock(e->mutex);
  auto& record = e->record;
  const auto* lecture = find_lecture(record.lecture_id);
  if (!lecture) {
    return error_response(404, "LECTURE_NOT_FOUND", "lecture '" + record.lecture_id + "' is no longer loaded");
  }
  const auto chat_path = record.directory / kChatFile;
  const auto messages = fs::exists(chat_path) ? parse_chat_jsonl(read_file(chat_path)) : std::vector<ChatMessage>{};
  const auto confusion = analyze_confusion(messages, lecture->descriptor, *embedder_, lexicon_, record.session_id);
  const auto plan = chatquiz_plan(confusion, lecture->descriptor.timeline, config_.engine);
  std::vector<QuizItem> items;
  try {
    const auto grounding = select_grounding(plan, lecture->descriptor, lecture->store, *embedder_);
    items = generate_quiz(plan, lecture->descriptor, grounding, *adapter_, config_.engine);
  } catch (const AdapterError& err) {
    return error_response(502, "ADAPTER_ERROR", err.what());
  } catch (const Error& err) {
    if (err.code() == ErrorCode::malformed_generation) {
      return error_response(502, "MALFORMED_GENERATION", err.what());
    }
    if (err.code() == ErrorCode::missing_grounding) {
      return error_response(422, "MISSING_GROUNDING", err.what());
    }
    throw;
  }
  json body{{"session_id", record.session_id},
            {"confusion", to_json(confusion)},
            {"plan", to_json(plan)},
            {"items", json::array()}};
  for (const auto& item : items) body["items"].push_back(to_json(item));
  write_file_atomic(record.directory / kChatQuizFile, body.dump(2) + "\n");
  return json_response(200, body);
}

std::string make_uuid_v4() {
  static thread_local std::mt19937_64 engine{std::random_device{}() ^
                                             static_cast<std::uint64_t>(now_epoch_ms())};
  const std::uint64_t hi = (engine() & 0xFFFFFFFFFFFF0FFFULL) | 0x0000000000004000ULL;
  const std::uint64_t lo = (engine() & 0x3FFFFFFFFFFFFFFFULL) | 0x8000000000000000ULL;
  char buf[37];
  std::snprintf(buf, sizeof(buf), "%08x-%04x-%04x-%04x-%012llx", static_cast<unsigned>(hi >> 32),
                static_cast<unsigned>((hi >> 16) & 0xFFFF), static_cast<unsigned>(hi & 0xFFFF),
                static_cast<unsigned>(lo >> 48), static_cast<unsigned long long>(lo & 0xFFFFFFFFFFFFULL));
  return buf;
}

bool is_uuid(std::string_view text) {
  static const std::regex pattern("^[0-9a-f]{8}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{12}$");
  return std::regex_match(text.begin(), text.end(), pattern);
}

}  // namespace gazelearn::service
