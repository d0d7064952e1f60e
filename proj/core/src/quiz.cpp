#include "gazelearn/quiz.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include <nlohmann/json.hpp>

#include "gazelearn/apportion.hpp"
#include "gazelearn/format.hpp"
#include "gazelearn/rng.hpp"

namespace gazelearn {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string clock_text(std::int64_t ms) {
  const auto total_s = ms / 1000;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%02lld:%02lld", static_cast<long long>(total_s / 60),
                static_cast<long long>(total_s % 60));
  return buf;
}

std::string item_id(std::size_t ordinal) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "q-%03zu", ordinal + 1);
  return buf;
}

std::optional<QuizItem> to_quiz_item(const GeneratedItem& g) {
  QuizItem item;
  item.section_index = g.section_index;
  if (g.kind == "MCQ") {
    item.kind = QuestionKind::mcq;
    item.options = g.options;
  } else if (g.kind == "SHORT_ANSWER") {
    item.kind = QuestionKind::short_answer;
  } else {
    return std::nullopt;
  }
  item.stem = g.stem;
  item.answer_key = g.answer_key;
  try {
    validate_quiz_item(item);
  } catch (const InvariantError&) {
    return std::nullopt;
  }
  return item;
}

}  // namespace

const char* to_string(QuizMode mode) {
  switch (mode) {
    case QuizMode::attentive: return "ATTENTIVE";
    case QuizMode::random: return "RANDOM";
    case QuizMode::confusion: return "CONFUSION";
  }
  return "ATTENTIVE";
}

QuizMode quiz_mode_from_string(std::string_view text) {
  const auto lower = to_lower_ascii(text);
  if (lower == "attentive") return QuizMode::attentive;
  if (lower == "random") return QuizMode::random;
  if (lower == "confusion") return QuizMode::confusion;
  throw Error(ErrorCode::invalid_argument, "unknown quiz mode '" + std::string(text) + "'");
}

const char* to_string(QuestionKind kind) { return kind == QuestionKind::mcq ? "MCQ" : "SHORT_ANSWER"; }

QuestionKind question_kind_from_string(std::string_view text) {
  if (text == "MCQ") return QuestionKind::mcq;
  if (text == "SHORT_ANSWER") return QuestionKind::short_answer;
  throw Error(ErrorCode::format, "unknown question kind '" + std::string(text) + "'");
}

int QuizPlan::count_for(int section_index) const {
  for (const auto& a : allocation) {
    if (a.section_index == section_index) return a.question_count;
  }
  return 0;
}

std::vector<int> QuizPlan::counts() const {
  std::vector<int> out;
  for (const auto& a : allocation) out.push_back(a.question_count);
  return out;
}

void validate_quiz_item(const QuizItem& item) {
  if (trim(item.stem).empty()) {
    throw InvariantError(Violation::empty_label, "quiz item stem is empty");
  }
  if (trim(item.answer_key).empty()) {
    throw InvariantError(Violation::mcq_key, "quiz item answer key is empty");
  }
  if (item.kind == QuestionKind::mcq) {
    if (!item.options || item.options->size() < 2) {
      throw InvariantError(Violation::mcq_options, "MCQ needs at least two options");
    }
    if (std::find(item.options->begin(), item.options->end(), item.answer_key) == item.options->end()) {
      throw InvariantError(Violation::mcq_key, "MCQ answer key must be one of the options");
    }
  }
}

QuizPlan allocate_questions(const AttentionReport& report, const EngineConfig& config) {
  config.validate();
  std::vector<double> deficits;
  std::vector<bool> eligible;
  for (const auto& s : report.sections) {
    deficits.push_back(std::clamp(1.0 - s.adi, 0.0, 1.0));
    eligible.push_back(s.valid);
  }
  if (std::none_of(eligible.begin(), eligible.end(), [](bool v) { return v; })) {
    throw Error(ErrorCode::no_valid_section, "attention report has no valid section to personalize on");
  }
  const auto seats = largest_remainder(deficits, eligible, config.question_count);
  QuizPlan plan;
  plan.session_id = report.session_id;
  plan.mode = QuizMode::attentive;
  plan.difficulty = config.difficulty;
  plan.total = config.question_count;
  for (std::size_t k = 0; k < report.sections.size(); ++k) {
    plan.allocation.push_back(SectionAllocation{report.sections[k].index, seats[k]});
  }
  return plan;
}

QuizPlan allocate_random(const LectureTimeline& timeline, const EngineConfig& config, std::uint64_t seed,
                         std::string session_id) {
  config.validate();
  Rng rng(seed);
  std::vector<int> counts(timeline.section_count(), 0);
  for (int q = 0; q < config.question_count; ++q) {
    ++counts[rng.uniform_index(counts.size())];
  }
  QuizPlan plan;
  plan.session_id = std::move(session_id);
  plan.mode = QuizMode::random;
  plan.difficulty = config.difficulty;
  plan.total = config.question_count;
  for (const auto& s : timeline.sections()) {
    plan.allocation.push_back(SectionAllocation{s.index, counts[static_cast<std::size_t>(s.index - 1)]});
  }
  return plan;
}

std::uint64_t seed_for_session(std::string_view session_id) { return fnv1a64(session_id); }

void add_lecture_sections(KnowledgeStore& store, const LectureDescriptor& lecture, const Embedder& embedder) {
  for (const auto& info : lecture.sections) {
    if (trim(info.content_text).empty()) continue;
    store.add_document(lecture.lecture_id() + "-s" + std::to_string(info.index), info.content_text, info.index,
                       embedder);
  }
}

GroundingMap select_grounding(const QuizPlan& plan, const LectureDescriptor& lecture, const KnowledgeStore& store,
                              const Embedder& embedder, std::size_t per_section) {
  GroundingMap grounding;
  for (const auto& a : plan.allocation) {
    if (a.question_count <= 0) continue;
    const auto& info = lecture.section_info(a.section_index);
    const auto query = embedder.embed(info.title + "\n" + info.content_text);
    std::vector<Chunk> picked;
    for (auto& scored : store.search_section(query, a.section_index, per_section)) {
      picked.push_back(std::move(scored.chunk));
    }
    std::sort(picked.begin(), picked.end(), [](const Chunk& x, const Chunk& y) { return x.id < y.id; });
    grounding[a.section_index] = std::move(picked);
  }
  return grounding;
}

std::string build_quiz_prompt(const QuizPlan& plan, const LectureDescriptor& lecture, const GroundingMap& grounding,
                              const EngineConfig& config) {
  (void)config;
  if (plan.total <= 0) {
    throw Error(ErrorCode::empty_plan, "quiz plan requests zero questions");
  }
  for (const auto& a : plan.allocation) {
    if (a.question_count <= 0) continue;
    auto it = grounding.find(a.section_index);
    if (it == grounding.end() || it->second.empty()) {
      throw MissingGroundingError(a.section_index);
    }
  }

  const std::string difficulty = to_string(plan.difficulty);
  std::string out;
  out += "You are writing a post-lecture review quiz for lecture \"" + lecture.lecture_id() + "\".\n";
  out += "Write exactly " + std::to_string(plan.total) + " question(s) at " + difficulty +
         " difficulty, distributed over the sections below as requested. Every question must be "
         "answerable from the excerpts given for its section.\n";

  ordered_json request;
  request["lecture_id"] = lecture.lecture_id();
  request["difficulty"] = difficulty;
  request["total"] = plan.total;
  request["sections"] = ordered_json::array();

  for (const auto& a : plan.allocation) {
    if (a.question_count <= 0) continue;
    const auto& section = lecture.timeline.section(a.section_index);
    const auto& info = lecture.section_info(a.section_index);
    out += "\n## Section " + std::to_string(a.section_index) + ": " + info.title + " (" +
           clock_text(section.start_ms) + "-" + clock_text(section.end_ms) + ")\n";
    out += "Questions requested: " + std::to_string(a.question_count) + "\n";
    out += "Difficulty: " + difficulty + "\n";
    out += "Excerpts:\n";
    auto chunks = grounding.at(a.section_index);
    std::sort(chunks.begin(), chunks.end(), [](const Chunk& x, const Chunk& y) { return x.id < y.id; });
    ordered_json ids = ordered_json::array();
    for (const auto& c : chunks) {
      out += "[" + c.id + "] " + c.text + "\n";
      ids.push_back(c.id);
    }
    request["sections"].push_back(ordered_json{{"index", a.section_index},
                                               {"count", a.question_count},
                                               {"title", info.title},
                                               {"chunk_ids", ids}});
  }

  out += "\n## Output format\n";
  out += "Reply with one JSON object and nothing else:\n";
  out += R"({"items": [{"section_index": <int>, "kind": "MCQ" | "SHORT_ANSWER", "stem": <string>, )"
         R"("options": [<string>, ...], "answer_key": <string>}]})";
  out += "\nMCQ items need at least two options and answer_key must equal one of them. "
         "Omit \"options\" for SHORT_ANSWER items.\n";
  out += "\n## Request\n";
  out += request.dump();
  out += "\n";
  return out;
}

std::vector<QuizItem> generate_quiz(const QuizPlan& plan, const LectureDescriptor& lecture,
                                    const GroundingMap& grounding, TextAdapter& adapter, const EngineConfig& config) {
  std::map<int, int> remaining;
  for (const auto& a : plan.allocation) {
    if (a.question_count > 0) remaining[a.section_index] = a.question_count;
  }
  std::vector<QuizItem> collected;
  for (int attempt = 0; attempt <= config.generation_retry_budget; ++attempt) {
    QuizPlan outstanding = plan;
    outstanding.total = 0;
    for (auto& a : outstanding.allocation) {
      a.question_count = remaining.count(a.section_index) ? remaining[a.section_index] : 0;
      outstanding.total += a.question_count;
    }
    if (outstanding.total == 0) break;
    const auto prompt = build_quiz_prompt(outstanding, lecture, grounding, config);
    const auto response = adapter.generate(GenerationRequest{prompt, outstanding.total});
    for (const auto& generated : response.items) {
      auto it = remaining.find(generated.section_index);
      if (it == remaining.end() || it->second == 0) continue;
      if (auto item = to_quiz_item(generated)) {
        collected.push_back(std::move(*item));
        --it->second;
      }
    }
  }
  for (const auto& [section, left] : remaining) {
    if (left > 0) {
      throw Error(ErrorCode::malformed_generation,
                  "section " + std::to_string(section) + " still lacks " + std::to_string(left) +
                      " well-formed item(s) after " + std::to_string(config.generation_retry_budget) +
                      " retries");
    }
  }
  std::stable_sort(collected.begin(), collected.end(),
                   [](const QuizItem& a, const QuizItem& b) { return a.section_index < b.section_index; });
  for (std::size_t i = 0; i < collected.size(); ++i) {
    auto& item = collected[i];
    item.id = item_id(i);
    if (auto it = grounding.find(item.section_index); it != grounding.end()) {
      for (const auto& c : it->second) item.grounding_chunk_ids.push_back(c.id);
      std::sort(item.grounding_chunk_ids.begin(), item.grounding_chunk_ids.end());
    }
  }
  return collected;
}

GradeResult grade(const QuizItem& item, std::string_view response, TextAdapter& adapter) {
  if (trim(response).empty()) {
    throw Error(ErrorCode::invalid_argument, "response must be nonempty");
  }
  if (item.kind == QuestionKind::mcq) {
    const bool correct = normalize_answer(response) == normalize_answer(item.answer_key);
    return GradeResult{item.id, correct, correct ? 1.0 : 0.0,
                       correct ? "Matches the answer key." : "Expected " + item.answer_key + "."};
  }
  const auto graded = adapter.grade(GradeRequest{item.stem, item.answer_key, std::string(response)});
  return GradeResult{item.id, graded.correct, std::clamp(graded.score, 0.0, 1.0), graded.rationale};
}

json to_json(const QuizPlan& plan) {
  ordered_json j;
  j["session_id"] = plan.session_id;
  j["mode"] = to_string(plan.mode);
  j["difficulty"] = to_string(plan.difficulty);
  j["total"] = plan.total;
  j["allocation"] = ordered_json::array();
  for (const auto& a : plan.allocation) {
    j["allocation"].push_back(ordered_json{{"section_index", a.section_index}, {"question_count", a.question_count}});
  }
  return json::parse(j.dump());
}

QuizPlan quiz_plan_from_json(const json& j) {
  try {
    QuizPlan plan;
    plan.session_id = j.at("session_id").get<std::string>();
    plan.mode = quiz_mode_from_string(j.at("mode").get<std::string>());
    plan.difficulty = difficulty_from_string(j.at("difficulty").get<std::string>());
    plan.total = j.at("total").get<int>();
    int sum = 0;
    for (const auto& a : j.at("allocation")) {
      SectionAllocation alloc{a.at("section_index").get<int>(), a.at("question_count").get<int>()};
      if (alloc.question_count < 0) {
        throw InvariantError(Violation::plan_total, "negative question count");
      }
      sum += alloc.question_count;
      plan.allocation.push_back(alloc);
    }
    if (sum != plan.total) {
      throw InvariantError(Violation::plan_total, "allocation does not sum to total");
    }
    return plan;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::format, std::string("quiz plan: ") + e.what());
  }
}

json to_json(const QuizItem& item) {
  json j;
  j["id"] = item.id;
  j["section_index"] = item.section_index;
  j["kind"] = to_string(item.kind);
  j["stem"] = item.stem;
  if (item.options) j["options"] = *item.options;
  j["answer_key"] = item.answer_key;
  j["grounding_chunk_ids"] = item.grounding_chunk_ids;
  return j;
}

QuizItem quiz_item_from_json(const json& j) {
  try {
    QuizItem item;
    item.id = j.at("id").get<std::string>();
    item.section_index = j.at("section_index").get<int>();
    item.kind = question_kind_from_string(j.at("kind").get<std::string>());
    item.stem = j.at("stem").get<std::string>();
    if (auto it = j.find("options"); it != j.end() && !it->is_null()) {
      item.options = it->get<std::vector<std::string>>();
    }
    item.answer_key = j.at("answer_key").get<std::string>();
    item.grounding_chunk_ids = j.value("grounding_chunk_ids", std::vector<std::string>{});
    validate_quiz_item(item);
    return item;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::format, std::string("quiz item: ") + e.what());
  }
}

json to_json(const GradeResult& result) {
  json j;
  j["item_id"] = result.item_id;
  j["correct"] = result.correct;
  j["score"] = result.score;
  j["rationale"] = result.rationale;
  return j;
}

std::string write_quiz_json(std::string_view session_id, const std::vector<QuizItem>& items) {
  ordered_json doc;
  doc["session_id"] = std::string(session_id);
  doc["items"] = ordered_json::array();
  for (const auto& item : items) {
    ordered_json j;
    j["id"] = item.id;
    j["section_index"] = item.section_index;
    j["kind"] = to_string(item.kind);
    j["stem"] = item.stem;
    if (item.options) j["options"] = *item.options;
    j["answer_key"] = item.answer_key;
    j["grounding_chunk_ids"] = item.grounding_chunk_ids;
    doc["items"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

std::vector<QuizItem> parse_quiz_json(std::string_view text) {
  try {
    const auto doc = json::parse(text);
    std::vector<QuizItem> items;
    for (const auto& j : doc.at("items")) items.push_back(quiz_item_from_json(j));
    return items;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::format, std::string("quiz: ") + e.what());
  }
}

std::string write_quiz_plan_json(const QuizPlan& plan) {
  ordered_json j;
  j["session_id"] = plan.session_id;
  j["mode"] = to_string(plan.mode);
  j["difficulty"] = to_string(plan.difficulty);
  j["total"] = plan.total;
  j["allocation"] = ordered_json::array();
  for (const auto& a : plan.allocation) {
    j["allocation"].push_back(ordered_json{{"section_index", a.section_index}, {"question_count", a.question_count}});
  }
  return j.dump(2) + "\n";
}

}  // namespace gazelearn
