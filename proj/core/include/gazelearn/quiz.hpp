#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gazelearn/adapter.hpp"
#include "gazelearn/attention_metrics.hpp"
#include "gazelearn/lecture.hpp"
#include "gazelearn/retrieval.hpp"

namespace gazelearn {

enum class QuizMode { attentive, random, confusion };

const char* to_string(QuizMode mode);
QuizMode quiz_mode_from_string(std::string_view text);

struct SectionAllocation {
  int section_index = 0;
  int question_count = 0;
  friend bool operator==(const SectionAllocation&, const SectionAllocation&) = default;
};

struct QuizPlan {
  std::string session_id;
  QuizMode mode = QuizMode::attentive;
  std::vector<SectionAllocation> allocation;  // one entry per timeline section, in order
  Difficulty difficulty = Difficulty::medium;
  int total = 0;

  int count_for(int section_index) const;
  std::vector<int> counts() const;
  friend bool operator==(const QuizPlan&, const QuizPlan&) = default;
};

enum class QuestionKind { mcq, short_answer };

const char* to_string(QuestionKind kind);
QuestionKind question_kind_from_string(std::string_view text);

struct QuizItem {
  std::string id;
  int section_index = 0;
  QuestionKind kind = QuestionKind::mcq;
  std::string stem;
  std::optional<std::vector<std::string>> options;
  std::string answer_key;
  std::vector<std::string> grounding_chunk_ids;

  friend bool operator==(const QuizItem&, const QuizItem&) = default;
};

/// Throws InvariantError unless the item is well formed (MCQ: ≥ 2 options
/// and the key among them; nonempty stem and key).
void validate_quiz_item(const QuizItem& item);

struct GradeResult {
  std::string item_id;
  bool correct = false;
  double score = 0.0;
  std::string rationale;
};

/// Attention-driven allocation. Deficit 1 - adi over valid sections,
/// apportioned by largest remainder; invalid sections get 0.
/// Throws Error(no_valid_section) when no section is valid.
QuizPlan allocate_questions(const AttentionReport& report, const EngineConfig& config);

/// Control-condition allocation: each question to a uniformly random section.
QuizPlan allocate_random(const LectureTimeline& timeline, const EngineConfig& config, std::uint64_t seed,
                         std::string session_id = {});

/// Random-mode seed for a session: FNV-1a of the session id.
std::uint64_t seed_for_session(std::string_view session_id);

using GroundingMap = std::map<int, std::vector<Chunk>>;

/// Chunks every section's content_text into the store as document
/// "<lecture_id>-s<k>", tagged with section k. Empty sections are skipped.
void add_lecture_sections(KnowledgeStore& store, const LectureDescriptor& lecture, const Embedder& embedder);

/// Picks grounding chunks for every section with questions: the section's
/// chunks ranked against its title and text, best `per_section` kept and
/// ordered by id.
GroundingMap select_grounding(const QuizPlan& plan, const LectureDescriptor& lecture, const KnowledgeStore& store,
                              const Embedder& embedder, std::size_t per_section = 3);

/// Deterministic generation prompt. Throws Error(empty_plan) for total 0 and
/// MissingGroundingError for a targeted section without chunks.
std::string build_quiz_prompt(const QuizPlan& plan, const LectureDescriptor& lecture, const GroundingMap& grounding,
                              const EngineConfig& config);

/// Calls the adapter until each section has its planned number of well-formed
/// items, re-requesting only the shortfall, up to config.generation_retry_budget
/// retries. Items are returned ordered by id.
/// Throws AdapterError (transport) or Error(malformed_generation).
std::vector<QuizItem> generate_quiz(const QuizPlan& plan, const LectureDescriptor& lecture,
                                    const GroundingMap& grounding, TextAdapter& adapter, const EngineConfig& config);

/// MCQ graded locally by normalized key equality; short answers go to the adapter.
GradeResult grade(const QuizItem& item, std::string_view response, TextAdapter& adapter);

nlohmann::json to_json(const QuizPlan& plan);
QuizPlan quiz_plan_from_json(const nlohmann::json& j);
nlohmann::json to_json(const QuizItem& item);
QuizItem quiz_item_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GradeResult& result);

/// {"session_id": ..., "items": [...]}
std::string write_quiz_json(std::string_view session_id, const std::vector<QuizItem>& items);
std::vector<QuizItem> parse_quiz_json(std::string_view text);
std::string write_quiz_plan_json(const QuizPlan& plan);

}  // namespace gazelearn
