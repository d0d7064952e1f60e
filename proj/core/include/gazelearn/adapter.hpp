#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace gazelearn {

// Wire contract with a text-generation backend.
//   generate: {prompt, max_items}        -> {items: [{section_index, kind, stem, options?, answer_key}]}
//   grade:    {stem, answer_key, response} -> {correct, score, rationale}
//   answer:   {prompt}                     -> {answer}

struct GenerationRequest {
  std::string prompt;
  int max_items = 0;
};

struct GeneratedItem {
  int section_index = 0;
  std::string kind;  // "MCQ" or "SHORT_ANSWER"; validated by the quiz module
  std::string stem;
  std::optional<std::vector<std::string>> options;
  std::string answer_key;
};

struct GenerationResponse {
  std::vector<GeneratedItem> items;
};

struct GradeRequest {
  std::string stem;
  std::string answer_key;
  std::string response;
};

struct GradeResponse {
  bool correct = false;
  double score = 0.0;
  std::string rationale;
};

nlohmann::json to_json(const GenerationRequest& request);
nlohmann::json to_json(const GenerationResponse& response);
nlohmann::json to_json(const GradeRequest& request);
nlohmann::json to_json(const GradeResponse& response);
GenerationRequest generation_request_from_json(const nlohmann::json& j);
GenerationResponse generation_response_from_json(const nlohmann::json& j);
GradeRequest grade_request_from_json(const nlohmann::json& j);
GradeResponse grade_response_from_json(const nlohmann::json& j);

/// Transport failures surface as AdapterError.
class TextAdapter {
 public:
  virtual ~TextAdapter() = default;
  virtual GenerationResponse generate(const GenerationRequest& request) = 0;
  virtual GradeResponse grade(const GradeRequest& request) = 0;
  virtual std::string answer(std::string_view prompt) = 0;
};

/// Case-folded, whitespace-collapsed, trimmed.
std::string normalize_answer(std::string_view text);

/// Deterministic stand-in for a model. Reads the request block that
/// build_quiz_prompt appends, fills one templated item per requested
/// question, grades by normalized exact match, and answers chat prompts by
/// quoting the top excerpt.
class MockAdapter final : public TextAdapter {
 public:
  GenerationResponse generate(const GenerationRequest& request) override;
  GradeResponse grade(const GradeRequest& request) override;
  std::string answer(std::string_view prompt) override;
};

}  // namespace gazelearn
