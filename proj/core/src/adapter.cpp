#include "gazelearn/adapter.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

#include "gazelearn/errors.hpp"
#include "gazelearn/format.hpp"

namespace gazelearn {

using nlohmann::json;

json to_json(const GenerationRequest& request) {
  return json{{"prompt", request.prompt}, {"max_items", request.max_items}};
}

json to_json(const GenerationResponse& response) {
  json items = json::array();
  for (const auto& item : response.items) {
    json j{{"section_index", item.section_index}, {"kind", item.kind}, {"stem", item.stem}};
    if (item.options) j["options"] = *item.options;
    j["answer_key"] = item.answer_key;
    items.push_back(std::move(j));
  }
  return json{{"items", items}};
}

json to_json(const GradeRequest& request) {
  return json{{"stem", request.stem}, {"answer_key", request.answer_key}, {"response", request.response}};
}

json to_json(const GradeResponse& response) {
  return json{{"correct", response.correct}, {"score", response.score}, {"rationale", response.rationale}};
}

GenerationRequest generation_request_from_json(const json& j) {
  return GenerationRequest{j.at("prompt").get<std::string>(), j.at("max_items").get<int>()};
}

GenerationResponse generation_response_from_json(const json& j) {
  GenerationResponse response;
  for (const auto& item : j.at("items")) {
    GeneratedItem g;
    g.section_index = item.at("section_index").get<int>();
    g.kind = item.at("kind").get<std::string>();
    g.stem = item.at("stem").get<std::string>();
    if (auto it = item.find("options"); it != item.end() && !it->is_null()) {
      g.options = it->get<std::vector<std::string>>();
    }
    g.answer_key = item.at("answer_key").get<std::string>();
    response.items.push_back(std::move(g));
  }
  return response;
}

GradeRequest grade_request_from_json(const json& j) {
  return GradeRequest{j.at("stem").get<std::string>(), j.at("answer_key").get<std::string>(),
                      j.at("response").get<std::string>()};
}

GradeResponse grade_response_from_json(const json& j) {
  return GradeResponse{j.at("correct").get<bool>(), j.at("score").get<double>(),
                       j.value("rationale", std::string{})};
}

std::string normalize_answer(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : trim(text)) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out += ' ';
    pending_space = false;
    out += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
  }
  return out;
}

GenerationResponse MockAdapter::generate(const GenerationRequest& request) {
  constexpr std::string_view marker = "## Request\n";
  const auto pos = request.prompt.rfind(marker);
  if (pos == std::string::npos) {
    throw AdapterError("mock adapter: prompt carries no request block");
  }
  const auto line_end = request.prompt.find('\n', pos + marker.size());
  const auto block = request.prompt.substr(pos + marker.size(), line_end == std::string::npos
                                                                    ? std::string::npos
                                                                    : line_end - pos - marker.size());
  json spec;
  try {
    spec = json::parse(block);
  } catch (const json::exception& e) {
    throw AdapterError(std::string("mock adapter: unreadable request block: ") + e.what());
  }
  const auto difficulty = spec.value("difficulty", std::string("medium"));
  GenerationResponse response;
  for (const auto& section : spec.at("sections")) {
    const int index = section.at("index").get<int>();
    const int count = section.at("count").get<int>();
    const auto title = section.value("title", "Section " + std::to_string(index));
    for (int j = 0; j < count && static_cast<int>(response.items.size()) < request.max_items; ++j) {
      GeneratedItem item;
      item.section_index = index;
      if (j % 2 == 0) {
        static const std::vector<std::string> letters{"A", "B", "C", "D"};
        item.kind = "MCQ";
        item.stem = "(" + difficulty + ") Which option best describes a key idea of \"" + title +
                    "\"? [variant " + std::to_string(j + 1) + "]";
        item.options = letters;
        item.answer_key = letters[fnv1a64(title + "#" + std::to_string(j)) % letters.size()];
      } else {
        item.kind = "SHORT_ANSWER";
        item.stem = "(" + difficulty + ") Name the topic covered in section " + std::to_string(index) +
                    ". [variant " + std::to_string(j + 1) + "]";
        item.answer_key = title;
      }
      response.items.push_back(std::move(item));
    }
  }
  return response;
}

GradeResponse MockAdapter::grade(const GradeRequest& request) {
  const bool correct = normalize_answer(request.response) == normalize_answer(request.answer_key);
  return GradeResponse{correct, correct ? 1.0 : 0.0,
                       correct ? "Response matches the reference answer."
                               : "Response differs from the reference answer: " + request.answer_key};
}

std::string MockAdapter::answer(std::string_view prompt) {
  constexpr std::string_view marker = "## Lecture material\n";
  const auto pos = prompt.find(marker);
  if (pos != std::string_view::npos) {
    const auto start = pos + marker.size();
    const auto end = prompt.find('\n', start);
    const auto line = prompt.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    const auto close = line.find("] ");
    if (line.starts_with("[") && close != std::string_view::npos) {
      std::istringstream words{std::string(line.substr(close + 2))};
      std::string word, excerpt;
      for (int n = 0; n < 40 && words >> word; ++n) {
        excerpt += (n ? " " : "") + word;
      }
      return "According to " + std::string(line.substr(0, close + 1)) + ": " + excerpt;
    }
  }
  return "The lecture material does not cover this question.";
}

}  // namespace gazelearn
