#include "gazelearn/confusion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gazelearn/apportion.hpp"
#include "gazelearn/format.hpp"

namespace gazelearn {
namespace {

using nlohmann::json;

bool is_word_char(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '\'' || c >= 0x80;
}

const char* author_name(Author a) { return a == Author::user ? "USER" : "ASSISTANT"; }

}  // namespace

std::string to_jsonl_line(const ChatMessage& message) {
  nlohmann::ordered_json j;
  j["t_ms"] = message.t_ms;
  j["author"] = author_name(message.author);
  j["text"] = message.text;
  return j.dump() + "\n";
}

std::vector<ChatMessage> parse_chat_jsonl(std::string_view text) {
  std::vector<ChatMessage> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto j = json::parse(line);
      ChatMessage m;
      m.t_ms = j.at("t_ms").get<std::int64_t>();
      const auto author = j.at("author").get<std::string>();
      if (author == "USER") {
        m.author = Author::user;
      } else if (author == "ASSISTANT") {
        m.author = Author::assistant;
      } else {
        throw Error(ErrorCode::format, "chat log line " + std::to_string(line_no) + ": unknown author " + author);
      }
      m.text = j.at("text").get<std::string>();
      out.push_back(std::move(m));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::format, "chat log line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

Lexicon Lexicon::defaults() {
  return Lexicon{{
      "confused",      "confusing",      "confusion",     "don't understand", "do not understand",
      "don't get",     "do not get",     "not sure",      "unsure",           "unclear",
      "lost",          "doesn't make sense", "does not make sense", "no idea", "struggling",
      "stuck",         "i think",        "maybe",         "perhaps",          "what does",
      "what is the difference", "how come", "why",        "hard to follow",   "difficult",
  }};
}

Lexicon Lexicon::from_json(std::string_view text) {
  try {
    Lexicon lexicon;
    for (const auto& m : json::parse(text)) {
      auto marker = to_lower_ascii(trim(m.get<std::string>()));
      if (!marker.empty()) lexicon.markers.push_back(std::move(marker));
    }
    if (lexicon.markers.empty()) {
      throw Error(ErrorCode::format, "lexicon must contain at least one marker");
    }
    return lexicon;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::format, std::string("lexicon: ") + e.what());
  }
}

SectionProfiles::SectionProfiles(const LectureDescriptor& lecture, const Embedder& embedder) {
  for (const auto& info : lecture.sections) {
    profiles_.push_back(Profile{info.index, embedder.embed(info.title + "\n" + info.content_text)});
  }
}

std::optional<int> attribute_message(const ChatMessage& message, const SectionProfiles& profiles,
                                     const Embedder& embedder, double threshold) {
  const auto query = embedder.embed(message.text);
  std::optional<int> best;
  double best_score = -2.0;
  for (const auto& p : profiles.profiles()) {
    const double score = cosine_similarity(query, p.embedding);
    if (score > best_score) {
      best_score = score;
      best = p.section_index;
    }
  }
  if (!best || best_score < threshold) {
    return std::nullopt;
  }
  return best;
}

int count_marker_hits(std::string_view text, const Lexicon& lexicon) {
  const auto lower = to_lower_ascii(text);
  int hits = 0;
  for (const auto& marker : lexicon.markers) {
    if (marker.empty()) continue;
    std::size_t pos = 0;
    while ((pos = lower.find(marker, pos)) != std::string::npos) {
      const bool left_ok = pos == 0 || !is_word_char(static_cast<unsigned char>(lower[pos - 1]));
      const std::size_t end = pos + marker.size();
      const bool right_ok = end >= lower.size() || !is_word_char(static_cast<unsigned char>(lower[end]));
      if (left_ok && right_ok) {
        ++hits;
        pos = end;
      } else {
        ++pos;
      }
    }
  }
  return hits;
}

double message_confusion(std::string_view text, const Lexicon& lexicon) {
  const int questions = static_cast<int>(std::count(text.begin(), text.end(), '?'));
  const int evidence = count_marker_hits(text, lexicon) + questions;
  return 1.0 - std::exp(-static_cast<double>(evidence) / 2.0);
}

double confusion_score(std::span<const ChatMessage> messages, const Lexicon& lexicon) {
  double sum = 0.0;
  int n = 0;
  for (const auto& m : messages) {
    if (m.author != Author::user || trim(m.text).empty()) continue;
    sum += message_confusion(m.text, lexicon);
    ++n;
  }
  return n == 0 ? 0.0 : sum / n;
}

ConfusionReport analyze_confusion(std::span<const ChatMessage> messages, const LectureDescriptor& lecture,
                                  const Embedder& embedder, const Lexicon& lexicon, std::string session_id) {
  const SectionProfiles profiles(lecture, embedder);
  const std::size_t n = lecture.timeline.section_count();
  std::vector<std::vector<ChatMessage>> per_section(n);
  ConfusionReport report;
  report.session_id = std::move(session_id);
  for (const auto& m : messages) {
    if (m.author != Author::user || trim(m.text).empty()) continue;
    if (auto section = attribute_message(m, profiles, embedder)) {
      per_section[static_cast<std::size_t>(*section - 1)].push_back(m);
    } else {
      ++report.general_count;
    }
  }
  for (const auto& bucket : per_section) {
    report.confusion.push_back(confusion_score(bucket, lexicon));
    report.attributed_counts.push_back(static_cast<int>(bucket.size()));
  }
  return report;
}

QuizPlan chatquiz_plan(const ConfusionReport& report, const LectureTimeline& timeline, const EngineConfig& config) {
  config.validate();
  if (report.confusion.size() != timeline.section_count()) {
    throw Error(ErrorCode::invalid_argument, "confusion report and timeline differ in section count");
  }
  const auto seats = largest_remainder(report.confusion, config.question_count);
  QuizPlan plan;
  plan.session_id = report.session_id;
  plan.mode = QuizMode::confusion;
  plan.difficulty = config.difficulty;
  plan.total = config.question_count;
  for (const auto& s : timeline.sections()) {
    plan.allocation.push_back(SectionAllocation{s.index, seats[static_cast<std::size_t>(s.index - 1)]});
  }
  return plan;
}

json to_json(const ConfusionReport& report) {
  json sections = json::array();
  for (std::size_t k = 0; k < report.confusion.size(); ++k) {
    sections.push_back(json{{"index", static_cast<int>(k + 1)},
                            {"confusion", report.confusion[k]},
                            {"message_count", report.attributed_counts[k]}});
  }
  return json{{"session_id", report.session_id}, {"sections", sections}, {"general_count", report.general_count}};
}

}  // namespace gazelearn
