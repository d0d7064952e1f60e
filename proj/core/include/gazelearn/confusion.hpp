#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gazelearn/lecture.hpp"
#include "gazelearn/quiz.hpp"
#include "gazelearn/retrieval.hpp"

namespace gazelearn {

enum class Author { user, assistant };

struct ChatMessage {
  std::int64_t t_ms = 0;
  Author author = Author::user;
  std::string text;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

/// Chat log persisted as JSON lines: {"t_ms": .., "author": "USER"|"ASSISTANT", "text": ..}
std::string to_jsonl_line(const ChatMessage& message);
std::vector<ChatMessage> parse_chat_jsonl(std::string_view text);

/// Confusion markers: lowercase phrases matched on word boundaries.
struct Lexicon {
  std::vector<std::string> markers;

  static Lexicon defaults();
  /// JSON array of marker strings.
  static Lexicon from_json(std::string_view text);
};

/// One embedding per lecture section, built from its title and text.
class SectionProfiles {
 public:
  SectionProfiles(const LectureDescriptor& lecture, const Embedder& embedder);

  struct Profile {
    int section_index;
    std::vector<double> embedding;
  };
  std::span<const Profile> profiles() const noexcept { return profiles_; }

 private:
  std::vector<Profile> profiles_;
};

inline constexpr double kAttributionThreshold = 0.2;

/// Section whose profile is most cosine-similar to the message (ties to the
/// lower index), or nullopt (the general bucket) when the best similarity is
/// under the threshold.
std::optional<int> attribute_message(const ChatMessage& message, const SectionProfiles& profiles,
                                     const Embedder& embedder, double threshold = kAttributionThreshold);

/// Marker occurrences in the text (case-insensitive, word-bounded).
int count_marker_hits(std::string_view text, const Lexicon& lexicon);

/// 1 - exp(-(marker_hits + question_marks) / 2) for one message.
double message_confusion(std::string_view text, const Lexicon& lexicon);

/// Mean message_confusion over USER messages; 0 when there are none.
double confusion_score(std::span<const ChatMessage> messages, const Lexicon& lexicon);

struct ConfusionReport {
  std::string session_id;
  std::vector<double> confusion;        // index k-1 holds section k
  std::vector<int> attributed_counts;   // USER messages per section
  int general_count = 0;
};

ConfusionReport analyze_confusion(std::span<const ChatMessage> messages, const LectureDescriptor& lecture,
                                  const Embedder& embedder, const Lexicon& lexicon, std::string session_id = {});

/// Largest remainder over confusion weights; all-zero confusion yields a
/// uniform allocation.
QuizPlan chatquiz_plan(const ConfusionReport& report, const LectureTimeline& timeline, const EngineConfig& config);

nlohmann::json to_json(const ConfusionReport& report);

}  // namespace gazelearn
