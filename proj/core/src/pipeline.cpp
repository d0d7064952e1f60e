#include "gazelearn/pipeline.hpp"

#include "gazelearn/aoi_geometry.hpp"

namespace gazelearn {

AnalysisResult analyze_gaze(std::string_view csv, const LectureDescriptor& lecture, const EngineConfig& config,
                            std::string_view session_id, const IngestOptions& options) {
  auto log = parse_gaze_csv(csv, options);
  const auto labeled = label_samples(log.samples, lecture.aois);
  const auto learning = lecture.aois.learning_labels();
  AnalysisResult result;
  result.report = section_metrics(labeled, lecture.timeline, learning, config, ReportContext{std::string(session_id)});
  result.stats = log.stats;
  result.mode = log.header.mode;
  return result;
}

}  // namespace gazelearn
