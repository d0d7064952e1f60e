#pragma once

#include <string>
#include <string_view>

#include "gazelearn/attention_metrics.hpp"
#include "gazelearn/gaze_ingest.hpp"
#include "gazelearn/lecture.hpp"

namespace gazelearn {

struct AnalysisResult {
  AttentionReport report;
  IngestStats stats;
  GazeLogMode mode = GazeLogMode::labeled;
};

/// CSV bytes -> samples -> AOI labels -> section metrics. This is the single
/// code path behind both the CLI `analyze` command and the service upload.
AnalysisResult analyze_gaze(std::string_view csv, const LectureDescriptor& lecture, const EngineConfig& config,
                            std::string_view session_id, const IngestOptions& options = {});

}  // namespace gazelearn
