#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gazelearn/model.hpp"

namespace gazelearn {

struct SectionInfo {
  int index = 0;
  std::string title;
  std::string content_text;
};

/// Lecture descriptor file:
///   {lecture_id, duration_ms,
///    sections: [{index, start_ms, end_ms, title, content_text}],
///    aois: [{label, learning_related, shape}]}
/// where shape is {"type":"rectangle","center":[x,y,z],"half_u":[..],"half_v":[..]}
/// or {"type":"box","min":[..],"max":[..]}.
struct LectureDescriptor {
  LectureTimeline timeline;
  std::vector<SectionInfo> sections;
  AoiSet aois;

  const std::string& lecture_id() const { return timeline.lecture_id(); }
  const SectionInfo& section_info(int index) const;
};

LectureDescriptor parse_lecture_descriptor(std::string_view text);
LectureDescriptor load_lecture_descriptor(const std::filesystem::path& path);
std::string write_lecture_descriptor(const LectureDescriptor& descriptor);

AoiDefinition aoi_from_json(const nlohmann::json& j);
nlohmann::json aoi_to_json(const AoiDefinition& aoi);

/// Applies the keys present in `overrides` on top of `base` and validates.
EngineConfig engine_config_from_json(const nlohmann::json& overrides, EngineConfig base = {});
nlohmann::json engine_config_to_json(const EngineConfig& config);

std::string read_file(const std::filesystem::path& path);

/// Writes via a sibling temp file and rename, so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace gazelearn
