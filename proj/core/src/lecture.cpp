#include "gazelearn/lecture.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace gazelearn {
namespace {

using nlohmann::json;

Vec3 vec_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(ErrorCode::format, "expected a 3-vector, got " + j.dump());
  }
  return Vec3{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vec_to_json(Vec3 v) { return json::array({v.x, v.y, v.z}); }

template <typename T>
void read_optional(const json& j, const char* key, T& target) {
  if (auto it = j.find(key); it != j.end()) {
    target = it->get<T>();
  }
}

}  // namespace

const SectionInfo& LectureDescriptor::section_info(int index) const {
  for (const auto& s : sections) {
    if (s.index == index) return s;
  }
  throw Error(ErrorCode::invalid_argument, "no section " + std::to_string(index));
}

AoiDefinition aoi_from_json(const json& j) {
  const auto& shape = j.at("shape");
  const auto type = shape.at("type").get<std::string>();
  AoiShape parsed;
  if (type == "rectangle") {
    parsed = Rectangle{vec_from_json(shape.at("center")), vec_from_json(shape.at("half_u")),
                       vec_from_json(shape.at("half_v"))};
  } else if (type == "box") {
    parsed = Box{vec_from_json(shape.at("min")), vec_from_json(shape.at("max"))};
  } else {
    throw Error(ErrorCode::format, "unknown AOI shape type '" + type + "'");
  }
  return AoiDefinition::make(j.at("label").get<std::string>(), parsed,
                             j.value("learning_related", false));
}

json aoi_to_json(const AoiDefinition& aoi) {
  json shape;
  if (const auto* rect = std::get_if<Rectangle>(&aoi.shape())) {
    shape = {{"type", "rectangle"},
             {"center", vec_to_json(rect->center)},
             {"half_u", vec_to_json(rect->half_u)},
             {"half_v", vec_to_json(rect->half_v)}};
  } else {
    const auto& box = std::get<Box>(aoi.shape());
    shape = {{"type", "box"}, {"min", vec_to_json(box.min)}, {"max", vec_to_json(box.max)}};
  }
  return json{{"label", aoi.label()}, {"learning_related", aoi.learning_related()}, {"shape", shape}};
}

LectureDescriptor parse_lecture_descriptor(std::string_view text) {
  try {
    const auto doc = json::parse(text);
    const auto lecture_id = doc.at("lecture_id").get<std::string>();
    const auto duration = doc.at("duration_ms").get<std::int64_t>();
    std::vector<std::pair<std::int64_t, std::int64_t>> bounds;
    std::vector<SectionInfo> infos;
    int expected_index = 1;
    for (const auto& s : doc.at("sections")) {
      const int index = s.value("index", expected_index);
      if (index != expected_index) {
        throw Error(ErrorCode::format, "section indices must run 1..N in order; got " +
                                           std::to_string(index) + " at position " +
                                           std::to_string(expected_index));
      }
      bounds.emplace_back(s.at("start_ms").get<std::int64_t>(), s.at("end_ms").get<std::int64_t>());
      infos.push_back(SectionInfo{index, s.value("title", "Section " + std::to_string(index)),
                                  s.value("content_text", std::string{})});
      ++expected_index;
    }
    std::vector<AoiDefinition> aois;
    if (auto it = doc.find("aois"); it != doc.end()) {
      for (const auto& a : *it) {
        aois.push_back(aoi_from_json(a));
      }
    }
    return LectureDescriptor{validate_timeline(bounds, duration, lecture_id), std::move(infos),
                             AoiSet(std::move(aois))};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::format, std::string("lecture descriptor: ") + e.what());
  }
}

LectureDescriptor load_lecture_descriptor(const std::filesystem::path& path) {
  return parse_lecture_descriptor(read_file(path));
}

std::string write_lecture_descriptor(const LectureDescriptor& descriptor) {
  json doc;
  doc["lecture_id"] = descriptor.lecture_id();
  doc["duration_ms"] = descriptor.timeline.duration_ms();
  json sections = json::array();
  for (const auto& s : descriptor.timeline.sections()) {
    const auto& info = descriptor.section_info(s.index);
    sections.push_back({{"index", s.index},
                        {"start_ms", s.start_ms},
                        {"end_ms", s.end_ms},
                        {"title", info.title},
                        {"content_text", info.content_text}});
  }
  doc["sections"] = sections;
  json aois = json::array();
  for (const auto& aoi : descriptor.aois.aois()) {
    aois.push_back(aoi_to_json(aoi));
  }
  doc["aois"] = aois;
  return doc.dump(2) + "\n";
}

EngineConfig engine_config_from_json(const json& overrides, EngineConfig base) {
  try {
    read_optional(overrides, "nominal_rate_hz", base.nominal_rate_hz);
    read_optional(overrides, "switch_debounce_ms", base.switch_debounce_ms);
    read_optional(overrides, "gap_clamp_ms", base.gap_clamp_ms);
    read_optional(overrides, "adi_coverage_weight", base.adi_coverage_weight);
    read_optional(overrides, "adi_switch_weight", base.adi_switch_weight);
    read_optional(overrides, "switch_rate_cap_per_min", base.switch_rate_cap_per_min);
    read_optional(overrides, "min_section_sample_fraction", base.min_section_sample_fraction);
    read_optional(overrides, "question_count", base.question_count);
    read_optional(overrides, "rng_seed", base.rng_seed);
    read_optional(overrides, "count_away_switches", base.count_away_switches);
    read_optional(overrides, "generation_retry_budget", base.generation_retry_budget);
    if (auto it = overrides.find("difficulty"); it != overrides.end()) {
      base.difficulty = difficulty_from_string(it->get<std::string>());
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::format, std::string("engine config: ") + e.what());
  }
  base.validate();
  return base;
}

json engine_config_to_json(const EngineConfig& c) {
  return json{{"nominal_rate_hz", c.nominal_rate_hz},
              {"switch_debounce_ms", c.switch_debounce_ms},
              {"gap_clamp_ms", c.gap_clamp_ms},
              {"adi_coverage_weight", c.adi_coverage_weight},
              {"adi_switch_weight", c.adi_switch_weight},
              {"switch_rate_cap_per_min", c.switch_rate_cap_per_min},
              {"min_section_sample_fraction", c.min_section_sample_fraction},
              {"question_count", c.question_count},
              {"rng_seed", c.rng_seed},
              {"count_away_switches", c.count_away_switches},
              {"difficulty", to_string(c.difficulty)},
              {"generation_retry_budget", c.generation_retry_budget}};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io, "cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::io, "cannot write " + tmp.string());
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      throw Error(ErrorCode::io, "short write to " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorCode::io, "cannot rename into " + path.string() + ": " + ec.message());
  }
}

}  // namespace gazelearn
