#include "gazelearn/report_io.hpp"

#include <nlohmann/json.hpp>

#include "gazelearn/format.hpp"

namespace gazelearn {

std::string write_report_json(const AttentionReport& report) {
  std::string out;
  out += "{\n";
  out += "  \"session_id\": " + json_quote(report.session_id) + ",\n";
  out += "  \"lecture_id\": " + json_quote(report.lecture_id) + ",\n";
  out += "  \"generated_at_ms\": " + std::to_string(report.generated_at_ms) + ",\n";
  out += "  \"per_minute_coverage\": [";
  for (std::size_t i = 0; i < report.per_minute_coverage.size(); ++i) {
    out += (i == 0) ? "" : ", ";
    out += format_fixed6(report.per_minute_coverage[i]);
  }
  out += "],\n";
  out += "  \"sections\": [";
  for (std::size_t i = 0; i < report.sections.size(); ++i) {
    const auto& s = report.sections[i];
    out += (i == 0) ? "\n" : ",\n";
    out += "    {";
    out += "\"index\": " + std::to_string(s.index);
    out += ", \"start_ms\": " + std::to_string(s.start_ms);
    out += ", \"end_ms\": " + std::to_string(s.end_ms);
    out += ", \"aoi_coverage\": " + format_fixed6(s.aoi_coverage);
    out += ", \"attention_switches\": " + std::to_string(s.attention_switches);
    out += ", \"switch_rate_per_min\": " + format_fixed6(s.switch_rate_per_min);
    out += ", \"adi\": " + format_fixed6(s.adi);
    out += std::string(", \"valid\": ") + (s.valid ? "true" : "false");
    out += ", \"sample_count\": " + std::to_string(s.sample_count);
    out += "}";
  }
  out += report.sections.empty() ? "]\n" : "\n  ]\n";
  out += "}\n";
  return out;
}

AttentionReport parse_report_json(std::string_view text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    AttentionReport report;
    report.session_id = doc.at("session_id").get<std::string>();
    report.lecture_id = doc.at("lecture_id").get<std::string>();
    report.generated_at_ms = doc.at("generated_at_ms").get<std::int64_t>();
    report.per_minute_coverage = doc.at("per_minute_coverage").get<std::vector<double>>();
    for (double c : report.per_minute_coverage) {
      if (!(c >= 0.0 && c <= 1.0)) throw Error(ErrorCode::format, "per_minute_coverage value outside [0,1]");
    }
    for (const auto& s : doc.at("sections")) {
      SectionMetrics m;
      m.index = s.at("index").get<int>();
      m.start_ms = s.at("start_ms").get<std::int64_t>();
      m.end_ms = s.at("end_ms").get<std::int64_t>();
      m.aoi_coverage = s.at("aoi_coverage").get<double>();
      m.attention_switches = s.at("attention_switches").get<int>();
      m.switch_rate_per_min = s.at("switch_rate_per_min").get<double>();
      m.adi = s.at("adi").get<double>();
      m.valid = s.at("valid").get<bool>();
      m.sample_count = s.at("sample_count").get<std::int64_t>();
      if (m.aoi_coverage < 0.0 || m.aoi_coverage > 1.0 || m.adi < 0.0 || m.adi > 1.0 ||
          m.attention_switches < 0) {
        throw Error(ErrorCode::format, "section " + std::to_string(m.index) + " has out-of-range metrics");
      }
      report.sections.push_back(m);
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::format, std::string("attention report: ") + e.what());
  }
}

}  // namespace gazelearn
