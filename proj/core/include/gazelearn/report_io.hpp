#pragma once

#include <string>
#include <string_view>

#include "gazelearn/attention_metrics.hpp"

namespace gazelearn {

/// Canonical AttentionReport JSON. Field order is fixed:
///   session_id, lecture_id, generated_at_ms, per_minute_coverage, sections
/// and per section:
///   index, start_ms, end_ms, aoi_coverage, attention_switches,
///   switch_rate_per_min, adi, valid, sample_count.
/// Reals are written with six fractional digits (round half to even), so the
/// output is byte-stable for equal inputs. Ends with a newline.
std::string write_report_json(const AttentionReport& report);

/// Throws Error(format) on schema violations.
AttentionReport parse_report_json(std::string_view text);

}  // namespace gazelearn
