#include "gazelearn/errors.hpp"

namespace gazelearn {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invariant: return "invariant";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::overlap: return "overlap";
    case ErrorCode::gap: return "gap";
    case ErrorCode::out_of_range: return "out_of_range";
    case ErrorCode::header: return "header";
    case ErrorCode::row: return "row";
    case ErrorCode::monotonicity: return "monotonicity";
    case ErrorCode::unknown_label: return "unknown_label";
    case ErrorCode::empty_trace: return "empty_trace";
    case ErrorCode::inapplicable: return "inapplicable";
    case ErrorCode::no_valid_section: return "no_valid_section";
    case ErrorCode::missing_grounding: return "missing_grounding";
    case ErrorCode::empty_plan: return "empty_plan";
    case ErrorCode::adapter: return "adapter";
    case ErrorCode::malformed_generation: return "malformed_generation";
    case ErrorCode::empty_document: return "empty_document";
    case ErrorCode::empty_store: return "empty_store";
    case ErrorCode::format: return "format";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

const char* to_string(Violation violation) {
  switch (violation) {
    case Violation::negative_timestamp: return "negative_timestamp";
    case Violation::non_unit_direction: return "non_unit_direction";
    case Violation::missing_gaze_payload: return "missing_gaze_payload";
    case Violation::non_finite_value: return "non_finite_value";
    case Violation::empty_label: return "empty_label";
    case Violation::reserved_label: return "reserved_label";
    case Violation::duplicate_label: return "duplicate_label";
    case Violation::degenerate_edge: return "degenerate_edge";
    case Violation::non_orthogonal_edges: return "non_orthogonal_edges";
    case Violation::inverted_box: return "inverted_box";
    case Violation::config_range: return "config_range";
    case Violation::config_weight_sum: return "config_weight_sum";
    case Violation::empty_timeline: return "empty_timeline";
    case Violation::mcq_options: return "mcq_options";
    case Violation::mcq_key: return "mcq_key";
    case Violation::embedding_dimension: return "embedding_dimension";
    case Violation::duplicate_chunk_id: return "duplicate_chunk_id";
    case Violation::plan_total: return "plan_total";
  }
  return "unknown";
}

InvariantError::InvariantError(Violation violation, const std::string& detail)
    : Error(ErrorCode::invariant, std::string(to_string(violation)) + ": " + detail),
      violation_(violation) {}

OverlapError::OverlapError(int section_index, std::int64_t boundary_ms)
    : TimelineError(ErrorCode::overlap, section_index, boundary_ms,
                    "section " + std::to_string(section_index) + " overlaps the previous section at " +
                        std::to_string(boundary_ms) + " ms") {}

GapError::GapError(int section_index, std::int64_t boundary_ms)
    : TimelineError(ErrorCode::gap, section_index, boundary_ms,
                    "gap before section " + std::to_string(section_index) + " at boundary " +
                        std::to_string(boundary_ms) + " ms") {}

OutOfRangeError::OutOfRangeError(int section_index, std::int64_t boundary_ms,
                                 const std::string& reason)
    : TimelineError(ErrorCode::out_of_range, section_index, boundary_ms,
                    "section " + std::to_string(section_index) + " out of range: " + reason) {}

HeaderError::HeaderError(std::string column, const std::string& reason)
    : Error(ErrorCode::header, "header column '" + column + "': " + reason),
      column_(std::move(column)) {}

RowError::RowError(std::size_t line, std::string field, std::string reason)
    : Error(ErrorCode::row, "line " + std::to_string(line) + ", field '" + field + "': " + reason),
      line_(line),
      field_(std::move(field)),
      reason_(std::move(reason)) {}

MonotonicityError::MonotonicityError(std::size_t line)
    : Error(ErrorCode::monotonicity,
            "line " + std::to_string(line) + ": timestamp decreases (pass sort to reorder)"),
      line_(line) {}

UnknownLabelError::UnknownLabelError(std::size_t sample_index, std::string label)
    : Error(ErrorCode::unknown_label,
            "sample " + std::to_string(sample_index) + ": label '" + label + "' is not a declared AOI"),
      sample_index_(sample_index),
      label_(std::move(label)) {}

MissingGroundingError::MissingGroundingError(int section_index)
    : Error(ErrorCode::missing_grounding,
            "section " + std::to_string(section_index) + " has questions but no grounding chunk"),
      section_index_(section_index) {}

}  // namespace gazelearn
