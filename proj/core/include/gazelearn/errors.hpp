#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gazelearn {

enum class ErrorCode {
  invariant,
  invalid_argument,
  overlap,
  gap,
  out_of_range,
  header,
  row,
  monotonicity,
  unknown_label,
  empty_trace,
  inapplicable,
  no_valid_section,
  missing_grounding,
  empty_plan,
  adapter,
  malformed_generation,
  empty_document,
  empty_store,
  format,
  io,
};

const char* to_string(ErrorCode code);

// Base of every error the library raises. Callers that only need a category
// switch on code(); the subclasses carry the structured detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// One distinct value per constructor invariant, so a failed construction can
// be identified without matching message text.
enum class Violation {
  negative_timestamp,
  non_unit_direction,
  missing_gaze_payload,
  non_finite_value,
  empty_label,
  reserved_label,
  duplicate_label,
  degenerate_edge,
  non_orthogonal_edges,
  inverted_box,
  config_range,
  config_weight_sum,
  empty_timeline,
  mcq_options,
  mcq_key,
  embedding_dimension,
  duplicate_chunk_id,
  plan_total,
};

const char* to_string(Violation violation);

class InvariantError : public Error {
 public:
  InvariantError(Violation violation, const std::string& detail);
  Violation violation() const noexcept { return violation_; }

 private:
  Violation violation_;
};

class TimelineError : public Error {
 public:
  TimelineError(ErrorCode code, int section_index, std::int64_t boundary_ms,
                const std::string& message)
      : Error(code, message), section_index_(section_index), boundary_ms_(boundary_ms) {}

  int section_index() const noexcept { return section_index_; }
  std::int64_t boundary_ms() const noexcept { return boundary_ms_; }

 private:
  int section_index_;
  std::int64_t boundary_ms_;
};

class OverlapError : public TimelineError {
 public:
  OverlapError(int section_index, std::int64_t boundary_ms);
};

class GapError : public TimelineError {
 public:
  GapError(int section_index, std::int64_t boundary_ms);
};

class OutOfRangeError : public TimelineError {
 public:
  OutOfRangeError(int section_index, std::int64_t boundary_ms, const std::string& reason);
};

class HeaderError : public Error {
 public:
  HeaderError(std::string column, const std::string& reason);
  const std::string& column() const noexcept { return column_; }

 private:
  std::string column_;
};

class RowError : public Error {
 public:
  RowError(std::size_t line, std::string field, std::string reason);
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string field_;
  std::string reason_;
};

class MonotonicityError : public Error {
 public:
  explicit MonotonicityError(std::size_t line);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class UnknownLabelError : public Error {
 public:
  UnknownLabelError(std::size_t sample_index, std::string label);
  std::size_t sample_index() const noexcept { return sample_index_; }
  const std::string& label() const noexcept { return label_; }

 private:
  std::size_t sample_index_;
  std::string label_;
};

class MissingGroundingError : public Error {
 public:
  explicit MissingGroundingError(int section_index);
  int section_index() const noexcept { return section_index_; }

 private:
  int section_index_;
};

class AdapterError : public Error {
 public:
  explicit AdapterError(const std::string& message) : Error(ErrorCode::adapter, message) {}
};

}  // namespace gazelearn
