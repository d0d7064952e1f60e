#pragma once

#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gazelearn/model.hpp"

namespace gazelearn {

enum class GazeLogMode { labeled, geometric };

const char* to_string(GazeLogMode mode);

enum class GazeColumn { t_ms, target, ox, oy, oz, dx, dy, dz, valid };

/// Parsed header: the column order as it appeared, and the log mode it implies.
struct GazeLogHeader {
  std::vector<GazeColumn> columns;
  GazeLogMode mode = GazeLogMode::labeled;
  bool has_valid_column = false;
};

GazeLogHeader parse_gaze_header(std::string_view header_line);

struct IngestStats {
  std::size_t row_count = 0;
  std::size_t invalid_count = 0;
  std::size_t dropped_duplicates = 0;
  std::int64_t max_gap_ms = 0;

  friend bool operator==(const IngestStats&, const IngestStats&) = default;
};

struct IngestOptions {
  // Reorder decreasing timestamps instead of rejecting the file.
  bool sort = false;
};

struct GazeLog {
  GazeLogHeader header;
  std::vector<GazeSample> samples;
  IngestStats stats;
};

/// Single pass over a UTF-8 CSV stream. Samples come back strictly ordered by
/// t_ms; a repeated timestamp keeps the later row. GEOMETRIC directions are
/// normalized on the way in.
GazeLog parse_gaze_csv(std::istream& in, const IngestOptions& options = {});
GazeLog parse_gaze_csv(std::string_view bytes, const IngestOptions& options = {});

/// Scales directions to unit norm; a zero or non-finite direction marks the
/// sample invalid instead of failing.
std::vector<GazeSample> normalize_directions(std::span<const RawGazeRecord> records);

/// Writes samples in the ingest format. Doubles use the shortest round-trip
/// representation so parse(write(x)) == x.
std::string write_gaze_csv(std::span<const GazeSample> samples, GazeLogMode mode,
                           bool include_valid_column = true);

}  // namespace gazelearn
