#include "gazelearn/gaze_ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include "gazelearn/format.hpp"

namespace gazelearn {
namespace {

constexpr std::array<std::pair<std::string_view, GazeColumn>, 9> kColumnNames{{
    {"t_ms", GazeColumn::t_ms},
    {"target", GazeColumn::target},
    {"ox", GazeColumn::ox},
    {"oy", GazeColumn::oy},
    {"oz", GazeColumn::oz},
    {"dx", GazeColumn::dx},
    {"dy", GazeColumn::dy},
    {"dz", GazeColumn::dz},
    {"valid", GazeColumn::valid},
}};

std::string_view column_name(GazeColumn column) {
  for (const auto& [name, col] : kColumnNames) {
    if (col == column) return name;
  }
  return "?";
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::int64_t parse_timestamp(std::string_view field, std::size_t line) {
  std::int64_t value = 0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc{} || ptr != end) {
    throw RowError(line, "t_ms", "expected an integer millisecond timestamp");
  }
  if (value < 0) {
    throw RowError(line, "t_ms", "timestamp must be non-negative");
  }
  return value;
}

double parse_decimal(std::string_view field, GazeColumn column, std::size_t line) {
  double value = 0.0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value, std::chars_format::general);
  if (field.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw RowError(line, std::string(column_name(column)), "expected a finite decimal number");
  }
  return value;
}

bool parse_valid_flag(std::string_view field, std::size_t line) {
  if (field == "1") return true;
  if (field == "0") return false;
  throw RowError(line, "valid", "expected 0 or 1");
}

// Line reader that tracks 1-based line numbers and strips a trailing \r.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    if (!std::getline(in_, line)) {
      return false;
    }
    ++line_no_;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    return true;
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

struct PendingRecord {
  RawGazeRecord record;
  std::size_t line = 0;
};

}  // namespace

const char* to_string(GazeLogMode mode) {
  return mode == GazeLogMode::labeled ? "labeled" : "geometric";
}

GazeLogHeader parse_gaze_header(std::string_view header_line) {
  GazeLogHeader header;
  std::array<bool, kColumnNames.size()> seen{};
  for (auto field : split_fields(header_line)) {
    auto it = std::find_if(kColumnNames.begin(), kColumnNames.end(),
                           [&](const auto& entry) { return entry.first == field; });
    if (it == kColumnNames.end()) {
      throw HeaderError(std::string(field), "unknown column");
    }
    const auto slot = static_cast<std::size_t>(it - kColumnNames.begin());
    if (seen[slot]) {
      throw HeaderError(std::string(field), "duplicate column");
    }
    seen[slot] = true;
    header.columns.push_back(it->second);
  }
  auto has = [&](GazeColumn c) {
    return std::find(header.columns.begin(), header.columns.end(), c) != header.columns.end();
  };
  if (!has(GazeColumn::t_ms)) {
    throw HeaderError("t_ms", "missing required column");
  }
  header.has_valid_column = has(GazeColumn::valid);
  const bool labeled = has(GazeColumn::target);
  constexpr std::array<GazeColumn, 6> geometric_cols{GazeColumn::ox, GazeColumn::oy, GazeColumn::oz,
                                                     GazeColumn::dx, GazeColumn::dy, GazeColumn::dz};
  const bool any_geometric =
      std::any_of(geometric_cols.begin(), geometric_cols.end(), [&](GazeColumn c) { return has(c); });
  if (labeled && any_geometric) {
    throw HeaderError("target", "a log is either labeled or geometric, not both");
  }
  if (labeled) {
    header.mode = GazeLogMode::labeled;
    return header;
  }
  for (auto c : geometric_cols) {
    if (!has(c)) {
      throw HeaderError(std::string(column_name(c)), "missing required column");
    }
  }
  header.mode = GazeLogMode::geometric;
  return header;
}

std::vector<GazeSample> normalize_directions(std::span<const RawGazeRecord> records) {
  std::vector<GazeSample> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (!r.direction || !r.origin) {
      throw Error(ErrorCode::invalid_argument, "normalize_directions needs geometric records");
    }
    Vec3 dir = *r.direction;
    bool valid = r.valid;
    const double n = norm(dir);
    if (!(n > 0.0) || !std::isfinite(n)) {
      valid = false;
      dir = Vec3{};
    } else if (std::abs(n - 1.0) > 1e-14) {
      // Already-unit directions pass through untouched so re-normalizing is exact.
      dir = (1.0 / n) * dir;
    }
    out.push_back(GazeSample::geometric(r.t_ms, *r.origin, dir, valid));
  }
  return out;
}

GazeLog parse_gaze_csv(std::istream& in, const IngestOptions& options) {
  LineReader reader(in);
  std::string line;
  GazeLog log;

  bool have_header = false;
  while (reader.next(line)) {
    std::string_view view = line;
    if (reader.line_no() == 1 && view.starts_with("\xEF\xBB\xBF")) {
      view.remove_prefix(3);
    }
    if (!is_valid_utf8(view)) {
      throw RowError(reader.line_no(), "", "invalid UTF-8");
    }
    if (view.empty()) {
      continue;
    }
    log.header = parse_gaze_header(view);
    have_header = true;
    break;
  }
  if (!have_header) {
    throw HeaderError("", "empty input: a header row is required");
  }

  const auto& columns = log.header.columns;
  std::vector<PendingRecord> records;
  while (reader.next(line)) {
    const std::size_t line_no = reader.line_no();
    if (line.empty()) {
      continue;
    }
    if (!is_valid_utf8(line)) {
      throw RowError(line_no, "", "invalid UTF-8");
    }
    const auto fields = split_fields(line);
    if (fields.size() != columns.size()) {
      throw RowError(line_no, "", "expected " + std::to_string(columns.size()) + " fields, got " +
                                      std::to_string(fields.size()));
    }
    RawGazeRecord rec;
    Vec3 origin;
    Vec3 direction;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const auto field = fields[i];
      switch (columns[i]) {
        case GazeColumn::t_ms: rec.t_ms = parse_timestamp(field, line_no); break;
        case GazeColumn::target:
          if (field.empty()) {
            throw RowError(line_no, "target", "empty label");
          }
          rec.target = std::string(field);
          break;
        case GazeColumn::ox: origin.x = parse_decimal(field, columns[i], line_no); break;
        case GazeColumn::oy: origin.y = parse_decimal(field, columns[i], line_no); break;
        case GazeColumn::oz: origin.z = parse_decimal(field, columns[i], line_no); break;
        case GazeColumn::dx: direction.x = parse_decimal(field, columns[i], line_no); break;
        case GazeColumn::dy: direction.y = parse_decimal(field, columns[i], line_no); break;
        case GazeColumn::dz: direction.z = parse_decimal(field, columns[i], line_no); break;
        case GazeColumn::valid: rec.valid = parse_valid_flag(field, line_no); break;
      }
    }
    if (log.header.mode == GazeLogMode::geometric) {
      rec.origin = origin;
      rec.direction = direction;
    }
    ++log.stats.row_count;

    if (!options.sort && !records.empty()) {
      auto& last = records.back();
      if (rec.t_ms < last.record.t_ms) {
        throw MonotonicityError(line_no);
      }
      if (rec.t_ms == last.record.t_ms) {
        last = PendingRecord{std::move(rec), line_no};
        ++log.stats.dropped_duplicates;
        continue;
      }
    }
    records.push_back(PendingRecord{std::move(rec), line_no});
  }

  if (options.sort) {
    std::stable_sort(records.begin(), records.end(), [](const PendingRecord& a, const PendingRecord& b) {
      return a.record.t_ms < b.record.t_ms;
    });
    // Within a run of equal timestamps the last row in file order wins.
    std::vector<PendingRecord> deduped;
    deduped.reserve(records.size());
    for (auto& r : records) {
      if (!deduped.empty() && deduped.back().record.t_ms == r.record.t_ms) {
        deduped.back() = std::move(r);
        ++log.stats.dropped_duplicates;
      } else {
        deduped.push_back(std::move(r));
      }
    }
    records = std::move(deduped);
  }

  std::vector<RawGazeRecord> raw;
  raw.reserve(records.size());
  for (auto& r : records) {
    raw.push_back(std::move(r.record));
  }

  if (log.header.mode == GazeLogMode::geometric) {
    log.samples = normalize_directions(raw);
  } else {
    log.samples.reserve(raw.size());
    for (auto& r : raw) {
      log.samples.push_back(GazeSample::labeled(r.t_ms, std::move(*r.target), r.valid));
    }
  }

  for (std::size_t i = 0; i < log.samples.size(); ++i) {
    if (!log.samples[i].valid()) {
      ++log.stats.invalid_count;
    }
    if (i > 0) {
      log.stats.max_gap_ms =
          std::max(log.stats.max_gap_ms, log.samples[i].t_ms() - log.samples[i - 1].t_ms());
    }
  }
  return log;
}

GazeLog parse_gaze_csv(std::string_view bytes, const IngestOptions& options) {
  std::istringstream in{std::string(bytes)};
  return parse_gaze_csv(in, options);
}

std::string write_gaze_csv(std::span<const GazeSample> samples, GazeLogMode mode,
                           bool include_valid_column) {
  std::string out;
  out.reserve(samples.size() * (mode == GazeLogMode::labeled ? 16 : 64));
  if (mode == GazeLogMode::labeled) {
    out += include_valid_column ? "t_ms,target,valid\n" : "t_ms,target\n";
  } else {
    out += include_valid_column ? "t_ms,ox,oy,oz,dx,dy,dz,valid\n" : "t_ms,ox,oy,oz,dx,dy,dz\n";
  }
  for (const auto& s : samples) {
    out += std::to_string(s.t_ms());
    if (mode == GazeLogMode::labeled) {
      if (!s.target()) {
        throw Error(ErrorCode::invalid_argument, "labeled CSV needs target labels");
      }
      out += ',';
      out += *s.target();
    } else {
      if (!s.origin() || !s.direction()) {
        throw Error(ErrorCode::invalid_argument, "geometric CSV needs origin and direction");
      }
      for (double v : {s.origin()->x, s.origin()->y, s.origin()->z, s.direction()->x,
                       s.direction()->y, s.direction()->z}) {
        out += ',';
        out += format_shortest(v);
      }
    }
    if (include_valid_column) {
      out += s.valid() ? ",1" : ",0";
    }
    out += '\n';
  }
  return out;
}

}  // namespace gazelearn
