#pragma once

// Tick ingestion and event serialization.
//
// Tick CSV:   `timestamp,price` rows, optional header row, '#' comment lines.
// Event CSV:  schema comment line, header, one row per event.
// Event JSONL: one JSON object per line, same fields and order as the CSV.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "itime/core.hpp"
#include "itime/dc_engine.hpp"
#include "itime/multiscale.hpp"

namespace itime {

inline constexpr std::string_view kEventSchemaLine = "# schema: itime.events v1";
inline constexpr std::string_view kTickSchemaLine = "# schema: itime.ticks v1";
inline constexpr std::string_view kSummarySchemaLine = "# schema: itime.summary v1";
inline constexpr std::string_view kEventCsvHeader = "kind,direction,timestamp_ns,price,delta,clock_index";

enum class TickFormat { CsvTimestampPrice };
enum class TimestampUnit { Seconds, Millis, Nanos };
enum class EventFormat { Csv, JsonLines };

struct TickFileSpec {
  std::filesystem::path path;
  TickFormat format = TickFormat::CsvTimestampPrice;
  bool has_header = false;
  TimestampUnit timestamp_unit = TimestampUnit::Nanos;
};

struct IngestOptions {
  // When false, rows are stably sorted by timestamp instead of rejected.
  bool strict_ordering = true;
};

/// 17 significant digits: every finite double round-trips.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return {buf, res.ptr};
}

/// Shortest representation that round-trips; used for threshold labels.
inline std::string format_shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') {
    s.remove_prefix(1);
  }
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

inline Nanos unit_scale(TimestampUnit u) {
  switch (u) {
    case TimestampUnit::Seconds:
      return kNanosPerSecond;
    case TimestampUnit::Millis:
      return 1'000'000;
    case TimestampUnit::Nanos:
      break;
  }
  return 1;
}

inline bool parse_timestamp(std::string_view field, TimestampUnit unit, Nanos& out) {
  const Nanos scale = unit_scale(unit);
  std::int64_t whole = 0;
  if (parse_number(field, whole)) {
    if (whole > std::numeric_limits<Nanos>::max() / scale || whole < std::numeric_limits<Nanos>::min() / scale) {
      return false;
    }
    out = whole * scale;
    return true;
  }
  // Fractional seconds / millis.
  double frac = 0.0;
  if (unit == TimestampUnit::Nanos || !parse_number(field, frac) || !std::isfinite(frac)) {
    return false;
  }
  const double ns = frac * static_cast<double>(scale);
  if (std::abs(ns) > 9.0e18) {
    return false;
  }
  out = static_cast<Nanos>(std::llround(ns));
  return true;
}

}  // namespace detail

/// Parses `timestamp,price` rows. Row numbers in errors are 1-based physical
/// line numbers.
inline std::vector<Tick> parse_ticks(std::istream& in, bool has_header, TimestampUnit unit,
                                     const IngestOptions& options = {}) {
  std::vector<Tick> ticks;
  std::string line;
  std::size_t row = 0;
  bool header_pending = has_header;
  while (std::getline(in, line)) {
    ++row;
    const std::string_view text = detail::trim(line);
    if (text.empty() || text.front() == '#') {
      continue;
    }
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto comma = text.find(',');
    if (comma == std::string_view::npos) {
      throw IngestionError("row " + std::to_string(row) + ": expected `timestamp,price`");
    }
    Tick t;
    if (!detail::parse_timestamp(text.substr(0, comma), unit, t.timestamp_ns)) {
      throw IngestionError("row " + std::to_string(row) + ": bad timestamp");
    }
    if (!detail::parse_number(text.substr(comma + 1), t.price) || !std::isfinite(t.price)) {
      throw IngestionError("row " + std::to_string(row) + ": bad price");
    }
    if (!(t.price > 0.0)) {
      throw IngestionError("row " + std::to_string(row) + ": price must be strictly positive");
    }
    if (options.strict_ordering && !ticks.empty() && t.timestamp_ns < ticks.back().timestamp_ns) {
      throw IngestionError("row " + std::to_string(row) + ": timestamp decreases");
    }
    ticks.push_back(t);
  }
  if (in.bad()) {
    throw IngestionError("read failure");
  }
  if (!options.strict_ordering) {
    std::stable_sort(ticks.begin(), ticks.end(),
                     [](const Tick& a, const Tick& b) { return a.timestamp_ns < b.timestamp_ns; });
  }
  return ticks;
}

inline std::vector<Tick> parse_ticks(const TickFileSpec& spec, const IngestOptions& options = {}) {
  std::ifstream in(spec.path);
  if (!in) {
    throw IngestionError("cannot open tick file " + spec.path.string());
  }
  return parse_ticks(in, spec.has_header, spec.timestamp_unit, options);
}

/// True when the first non-comment line does not start with a number.
inline bool sniff_header(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view text = detail::trim(line);
    if (text.empty() || text.front() == '#') {
      continue;
    }
    const auto field = text.substr(0, text.find(','));
    double v = 0.0;
    return !detail::parse_number(field, v);
  }
  return false;
}

/// Output file that only appears at its final path on commit(); an
/// uncommitted file is removed on destruction.
class AtomicFile {
 public:
  explicit AtomicFile(std::filesystem::path target)
      : target_(std::move(target)), temp_(target_.string() + ".tmp") {
    out_.open(temp_, std::ios::binary | std::ios::trunc);
    if (!out_) {
      throw WriteError("cannot open " + temp_.string() + " for writing");
    }
  }
  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;

  ~AtomicFile() {
    if (!committed_) {
      out_.close();
      std::error_code ec;
      std::filesystem::remove(temp_, ec);
    }
  }

  std::ostream& stream() { return out_; }

  void commit() {
    out_.flush();
    if (!out_) {
      throw WriteError("write failure on " + temp_.string());
    }
    out_.close();
    std::error_code ec;
    std::filesystem::rename(temp_, target_, ec);
    if (ec) {
      throw WriteError("cannot move " + temp_.string() + " to " + target_.string() + ": " + ec.message());
    }
    committed_ = true;
  }

 private:
  std::filesystem::path target_;
  std::filesystem::path temp_;
  std::ofstream out_;
  bool committed_ = false;
};

inline void write_ticks(std::span<const Tick> ticks, std::ostream& out) {
  out << kTickSchemaLine << '\n' << "timestamp,price\n";
  for (const Tick& t : ticks) {
    out << t.timestamp_ns << ',' << format_double(t.price) << '\n';
  }
}

inline void write_ticks(std::span<const Tick> ticks, const std::filesystem::path& path) {
  AtomicFile file(path);
  write_ticks(ticks, file.stream());
  file.commit();
}

inline void write_events(std::span<const IntrinsicEvent> events, std::ostream& out, EventFormat format) {
  if (format == EventFormat::Csv) {
    out << kEventSchemaLine << '\n' << kEventCsvHeader << '\n';
    for (const IntrinsicEvent& e : events) {
      out << to_string(e.kind) << ',' << to_string(e.direction) << ',' << e.timestamp_ns << ','
          << format_double(e.price) << ',' << format_double(e.delta) << ',' << e.clock_index << '\n';
    }
    return;
  }
  // Hand-written so numbers keep 17 significant digits and field order is fixed.
  for (const IntrinsicEvent& e : events) {
    out << R"({"kind":")" << to_string(e.kind) << R"(","direction":")" << to_string(e.direction)
        << R"(","timestamp_ns":)" << e.timestamp_ns << R"(,"price":)" << format_double(e.price)
        << R"(,"delta":)" << format_double(e.delta) << R"(,"clock_index":)" << e.clock_index << "}\n";
  }
}

inline void write_events(std::span<const IntrinsicEvent> events, const std::filesystem::path& path,
                         EventFormat format) {
  AtomicFile file(path);
  write_events(events, file.stream(), format);
  file.commit();
}

namespace detail {

inline EventKind parse_kind(std::string_view s) {
  if (s == "DC") {
    return EventKind::DirectionalChange;
  }
  if (s == "OS") {
    return EventKind::Overshoot;
  }
  throw IngestionError("unknown event kind `" + std::string(s) + "`");
}

inline Mode parse_mode(std::string_view s) {
  if (s == "up") {
    return Mode::Up;
  }
  if (s == "down") {
    return Mode::Down;
  }
  throw IngestionError("unknown direction `" + std::string(s) + "`");
}

}  // namespace detail

inline std::vector<IntrinsicEvent> read_events(std::istream& in, EventFormat format) {
  std::vector<IntrinsicEvent> events;
  std::string line;
  std::size_t row = 0;
  bool header_seen = format != EventFormat::Csv;
  while (std::getline(in, line)) {
    ++row;
    const std::string_view text = detail::trim(line);
    if (text.empty() || text.front() == '#') {
      continue;
    }
    const std::string where = "row " + std::to_string(row) + ": ";
    IntrinsicEvent e;
    if (format == EventFormat::Csv) {
      if (!header_seen) {
        if (text != kEventCsvHeader) {
          throw IngestionError(where + "unexpected event header");
        }
        header_seen = true;
        continue;
      }
      std::vector<std::string_view> f;
      std::size_t start = 0;
      while (true) {
        const auto comma = text.find(',', start);
        f.push_back(text.substr(start, comma - start));
        if (comma == std::string_view::npos) {
          break;
        }
        start = comma + 1;
      }
      if (f.size() != 6) {
        throw IngestionError(where + "expected 6 fields");
      }
      e.kind = detail::parse_kind(f[0]);
      e.direction = detail::parse_mode(f[1]);
      if (!detail::parse_number(f[2], e.timestamp_ns) || !detail::parse_number(f[3], e.price) ||
          !detail::parse_number(f[4], e.delta) || !detail::parse_number(f[5], e.clock_index)) {
        throw IngestionError(where + "bad numeric field");
      }
    } else {
      try {
        const auto j = nlohmann::json::parse(text);
        e.kind = detail::parse_kind(j.at("kind").get<std::string>());
        e.direction = detail::parse_mode(j.at("direction").get<std::string>());
        e.timestamp_ns = j.at("timestamp_ns").get<Nanos>();
        e.price = j.at("price").get<double>();
        e.delta = j.at("delta").get<double>();
        e.clock_index = j.at("clock_index").get<std::uint64_t>();
      } catch (const nlohmann::json::exception& ex) {
        throw IngestionError(where + ex.what());
      }
    }
    events.push_back(e);
  }
  return events;
}

inline std::vector<IntrinsicEvent> read_events(const std::filesystem::path& path, EventFormat format) {
  std::ifstream in(path);
  if (!in) {
    throw IngestionError("cannot open event file " + path.string());
  }
  return read_events(in, format);
}

inline void write_summary(std::span<const ThresholdSummary> rows, std::ostream& out) {
  out << kSummarySchemaLine << '\n' << "delta,n_dc,n_os,coastline\n";
  for (const ThresholdSummary& s : rows) {
    out << format_shortest(s.delta) << ',' << s.n_dc << ',' << s.n_os << ',' << format_double(s.coastline) << '\n';
  }
}

}  // namespace itime
