#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "neckpose/detail/text.hpp"
#include "neckpose/error.hpp"

namespace neckpose {

/// Configured accelerometer full scale, in g.
inline constexpr double kAccelFullScale = 8.0;

/// One accelerometer reading as exported by the neck-band app. A missing
/// axis (NaN, NA or empty cell in the export) is an empty optional.
struct ImuSample {
  std::int64_t epoch_ms = 0;
  std::string time;  // wall-clock column, carried through verbatim
  double elapsed_s = 0.0;
  std::array<std::optional<double>, 3> accel;

  bool operator==(const ImuSample&) const = default;
};

struct ImuSeries {
  std::vector<ImuSample> samples;
  double rate_hz = 100.0;

  bool operator==(const ImuSeries&) const = default;
};

inline constexpr std::array<const char*, 6> kImuCsvHeader = {
    "epoch (ms)", "time (-)", "elapsed (s)", "x-axis (g)", "y-axis (g)", "z-axis (g)"};

namespace detail {

// Column name stem (before any parenthesised unit) and the accepted unit.
struct ImuColumnRule {
  const char* stem;
  const char* unit;
};

inline constexpr std::array<ImuColumnRule, 6> kImuColumnRules = {{{"epoch", "ms"},
                                                                  {"time", "-"},
                                                                  {"elapsed", "s"},
                                                                  {"x", "g"},
                                                                  {"y", "g"},
                                                                  {"z", "g"}}};

inline void check_imu_header(std::string_view line) {
  const auto cells = split(line, ',');
  for (std::size_t i = 0; i < kImuColumnRules.size(); ++i) {
    if (i >= cells.size())
      throw FormatError("IMU header is missing column '" + std::string(kImuCsvHeader[i]) + "'");
    const std::string cell = to_lower(trim(cells[i]));
    const auto& rule = kImuColumnRules[i];
    std::string stem = cell;
    std::string unit;
    if (const auto open = cell.find('('); open != std::string::npos) {
      const auto close = cell.find(')', open);
      if (close == std::string::npos)
        throw FormatError("IMU header column '" + cell + "' has an unterminated unit");
      stem = std::string(trim(std::string_view(cell).substr(0, open)));
      unit = std::string(trim(std::string_view(cell).substr(open + 1, close - open - 1)));
    }
    if (stem.rfind(rule.stem, 0) != 0 || (!unit.empty() && unit != rule.unit))
      throw FormatError("IMU header column " + std::to_string(i + 1) + " is '" + cell +
                        "', expected '" + kImuCsvHeader[i] + "'");
  }
  if (cells.size() > kImuColumnRules.size())
    throw FormatError("IMU header has " + std::to_string(cells.size()) + " columns, expected 6");
}

inline bool is_missing_token(std::string_view cell) {
  const auto t = trim(cell);
  return t.empty() || t == "NaN" || t == "nan" || t == "NA" || t == "na" || t == "N/A";
}

// Metawear-style local time column, rendered here in UTC.
inline std::string format_wall_clock(std::int64_t epoch_ms) {
  const std::time_t secs = static_cast<std::time_t>(epoch_ms / 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d.%02d.%02d.%03d", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<int>(epoch_ms % 1000));
  return buf;
}

}  // namespace detail

/// Reads the accelerometer CSV export. Row order is preserved; elapsed time
/// must be strictly increasing.
inline ImuSeries parse_imu_csv(std::istream& in, double rate_hz = 100.0) {
  ImuSeries series;
  series.rate_hz = rate_hz;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (detail::getline_stripped(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    if (!have_header) {
      detail::check_imu_header(line);
      have_header = true;
      continue;
    }
    const auto cells = detail::split(line, ',');
    if (cells.size() != 6)
      throw ParseError(line_no, "expected 6 cells, found " + std::to_string(cells.size()));
    ImuSample s;
    const auto epoch = detail::to_integer<std::int64_t>(cells[0]);
    if (!epoch) throw ParseError(line_no, "epoch '" + std::string(cells[0]) + "' is not an integer");
    s.epoch_ms = *epoch;
    s.time = std::string(detail::trim(cells[1]));
    const auto elapsed = detail::to_double(cells[2]);
    if (!elapsed || !std::isfinite(*elapsed) || *elapsed < 0.0)
      throw ParseError(line_no, "elapsed '" + std::string(cells[2]) + "' is not a time");
    s.elapsed_s = *elapsed;
    if (!series.samples.empty() && s.elapsed_s <= series.samples.back().elapsed_s)
      throw ParseError(line_no, "elapsed time is not strictly increasing");
    for (std::size_t axis = 0; axis < 3; ++axis) {
      const auto cell = cells[3 + axis];
      if (detail::is_missing_token(cell)) continue;
      const auto v = detail::to_double(cell);
      if (!v || std::isnan(*v)) throw ParseError(line_no, "'" + std::string(cell) + "' is not numeric");
      if (!(std::abs(*v) <= kAccelFullScale))
        throw ParseError(line_no, "acceleration " + std::string(detail::trim(cell)) +
                                      " g exceeds the configured full scale");
      s.accel[axis] = *v;
    }
    series.samples.push_back(std::move(s));
  }
  if (!have_header) throw FormatError("IMU CSV is empty: no header line");
  return series;
}

inline ImuSeries parse_imu_csv(const std::string& text, double rate_hz = 100.0) {
  std::istringstream in(text);
  return parse_imu_csv(in, rate_hz);
}

inline ImuSeries read_imu_csv_file(const std::string& path, double rate_hz = 100.0) {
  auto in = detail::open_input(path);
  return parse_imu_csv(in, rate_hz);
}

/// Writes the same dialect `parse_imu_csv` reads. Values use the shortest
/// round-trip representation; missing axes are written as NaN.
inline void write_imu_csv(std::ostream& out, const ImuSeries& series) {
  for (std::size_t i = 0; i < kImuCsvHeader.size(); ++i)
    out << (i ? "," : "") << kImuCsvHeader[i];
  out << '\n';
  for (const auto& s : series.samples) {
    out << s.epoch_ms << ',' << (s.time.empty() ? detail::format_wall_clock(s.epoch_ms) : s.time)
        << ',' << detail::format_shortest(s.elapsed_s);
    for (const auto& a : s.accel) out << ',' << (a ? detail::format_shortest(*a) : "NaN");
    out << '\n';
  }
}

inline std::string imu_csv_string(const ImuSeries& series) {
  std::ostringstream out;
  write_imu_csv(out, series);
  return out.str();
}

}  // namespace neckpose
