#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "neckpose/detail/text.hpp"
#include "neckpose/error.hpp"
#include "neckpose/imu.hpp"
#include "neckpose/posture.hpp"

namespace neckpose {

inline constexpr std::array<const char*, 3> kAxisNames = {"x", "y", "z"};

/// Fills missing accelerometer values by linear interpolation in elapsed
/// time between the nearest present neighbours. Leading and trailing gaps
/// take the nearest present value.
inline ImuSeries interpolate_missing(const ImuSeries& series) {
  ImuSeries out = series;
  auto& samples = out.samples;
  const std::size_t n = samples.size();
  for (std::size_t axis = 0; axis < 3; ++axis) {
    std::vector<std::size_t> present;
    for (std::size_t i = 0; i < n; ++i)
      if (samples[i].accel[axis]) present.push_back(i);
    if (n == 0) continue;
    if (present.empty())
      throw UnrecoverableChannelError(std::string("accelerometer channel ") + kAxisNames[axis] +
                                      " has no values");
    for (std::size_t i = 0; i < present.front(); ++i) samples[i].accel[axis] = samples[present.front()].accel[axis];
    for (std::size_t i = present.back() + 1; i < n; ++i) samples[i].accel[axis] = samples[present.back()].accel[axis];
    for (std::size_t p = 0; p + 1 < present.size(); ++p) {
      const std::size_t lo = present[p];
      const std::size_t hi = present[p + 1];
      const double t0 = samples[lo].elapsed_s;
      const double t1 = samples[hi].elapsed_s;
      const double v0 = *samples[lo].accel[axis];
      const double v1 = *samples[hi].accel[axis];
      for (std::size_t i = lo + 1; i < hi; ++i) {
        const double w = (samples[i].elapsed_s - t0) / (t1 - t0);
        samples[i].accel[axis] = v0 + w * (v1 - v0);
      }
    }
  }
  return out;
}

namespace detail {

// Median of a scratch buffer; reorders it.
inline double median_inplace(std::vector<double>& v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return lower + (upper - lower) / 2.0;
}

inline double present_value(const ImuSample& s, std::size_t axis) {
  if (!s.accel[axis]) throw DomainError("missing accelerometer value; interpolate before filtering");
  return *s.accel[axis];
}

}  // namespace detail

/// Scale factor that makes the median absolute deviation a consistent
/// estimator of a Gaussian standard deviation.
inline constexpr double kMadToSigma = 1.4826;

/// Hampel filter over a centred window, truncated at the series ends.
/// Values further than k * 1.4826 * MAD from the window median are
/// replaced by that median.
inline std::vector<double> hampel_filter(std::span<const double> values, std::size_t window, double k) {
  if (window < 3 || window % 2 == 0)
    throw ConfigError("Hampel window must be odd and >= 3, got " + std::to_string(window));
  if (!(k > 0.0)) throw ConfigError("Hampel threshold k must be positive");
  const std::size_t half = window / 2;
  const std::size_t n = values.size();
  std::vector<double> out(values.begin(), values.end());
  std::vector<double> buf;
  buf.reserve(window);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n, i + half + 1);
    buf.assign(values.begin() + static_cast<std::ptrdiff_t>(lo), values.begin() + static_cast<std::ptrdiff_t>(hi));
    const double med = detail::median_inplace(buf);
    for (std::size_t j = 0; j < buf.size(); ++j) buf[j] = std::abs(values[lo + j] - med);
    const double mad = detail::median_inplace(buf);
    if (std::abs(values[i] - med) > k * kMadToSigma * mad) out[i] = med;
  }
  return out;
}

inline ImuSeries remove_outliers(const ImuSeries& series, std::size_t window = 11, double k = 3.0) {
  if (window < 3 || window % 2 == 0)
    throw ConfigError("Hampel window must be odd and >= 3, got " + std::to_string(window));
  if (!(k > 0.0)) throw ConfigError("Hampel threshold k must be positive");
  ImuSeries out = series;
  std::vector<double> channel(series.samples.size());
  for (std::size_t axis = 0; axis < 3; ++axis) {
    for (std::size_t i = 0; i < channel.size(); ++i) channel[i] = detail::present_value(series.samples[i], axis);
    const auto filtered = hampel_filter(channel, window, k);
    for (std::size_t i = 0; i < channel.size(); ++i) out.samples[i].accel[axis] = filtered[i];
  }
  return out;
}

/// One second of accelerometer data reduced to its mean.
struct AggregateRow {
  double t = 0.0;  // whole second, floor(elapsed_s)
  std::array<double, 3> accel{};

  bool operator==(const AggregateRow&) const = default;
};

/// Buckets samples by whole elapsed second and averages each bucket.
/// Seconds with no samples produce no row.
inline std::vector<AggregateRow> aggregate_to_1hz(const ImuSeries& series) {
  if (series.samples.empty()) throw DomainError("cannot aggregate an empty series");
  std::vector<AggregateRow> rows;
  std::array<double, 3> sum{};
  std::size_t count = 0;
  double current = std::floor(series.samples.front().elapsed_s);
  auto flush = [&] {
    AggregateRow row;
    row.t = current;
    for (std::size_t a = 0; a < 3; ++a) row.accel[a] = sum[a] / static_cast<double>(count);
    rows.push_back(row);
    sum = {};
    count = 0;
  };
  for (const auto& s : series.samples) {
    const double second = std::floor(s.elapsed_s);
    if (second != current) {
      flush();
      current = second;
    }
    for (std::size_t a = 0; a < 3; ++a) sum[a] += detail::present_value(s, a);
    ++count;
  }
  flush();
  return rows;
}

struct ScheduleEntry {
  PostureLabel label = PostureLabel::NM;
  double duration_s = 0.0;

  bool operator==(const ScheduleEntry&) const = default;
};

using Schedule = std::vector<ScheduleEntry>;

/// Nine postures in canonical order, `seconds_each` apiece.
inline Schedule default_schedule(double seconds_each = 120.0) {
  Schedule s;
  for (auto p : kAllPostures) s.push_back({p, seconds_each});
  return s;
}

inline double schedule_duration(const Schedule& schedule) {
  double total = 0.0;
  for (const auto& e : schedule) total += e.duration_s;
  return total;
}

/// Schedule text: one `LABEL,duration_seconds` per line; `#` starts a comment.
inline Schedule parse_schedule(std::istream& in) {
  Schedule schedule;
  std::string line;
  std::size_t line_no = 0;
  while (detail::getline_stripped(in, line)) {
    ++line_no;
    auto body = detail::trim(std::string_view(line).substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto cells = detail::split(body, ',');
    if (cells.size() != 2) throw ParseError(line_no, "expected LABEL,duration_seconds");
    const auto label = try_parse_posture(detail::trim(cells[0]));
    if (!label) throw ParseError(line_no, "unknown posture label '" + std::string(detail::trim(cells[0])) + "'");
    const auto duration = detail::to_double(cells[1]);
    if (!duration || !(*duration > 0.0) || !std::isfinite(*duration))
      throw ParseError(line_no, "duration must be a positive number of seconds");
    schedule.push_back({*label, *duration});
  }
  if (schedule.empty()) throw FormatError("schedule has no entries");
  return schedule;
}

inline Schedule parse_schedule(const std::string& text) {
  std::istringstream in(text);
  return parse_schedule(in);
}

inline Schedule read_schedule_file(const std::string& path) {
  auto in = detail::open_input(path);
  return parse_schedule(in);
}

inline void write_schedule(std::ostream& out, const Schedule& schedule) {
  for (const auto& e : schedule) out << to_string(e.label) << ',' << detail::format_shortest(e.duration_s) << '\n';
}

/// Label of the half-open schedule interval [start, end) containing t.
inline PostureLabel label_at(const Schedule& schedule, double t) {
  double start = 0.0;
  for (const auto& e : schedule) {
    const double end = start + e.duration_s;
    if (t >= start && t < end) return e.label;
    start = end;
  }
  throw CoverageError("time " + detail::format_shortest(t) + " s is not covered by the schedule (" +
                      detail::format_shortest(start) + " s long)");
}

struct LabeledFeatureRow {
  double t = 0.0;
  std::vector<double> features;
  PostureLabel label = PostureLabel::NM;

  bool operator==(const LabeledFeatureRow&) const = default;
};

inline std::vector<LabeledFeatureRow> segment_by_schedule(std::span<const AggregateRow> rows,
                                                          const Schedule& schedule) {
  std::vector<LabeledFeatureRow> out;
  out.reserve(rows.size());
  for (const auto& r : rows)
    out.push_back({r.t, std::vector<double>(r.accel.begin(), r.accel.end()), label_at(schedule, r.t)});
  return out;
}

/// Per-channel mean and sample standard deviation.
struct ChannelStats {
  std::vector<double> mean;
  std::vector<double> stddev;

  bool operator==(const ChannelStats&) const = default;
};

inline ChannelStats fit_stats(std::span<const std::vector<double>> rows,
                              std::span<const std::string> channel_names = {}) {
  if (rows.size() < 2) throw DomainError("normalisation needs at least 2 training rows");
  const std::size_t d = rows.front().size();
  ChannelStats stats{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (const auto& r : rows) {
    if (r.size() != d) throw ShapeError("feature rows have inconsistent widths");
    for (std::size_t c = 0; c < d; ++c) stats.mean[c] += r[c];
  }
  const double n = static_cast<double>(rows.size());
  for (auto& m : stats.mean) m /= n;
  for (const auto& r : rows)
    for (std::size_t c = 0; c < d; ++c) stats.stddev[c] += (r[c] - stats.mean[c]) * (r[c] - stats.mean[c]);
  for (std::size_t c = 0; c < d; ++c) {
    stats.stddev[c] = std::sqrt(stats.stddev[c] / (n - 1.0));
    // Relative floor: a constant column can leave rounding residue in the mean.
    if (!(stats.stddev[c] > 1e-12 * std::max(1.0, std::abs(stats.mean[c])))) {
      const std::string name = c < channel_names.size() ? channel_names[c] : "#" + std::to_string(c);
      throw DegenerateChannelError("feature channel " + name + " has zero variance in the training rows");
    }
  }
  return stats;
}

inline ChannelStats fit_stats(std::span<const LabeledFeatureRow> rows, std::span<const std::string> channel_names = {}) {
  std::vector<std::vector<double>> features;
  features.reserve(rows.size());
  for (const auto& r : rows) features.push_back(r.features);
  return fit_stats(std::span<const std::vector<double>>(features), channel_names);
}

inline std::vector<double> normalize(const ChannelStats& stats, std::span<const double> x) {
  if (x.size() != stats.mean.size()) throw ShapeError("feature width does not match normalisation stats");
  std::vector<double> out(x.size());
  for (std::size_t c = 0; c < x.size(); ++c) out[c] = (x[c] - stats.mean[c]) / stats.stddev[c];
  return out;
}

inline std::vector<LabeledFeatureRow> normalize(const ChannelStats& stats, std::span<const LabeledFeatureRow> rows) {
  std::vector<LabeledFeatureRow> out(rows.begin(), rows.end());
  for (auto& r : out) r.features = normalize(stats, r.features);
  return out;
}

}  // namespace neckpose
