#pragma once

#include <cmath>
#include <cstddef>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "neckpose/detail/text.hpp"
#include "neckpose/error.hpp"
#include "neckpose/kinetics.hpp"
#include "neckpose/neck_model.hpp"

// Readers and writers for the tab-delimited motion-capture interchange
// formats: TRC marker trajectories and MOT/STO column tables. Writers always
// emit tabs and fixed 8-decimal numbers.

namespace neckpose {

/// Strict: the layout this library writes, with every header count checked.
/// Tolerant: any run of blanks/tabs separates fields and counts are advisory.
enum class ReadMode { Strict, Tolerant };

inline constexpr int kSimIoDecimals = 8;

// ---------------------------------------------------------------------------
// TRC

struct TrcFrame {
  std::size_t frame = 1;
  double time = 0.0;
  std::vector<Eigen::Vector3d> xyz;
};

struct TrcDocument {
  std::string name = "markers.trc";
  double data_rate = 100.0;
  double camera_rate = 100.0;
  std::size_t num_frames = 0;
  std::size_t num_markers = 0;
  std::string units = "m";
  double orig_data_rate = 100.0;
  std::size_t orig_start_frame = 1;
  std::size_t orig_num_frames = 0;
  std::vector<std::string> marker_names;
  std::vector<TrcFrame> frames;
};

inline constexpr const char* kTrcFieldNames =
    "DataRate\tCameraRate\tNumFrames\tNumMarkers\tUnits\tOrigDataRate\tOrigDataStartFrame\tOrigNumFrames";

/// Meters per unit for the accepted TRC length units.
inline double trc_unit_scale(const std::string& units) {
  if (units == "m") return 1.0;
  if (units == "mm") return 1e-3;
  throw UnitsError("unsupported TRC units '" + units + "' (expected m or mm)");
}

inline void write_trc(std::ostream& out, const TrcDocument& doc) {
  if (doc.frames.empty()) throw DomainError("TRC document has no frames");
  trc_unit_scale(doc.units);
  const std::size_t m = doc.marker_names.size();
  for (const auto& f : doc.frames)
    if (f.xyz.size() != m) throw ShapeError("TRC frame marker count differs from the marker list");

  out << "PathFileType\t4\t(X/Y/Z)\t" << doc.name << '\n';
  out << kTrcFieldNames << '\n';
  out << detail::format_shortest(doc.data_rate) << '\t' << detail::format_shortest(doc.camera_rate) << '\t'
      << doc.frames.size() << '\t' << m << '\t' << doc.units << '\t' << detail::format_shortest(doc.orig_data_rate)
      << '\t' << doc.orig_start_frame << '\t' << doc.frames.size() << '\n';
  out << "Frame#\tTime";
  for (const auto& name : doc.marker_names) out << '\t' << name << "\t\t";
  out << '\n';
  out << '\t';
  for (std::size_t i = 1; i <= m; ++i) out << "\tX" << i << "\tY" << i << "\tZ" << i;
  out << "\n\n";
  for (std::size_t k = 0; k < doc.frames.size(); ++k) {
    const auto& f = doc.frames[k];
    out << (k + 1) << '\t' << detail::format_fixed(f.time, kSimIoDecimals);
    for (const auto& p : f.xyz)
      for (int c = 0; c < 3; ++c) out << '\t' << detail::format_fixed(p[c], kSimIoDecimals);
    out << '\n';
  }
}

namespace detail {

inline std::vector<std::string_view> fields(std::string_view line, ReadMode mode) {
  if (mode == ReadMode::Tolerant) return split_ws(line);
  auto out = split(line, '\t');
  for (auto& f : out)
    if (!f.empty() && f.back() == '\r') f.remove_suffix(1);
  return out;
}

inline double number_at(std::string_view cell, std::size_t line_no) {
  const auto v = to_double(cell);
  if (!v || !std::isfinite(*v)) throw ParseError(line_no, "'" + std::string(cell) + "' is not a finite number");
  return *v;
}

template <typename Int>
Int integer_at(std::string_view cell, std::size_t line_no) {
  const auto v = to_integer<Int>(cell);
  if (!v) throw ParseError(line_no, "'" + std::string(cell) + "' is not an integer");
  return *v;
}

}  // namespace detail

inline TrcDocument read_trc(std::istream& in, ReadMode mode = ReadMode::Strict) {
  TrcDocument doc;
  std::string line;
  std::size_t line_no = 0;
  auto next = [&](const char* what) {
    if (!detail::getline_stripped(in, line)) throw FormatError(std::string("TRC ends before its ") + what);
    ++line_no;
  };

  next("PathFileType line");
  {
    const auto f = detail::fields(line, mode);
    if (f.empty() || f[0] != "PathFileType") throw FormatError("TRC line 1 must start with PathFileType");
    if (f.size() >= 4) doc.name = std::string(f[3]);
  }

  next("metadata names");
  const std::string key_line = line;  // views below must outlive the next read
  const auto keys = detail::split_ws(key_line);
  next("metadata values");
  const auto values = detail::split_ws(line);
  if (keys.size() != values.size())
    throw FormatError("TRC line 3 has " + std::to_string(values.size()) + " values for " +
                      std::to_string(keys.size()) + " metadata names");
  bool have_units = false;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto key = keys[i];
    const auto value = values[i];
    if (key == "DataRate") doc.data_rate = detail::number_at(value, line_no);
    else if (key == "CameraRate") doc.camera_rate = detail::number_at(value, line_no);
    else if (key == "NumFrames") doc.num_frames = detail::integer_at<std::size_t>(value, line_no);
    else if (key == "NumMarkers") doc.num_markers = detail::integer_at<std::size_t>(value, line_no);
    else if (key == "Units") { doc.units = std::string(value); have_units = true; }
    else if (key == "OrigDataRate") doc.orig_data_rate = detail::number_at(value, line_no);
    else if (key == "OrigDataStartFrame") doc.orig_start_frame = detail::integer_at<std::size_t>(value, line_no);
    else if (key == "OrigNumFrames") doc.orig_num_frames = detail::integer_at<std::size_t>(value, line_no);
    else if (mode == ReadMode::Strict) throw FormatError("unknown TRC metadata field '" + std::string(key) + "'");
  }
  if (!have_units) throw FormatError("TRC metadata has no Units field");
  trc_unit_scale(doc.units);

  next("marker name line");
  {
    const auto f = detail::fields(line, mode);
    if (f.size() < 2 || f[0] != "Frame#" || f[1] != "Time")
      throw FormatError("TRC line 4 must start with Frame# and Time");
    if (mode == ReadMode::Tolerant) {
      for (std::size_t i = 2; i < f.size(); ++i) doc.marker_names.emplace_back(f[i]);
    } else {
      for (std::size_t i = 2; i < f.size(); ++i) {
        if ((i - 2) % 3 == 0) {
          if (f[i].empty()) throw FormatError("TRC line 4: empty marker name in column " + std::to_string(i + 1));
          doc.marker_names.emplace_back(f[i]);
        } else if (!f[i].empty()) {
          throw FormatError("TRC line 4: marker names must be followed by two empty columns");
        }
      }
    }
  }
  const std::size_t m = doc.marker_names.size();

  next("coordinate label line");
  {
    auto labels = detail::split_ws(line);
    if (mode == ReadMode::Strict && labels.size() != 3 * m)
      throw FormatError("TRC line 5 has " + std::to_string(labels.size()) + " coordinate labels for " +
                        std::to_string(m) + " markers");
  }

  while (detail::getline_stripped(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::fields(line, mode);
    if (f.size() != 2 + 3 * m)
      throw FormatError("TRC line " + std::to_string(line_no) + " has " + std::to_string(f.size()) +
                        " columns, expected " + std::to_string(2 + 3 * m));
    TrcFrame frame;
    frame.frame = detail::integer_at<std::size_t>(f[0], line_no);
    frame.time = detail::number_at(f[1], line_no);
    frame.xyz.reserve(m);
    for (std::size_t j = 0; j < m; ++j)
      frame.xyz.emplace_back(detail::number_at(f[2 + 3 * j], line_no), detail::number_at(f[3 + 3 * j], line_no),
                             detail::number_at(f[4 + 3 * j], line_no));
    if (mode == ReadMode::Strict && frame.frame != doc.frames.size() + 1)
      throw FormatError("TRC line " + std::to_string(line_no) + ": frame number " + std::to_string(frame.frame) +
                        " out of sequence");
    doc.frames.push_back(std::move(frame));
  }

  if (mode == ReadMode::Strict) {
    if (doc.num_markers != m)
      throw FormatError("TRC NumMarkers=" + std::to_string(doc.num_markers) + " but " + std::to_string(m) +
                        " marker names");
    if (doc.num_frames != doc.frames.size())
      throw FormatError("TRC NumFrames=" + std::to_string(doc.num_frames) + " but " +
                        std::to_string(doc.frames.size()) + " data rows");
  } else {
    doc.num_markers = m;
    doc.num_frames = doc.frames.size();
  }
  return doc;
}

inline TrcDocument read_trc(const std::string& text, ReadMode mode = ReadMode::Strict) {
  std::istringstream in(text);
  return read_trc(in, mode);
}

inline TrcDocument read_trc_file(const std::string& path, ReadMode mode = ReadMode::Strict) {
  auto in = detail::open_input(path);
  return read_trc(in, mode);
}

inline std::string trc_string(const TrcDocument& doc) {
  std::ostringstream out;
  write_trc(out, doc);
  return out.str();
}

/// Header fields of a TRC file that are not derived from the trajectories.
struct TrcMeta {
  std::string name = "markers.trc";
  double data_rate = 1.0;
  std::string units = "m";
};

/// Builds a TRC document from trajectories in meters, converting to the
/// requested units.
inline TrcDocument trc_from_markers(const MarkerTrajectorySet& markers, const TrcMeta& meta = {}) {
  const double per_meter = 1.0 / trc_unit_scale(meta.units);
  TrcDocument doc;
  doc.name = meta.name;
  doc.data_rate = doc.camera_rate = doc.orig_data_rate = meta.data_rate;
  doc.units = meta.units;
  doc.marker_names = markers.names;
  doc.num_markers = markers.names.size();
  doc.num_frames = doc.orig_num_frames = markers.size();
  for (std::size_t k = 0; k < markers.size(); ++k) {
    TrcFrame f{k + 1, markers.times[k], {}};
    for (const auto& p : markers.frames[k]) f.xyz.push_back(p * per_meter);
    doc.frames.push_back(std::move(f));
  }
  return doc;
}

inline MarkerTrajectorySet markers_from_trc(const TrcDocument& doc) {
  const double scale = trc_unit_scale(doc.units);
  MarkerTrajectorySet out;
  out.names = doc.marker_names;
  for (const auto& f : doc.frames) {
    out.times.push_back(f.time);
    std::vector<Eigen::Vector3d> pts;
    for (const auto& p : f.xyz) pts.push_back(p * scale);
    out.frames.push_back(std::move(pts));
  }
  return out;
}

// ---------------------------------------------------------------------------
// MOT / STO

struct MotDocument {
  std::string name = "motion";
  std::vector<std::string> labels;  // first is "time"
  bool in_degrees = false;
  std::vector<std::vector<double>> rows;

  std::size_t column(std::string_view label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == label) return i;
    throw FormatError("MOT table has no column '" + std::string(label) + "'");
  }
};

inline void write_mot(std::ostream& out, const MotDocument& doc) {
  if (doc.labels.empty() || doc.labels.front() != "time") throw ShapeError("MOT first column must be 'time'");
  for (const auto& r : doc.rows)
    if (r.size() != doc.labels.size()) throw ShapeError("MOT row width differs from label count");
  out << doc.name << '\n'
      << "version=1\n"
      << "nRows=" << doc.rows.size() << '\n'
      << "nColumns=" << doc.labels.size() << '\n'
      << "inDegrees=" << (doc.in_degrees ? "yes" : "no") << '\n'
      << "endheader\n";
  for (std::size_t i = 0; i < doc.labels.size(); ++i) out << (i ? "\t" : "") << doc.labels[i];
  out << '\n';
  for (const auto& r : doc.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "\t" : "") << detail::format_fixed(r[i], kSimIoDecimals);
    out << '\n';
  }
}

/// Reads MOT and STO files (same header grammar).
inline MotDocument read_mot(std::istream& in, ReadMode mode = ReadMode::Strict) {
  MotDocument doc;
  std::string line;
  std::size_t line_no = 0;
  if (!detail::getline_stripped(in, line)) throw FormatError("MOT file is empty");
  ++line_no;
  doc.name = std::string(detail::trim(line));

  std::optional<std::size_t> n_rows;
  std::optional<std::size_t> n_cols;
  bool ended = false;
  while (detail::getline_stripped(in, line)) {
    ++line_no;
    const auto body = detail::trim(line);
    if (body == "endheader") {
      ended = true;
      break;
    }
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      if (mode == ReadMode::Strict && !body.empty())
        throw FormatError("MOT line " + std::to_string(line_no) + " is not a key=value header line");
      continue;
    }
    const std::string key = detail::to_lower(detail::trim(body.substr(0, eq)));
    const auto value = detail::trim(body.substr(eq + 1));
    if (key == "nrows" || key == "datarows") n_rows = detail::integer_at<std::size_t>(value, line_no);
    else if (key == "ncolumns" || key == "datacolumns") n_cols = detail::integer_at<std::size_t>(value, line_no);
    else if (key == "indegrees") doc.in_degrees = detail::to_lower(value) == "yes";
  }
  if (!ended) throw FormatError("MOT header has no endheader line");

  while (detail::getline_stripped(in, line)) {
    ++line_no;
    if (!detail::trim(line).empty()) break;
  }
  for (const auto f : detail::fields(line, mode)) doc.labels.emplace_back(f);
  if (doc.labels.empty() || detail::to_lower(doc.labels.front()) != "time")
    throw FormatError("MOT line " + std::to_string(line_no) + ": first column label must be 'time'");

  while (detail::getline_stripped(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::fields(line, mode);
    if (f.size() != doc.labels.size())
      throw FormatError("MOT line " + std::to_string(line_no) + " has " + std::to_string(f.size()) +
                        " columns, expected " + std::to_string(doc.labels.size()));
    std::vector<double> row;
    row.reserve(f.size());
    for (const auto cell : f) row.push_back(detail::number_at(cell, line_no));
    if (mode == ReadMode::Strict && !doc.rows.empty() && !(row[0] > doc.rows.back()[0]))
      throw FormatError("MOT line " + std::to_string(line_no) + ": time is not strictly increasing");
    doc.rows.push_back(std::move(row));
  }

  if (mode == ReadMode::Strict) {
    if (!n_rows || !n_cols) throw FormatError("MOT header lacks nRows or nColumns");
    if (*n_rows != doc.rows.size())
      throw FormatError("MOT nRows=" + std::to_string(*n_rows) + " but " + std::to_string(doc.rows.size()) +
                        " data rows");
    if (*n_cols != doc.labels.size())
      throw FormatError("MOT nColumns=" + std::to_string(*n_cols) + " but " + std::to_string(doc.labels.size()) +
                        " labels");
  }
  return doc;
}

inline MotDocument read_mot(const std::string& text, ReadMode mode = ReadMode::Strict) {
  std::istringstream in(text);
  return read_mot(in, mode);
}

inline MotDocument read_mot_file(const std::string& path, ReadMode mode = ReadMode::Strict) {
  auto in = detail::open_input(path);
  return read_mot(in, mode);
}

inline std::string mot_string(const MotDocument& doc) {
  std::ostringstream out;
  write_mot(out, doc);
  return out.str();
}

inline constexpr std::array<const char*, 3> kNeckAngleLabels = {"neck_pitch", "neck_roll", "neck_yaw"};

/// Joint trajectory in radians to a MOT table, optionally in degrees.
inline MotDocument mot_from_joint_trajectory(const JointTrajectory& traj, bool in_degrees,
                                             std::string name = "neck_kinematics") {
  const double scale = in_degrees ? 180.0 / std::numbers::pi : 1.0;
  MotDocument doc;
  doc.name = std::move(name);
  doc.labels = {"time", kNeckAngleLabels[0], kNeckAngleLabels[1], kNeckAngleLabels[2]};
  doc.in_degrees = in_degrees;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto& p = traj.poses[k];
    doc.rows.push_back({traj.times[k], p.pitch * scale, p.roll * scale, p.yaw * scale});
  }
  return doc;
}

inline JointTrajectory joint_trajectory_from_mot(const MotDocument& doc) {
  const double scale = doc.in_degrees ? std::numbers::pi / 180.0 : 1.0;
  const std::size_t cp = doc.column(kNeckAngleLabels[0]);
  const std::size_t cr = doc.column(kNeckAngleLabels[1]);
  const std::size_t cy = doc.column(kNeckAngleLabels[2]);
  JointTrajectory out;
  for (const auto& r : doc.rows) {
    out.times.push_back(r[0]);
    out.poses.push_back({r[cp] * scale, r[cr] * scale, r[cy] * scale});
  }
  return out;
}

inline MotDocument mot_from_forces(const MuscleForceSeries& series, std::string name = "hyoid_tendon_forces") {
  MotDocument doc;
  doc.name = std::move(name);
  doc.labels.push_back("time");
  doc.labels.insert(doc.labels.end(), series.names.begin(), series.names.end());
  for (std::size_t k = 0; k < series.size(); ++k) {
    std::vector<double> row{series.times[k]};
    row.insert(row.end(), series.forces[k].begin(), series.forces[k].end());
    doc.rows.push_back(std::move(row));
  }
  return doc;
}

inline MuscleForceSeries forces_from_mot(const MotDocument& doc, const NeckModel& model) {
  MuscleForceSeries out;
  out.names = model.muscle_names();
  std::array<std::size_t, kMuscleCount> cols{};
  for (std::size_t i = 0; i < kMuscleCount; ++i) cols[i] = doc.column(out.names[i]);
  for (const auto& r : doc.rows) {
    out.times.push_back(r[0]);
    MuscleForces f{};
    for (std::size_t i = 0; i < kMuscleCount; ++i) f[i] = r[cols[i]];
    out.forces.push_back(f);
  }
  return out;
}

}  // namespace neckpose
