#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "neckpose/detail/text.hpp"
#include "neckpose/error.hpp"
#include "neckpose/kv_config.hpp"

// World frame: X forward, Y up, Z to the subject's right. Lengths in meters,
// angles in radians.

namespace neckpose {

/// Rigid segments from the ground (thorax) up to the skull.
enum class Segment : std::uint8_t { Thorax, C7, C6, C5, C4, C3, C2, C1, Skull };

inline constexpr std::size_t kSegmentCount = 9;
inline constexpr std::size_t kVertebralJointCount = 7;
inline constexpr std::size_t kMarkerCount = 7;
inline constexpr std::size_t kMuscleCount = 8;

constexpr std::string_view to_string(Segment s) noexcept {
  constexpr std::array<std::string_view, kSegmentCount> names = {"thorax", "C7", "C6", "C5", "C4",
                                                                 "C3",     "C2", "C1", "skull"};
  return names[static_cast<std::size_t>(s)];
}

/// Total neck angles. Each of the seven cervical joints carries one seventh.
/// pitch: extension positive (about +Z). roll: right lateral bend positive
/// (about +X). yaw: left axial rotation positive (about +Y).
struct NeckPose {
  double pitch = 0.0;
  double roll = 0.0;
  double yaw = 0.0;

  bool operator==(const NeckPose&) const = default;
  Eigen::Vector3d vector() const { return {pitch, roll, yaw}; }
  static NeckPose from_vector(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }
};

/// Left/right mirror image of a pose.
inline NeckPose mirrored(const NeckPose& p) { return {p.pitch, -p.roll, -p.yaw}; }

struct RangeOfMotion {
  double pitch = 1.2;
  double roll = 0.9;
  double yaw = 1.4;

  bool operator==(const RangeOfMotion&) const = default;

  bool contains(const NeckPose& p) const {
    return std::abs(p.pitch) <= pitch && std::abs(p.roll) <= roll && std::abs(p.yaw) <= yaw;
  }
  NeckPose clamp(const NeckPose& p) const {
    return {std::clamp(p.pitch, -pitch, pitch), std::clamp(p.roll, -roll, roll), std::clamp(p.yaw, -yaw, yaw)};
  }
};

struct Attachment {
  Segment segment = Segment::Thorax;
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();

  bool operator==(const Attachment&) const = default;
};

struct Marker {
  std::string name;
  Attachment at;

  bool operator==(const Marker&) const = default;
};

/// Straight-line hyoid muscle-tendon element.
struct MusclePath {
  std::string name;
  Attachment origin;
  Attachment insertion;
  double slack_length = 0.0;  // m
  double stiffness = 0.0;     // N/m

  bool operator==(const MusclePath&) const = default;
};

/// Geometry and tendon parameters. Defaults describe an adult-sized neck.
struct NeckModelConfig {
  std::array<double, kVertebralJointCount> link_lengths = {0.02, 0.02, 0.02, 0.02, 0.02, 0.02, 0.02};
  double skull_center_height = 0.04;
  Eigen::Vector3d skull_marker_offset{0.07, 0.10, 0.06};  // from skull centre, signs mirrored per marker
  Eigen::Vector3d sjn_offset{0.05, -0.02, 0.0};
  double acromion_half_width = 0.18;
  RangeOfMotion range_of_motion;
  double tendon_stiffness = 500.0;
  double pretension = 0.02;  // slack length = (1 - pretension) * neutral length

  bool operator==(const NeckModelConfig&) const = default;
};

/// A geometric stand-in for one muscle: where it attaches, with the skull
/// and vertebral offsets expressed in their segment frames.
struct MuscleGeometry {
  const char* name;
  Attachment origin;
  Attachment insertion;
};

// Hyoid attaches to C3 about 5 cm anterior. Lateral elements are modelled
// one per side: digastric-post/stylohyoid and sternohyoid/omohyoid are
// mirror images of each other.
inline const std::array<MuscleGeometry, kMuscleCount>& default_muscle_geometry() {
  static const std::array<MuscleGeometry, kMuscleCount> table = {{
      {"digastric-ant", {Segment::Skull, {0.08, -0.02, 0.0}}, {Segment::C3, {0.05, -0.01, 0.0}}},
      {"digastric-post", {Segment::Skull, {-0.01, 0.0, 0.04}}, {Segment::C3, {0.05, -0.01, 0.01}}},
      {"mylohyoid", {Segment::Skull, {0.06, -0.03, 0.0}}, {Segment::C3, {0.05, -0.01, 0.0}}},
      {"geniohyoid", {Segment::Skull, {0.075, -0.03, 0.0}}, {Segment::C3, {0.052, -0.012, 0.0}}},
      {"stylohyoid", {Segment::Skull, {-0.01, 0.0, -0.04}}, {Segment::C3, {0.05, -0.01, -0.01}}},
      {"sternohyoid", {Segment::C3, {0.05, -0.01, 0.01}}, {Segment::Thorax, {0.04, -0.01, 0.05}}},
      {"omohyoid", {Segment::C3, {0.05, -0.01, -0.01}}, {Segment::Thorax, {0.04, -0.01, -0.05}}},
      {"thyrohyoid", {Segment::C3, {0.05, -0.012, 0.0}}, {Segment::C5, {0.045, -0.005, 0.0}}},
  }};
  return table;
}

/// Muscle index under the left/right mirror.
inline constexpr std::array<std::size_t, kMuscleCount> kMuscleMirror = {0, 4, 2, 3, 1, 6, 5, 7};

/// Indices of the suprahyoid group (skull to hyoid).
inline constexpr std::array<std::size_t, 5> kSuprahyoidMuscles = {0, 1, 2, 3, 4};

inline constexpr std::array<const char*, kMarkerCount> kMarkerNames = {
    "SKULL_FR", "SKULL_FL", "SKULL_BR", "SKULL_BL", "SJN", "AC_R", "AC_L"};

/// Per-segment world transforms; index with `Segment`.
struct SegmentTransforms {
  std::array<Eigen::Isometry3d, kSegmentCount> world;

  const Eigen::Isometry3d& operator[](Segment s) const { return world[static_cast<std::size_t>(s)]; }
  Eigen::Vector3d point(const Attachment& a) const { return (*this)[a.segment] * a.offset; }
};

/// Markers at one instant.
struct MarkerFrame {
  double t = 0.0;
  std::vector<std::string> names;
  std::vector<Eigen::Vector3d> positions;

  const Eigen::Vector3d& position(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return positions[i];
    throw DomainError("marker '" + std::string(name) + "' not in frame");
  }
};

/// Marker trajectories sharing one name list.
struct MarkerTrajectorySet {
  std::vector<std::string> names;
  std::vector<double> times;
  std::vector<std::vector<Eigen::Vector3d>> frames;

  std::size_t size() const { return times.size(); }
  MarkerFrame frame(std::size_t i) const { return {times.at(i), names, frames.at(i)}; }
  void push_back(const MarkerFrame& f) {
    if (names.empty() && frames.empty()) names = f.names;
    if (f.names != names) throw ShapeError("marker frame names differ from the trajectory set");
    times.push_back(f.t);
    frames.push_back(f.positions);
  }
};

/// Neck angles over time.
struct JointTrajectory {
  std::vector<double> times;
  std::vector<NeckPose> poses;

  std::size_t size() const { return times.size(); }
  bool operator==(const JointTrajectory&) const = default;
};

/// Rotation of one cervical joint carrying the given share of the pose,
/// intrinsic yaw-roll-pitch.
inline Eigen::Matrix3d joint_rotation(double pitch, double roll, double yaw) {
  return (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitY()) * Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX()) *
          Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitZ()))
      .toRotationMatrix();
}

class NeckModel {
public:
  static NeckModel build(const NeckModelConfig& config = {});

  const NeckModelConfig& config() const { return config_; }
  const std::array<double, kVertebralJointCount>& link_lengths() const { return config_.link_lengths; }
  const RangeOfMotion& range_of_motion() const { return config_.range_of_motion; }
  const std::vector<Marker>& markers() const { return markers_; }
  const std::vector<MusclePath>& muscles() const { return muscles_; }
  const std::vector<Eigen::Vector3d>& neutral_markers() const { return neutral_markers_; }
  const std::array<double, kMuscleCount>& neutral_muscle_lengths() const { return neutral_lengths_; }
  std::vector<std::string> marker_names() const {
    std::vector<std::string> out;
    for (const auto& m : markers_) out.push_back(m.name);
    return out;
  }
  std::vector<std::string> muscle_names() const {
    std::vector<std::string> out;
    for (const auto& m : muscles_) out.push_back(m.name);
    return out;
  }
  std::size_t marker_index(std::string_view name) const {
    for (std::size_t i = 0; i < markers_.size(); ++i)
      if (markers_[i].name == name) return i;
    throw ConfigError("model has no marker named '" + std::string(name) + "'");
  }

  /// Farthest attachment or marker from the thorax origin at neutral.
  double reach() const { return reach_; }

  bool operator==(const NeckModel&) const = default;

  void check_range(const NeckPose& pose) const {
    const auto& rom = config_.range_of_motion;
    auto check = [](double v, double limit, const char* name) {
      if (!std::isfinite(v) || std::abs(v) > limit)
        throw RangeOfMotionError(std::string(name) + " " + detail::format_shortest(v) +
                                 " rad is outside the range of motion +/-" + detail::format_shortest(limit));
    };
    check(pose.pitch, rom.pitch, "pitch");
    check(pose.roll, rom.roll, "roll");
    check(pose.yaw, rom.yaw, "yaw");
  }

  /// Forward kinematics without the range-of-motion check; used by solvers
  /// that probe just outside the box.
  SegmentTransforms transforms_unchecked(const NeckPose& pose) const {
    const double share = 1.0 / static_cast<double>(kVertebralJointCount);
    const Eigen::Matrix3d r = joint_rotation(pose.pitch * share, pose.roll * share, pose.yaw * share);
    SegmentTransforms out;
    Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
    out.world[0] = t;
    for (std::size_t j = 0; j < kVertebralJointCount; ++j) {
      t.rotate(r);
      t.translate(Eigen::Vector3d(0.0, config_.link_lengths[j], 0.0));
      out.world[j + 1] = t;
    }
    out.world[kSegmentCount - 1] = t;  // skull rides on C1
    return out;
  }

  std::vector<Eigen::Vector3d> marker_points_unchecked(const NeckPose& pose) const {
    const auto tf = transforms_unchecked(pose);
    std::vector<Eigen::Vector3d> out;
    out.reserve(markers_.size());
    for (const auto& m : markers_) out.push_back(tf.point(m.at));
    return out;
  }

  std::array<double, kMuscleCount> muscle_lengths_unchecked(const NeckPose& pose) const {
    const auto tf = transforms_unchecked(pose);
    std::array<double, kMuscleCount> out{};
    for (std::size_t i = 0; i < kMuscleCount; ++i)
      out[i] = (tf.point(muscles_[i].origin) - tf.point(muscles_[i].insertion)).norm();
    return out;
  }

private:
  NeckModel() = default;

  NeckModelConfig config_;
  std::vector<Marker> markers_;
  std::vector<MusclePath> muscles_;
  std::vector<Eigen::Vector3d> neutral_markers_;
  std::array<double, kMuscleCount> neutral_lengths_{};
  double reach_ = 0.0;
};

inline NeckModel NeckModel::build(const NeckModelConfig& config) {
  for (std::size_t i = 0; i < config.link_lengths.size(); ++i)
    if (!(config.link_lengths[i] > 0.0) || !std::isfinite(config.link_lengths[i]))
      throw ConfigError("link_length of " + std::string(to_string(static_cast<Segment>(i + 1))) + " must be > 0");
  if (!(config.skull_center_height >= 0.0) || !std::isfinite(config.skull_center_height))
    throw ConfigError("skull_center_height must be finite and >= 0");
  if (!config.skull_marker_offset.allFinite()) throw ConfigError("skull_marker_offset must be finite");
  if (!config.sjn_offset.allFinite()) throw ConfigError("sjn_offset must be finite");
  if (!std::isfinite(config.acromion_half_width)) throw ConfigError("acromion_half_width must be finite");
  const auto& rom = config.range_of_motion;
  if (!(rom.pitch > 0.0) || !(rom.roll > 0.0) || !(rom.yaw > 0.0))
    throw ConfigError("range_of_motion limits must be > 0");
  if (!(config.tendon_stiffness > 0.0) || !std::isfinite(config.tendon_stiffness))
    throw ConfigError("tendon_stiffness must be > 0");
  if (!(config.pretension >= 0.0 && config.pretension < 1.0)) throw ConfigError("pretension must be in [0, 1)");

  NeckModel model;
  model.config_ = config;

  const Eigen::Vector3d center(0.0, config.skull_center_height, 0.0);
  const Eigen::Vector3d& s = config.skull_marker_offset;
  model.markers_ = {
      {kMarkerNames[0], {Segment::Skull, center + Eigen::Vector3d(s.x(), s.y(), s.z())}},
      {kMarkerNames[1], {Segment::Skull, center + Eigen::Vector3d(s.x(), s.y(), -s.z())}},
      {kMarkerNames[2], {Segment::Skull, center + Eigen::Vector3d(-s.x(), s.y(), s.z())}},
      {kMarkerNames[3], {Segment::Skull, center + Eigen::Vector3d(-s.x(), s.y(), -s.z())}},
      {kMarkerNames[4], {Segment::Thorax, config.sjn_offset}},
      {kMarkerNames[5], {Segment::Thorax, {0.0, 0.0, config.acromion_half_width}}},
      {kMarkerNames[6], {Segment::Thorax, {0.0, 0.0, -config.acromion_half_width}}},
  };

  const NeckPose neutral{};
  const auto tf = model.transforms_unchecked(neutral);
  for (const auto& g : default_muscle_geometry()) {
    MusclePath m{g.name, g.origin, g.insertion, 0.0, config.tendon_stiffness};
    model.muscles_.push_back(m);
  }
  model.neutral_lengths_ = model.muscle_lengths_unchecked(neutral);
  for (std::size_t i = 0; i < kMuscleCount; ++i) {
    if (!(model.neutral_lengths_[i] > 0.0)) throw ConfigError("muscle " + model.muscles_[i].name + " has zero length");
    model.muscles_[i].slack_length = (1.0 - config.pretension) * model.neutral_lengths_[i];
  }
  model.neutral_markers_ = model.marker_points_unchecked(neutral);

  for (const auto& p : model.neutral_markers_) model.reach_ = std::max(model.reach_, p.norm());
  for (const auto& m : model.muscles_) {
    model.reach_ = std::max(model.reach_, tf.point(m.origin).norm());
    model.reach_ = std::max(model.reach_, tf.point(m.insertion).norm());
  }
  return model;
}

inline NeckModel build_default_model(const NeckModelConfig& config = {}) { return NeckModel::build(config); }

/// Keys accepted in a model configuration file.
inline NeckModelConfig model_config_from(const KeyValueConfig& kv) {
  static const std::set<std::string> known = {
      "link_length",      "link_length.C7",      "link_length.C6",      "link_length.C5",
      "link_length.C4",   "link_length.C3",      "link_length.C2",      "link_length.C1",
      "skull_center_height", "skull_marker_x",   "skull_marker_y",      "skull_marker_z",
      "sjn_x",            "sjn_y",               "sjn_z",               "acromion_half_width",
      "rom_pitch",        "rom_roll",            "rom_yaw",             "tendon_stiffness",
      "pretension"};
  kv.require_known(known);
  NeckModelConfig c;
  const double all = kv.get_double("link_length", c.link_lengths[0]);
  for (std::size_t i = 0; i < kVertebralJointCount; ++i) {
    const std::string key = "link_length." + std::string(to_string(static_cast<Segment>(i + 1)));
    c.link_lengths[i] = kv.get_double(key, all);
  }
  c.skull_center_height = kv.get_double("skull_center_height", c.skull_center_height);
  c.skull_marker_offset = {kv.get_double("skull_marker_x", c.skull_marker_offset.x()),
                           kv.get_double("skull_marker_y", c.skull_marker_offset.y()),
                           kv.get_double("skull_marker_z", c.skull_marker_offset.z())};
  c.sjn_offset = {kv.get_double("sjn_x", c.sjn_offset.x()), kv.get_double("sjn_y", c.sjn_offset.y()),
                  kv.get_double("sjn_z", c.sjn_offset.z())};
  c.acromion_half_width = kv.get_double("acromion_half_width", c.acromion_half_width);
  c.range_of_motion = {kv.get_double("rom_pitch", c.range_of_motion.pitch),
                       kv.get_double("rom_roll", c.range_of_motion.roll),
                       kv.get_double("rom_yaw", c.range_of_motion.yaw)};
  c.tendon_stiffness = kv.get_double("tendon_stiffness", c.tendon_stiffness);
  c.pretension = kv.get_double("pretension", c.pretension);
  return c;
}

inline NeckModel load_model(const std::string& path) {
  if (path.empty()) return NeckModel::build();
  return NeckModel::build(model_config_from(KeyValueConfig::read_file(path)));
}

inline SegmentTransforms forward_kinematics(const NeckModel& model, const NeckPose& pose) {
  model.check_range(pose);
  return model.transforms_unchecked(pose);
}

inline MarkerFrame marker_positions(const NeckModel& model, const NeckPose& pose, double t = 0.0) {
  model.check_range(pose);
  return {t, model.marker_names(), model.marker_points_unchecked(pose)};
}

inline std::array<double, kMuscleCount> muscle_lengths(const NeckModel& model, const NeckPose& pose) {
  model.check_range(pose);
  return model.muscle_lengths_unchecked(pose);
}

/// Head tilt recovered from a static accelerometer reading (g units).
struct TiltEstimate {
  double pitch = 0.0;
  double roll = 0.0;
};

/// Readings below this magnitude cannot be a resting posture.
inline constexpr double kMinStaticAccel = 0.5;

/// Inverts the gravity reading of a band oriented R_y(yaw) R_z(pitch) R_x(roll);
/// yaw is unobservable from gravity alone.
inline TiltEstimate tilt_from_accel(const Eigen::Vector3d& accel) {
  if (!accel.allFinite() || !(accel.norm() > kMinStaticAccel))
    throw DomainError("accelerometer magnitude " + detail::format_shortest(accel.norm()) +
                      " g is not a static posture (free fall?)");
  return {std::atan2(accel.x(), std::hypot(accel.y(), accel.z())), std::atan2(-accel.z(), accel.y())};
}

}  // namespace neckpose
