#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "neckpose/imu.hpp"
#include "neckpose/neck_model.hpp"
#include "neckpose/posture.hpp"
#include "neckpose/preprocess.hpp"

namespace neckpose {

/// Band tilt per radian of axial rotation. Gravity alone cannot see a pure
/// axial rotation, so the band is modelled as rolling slightly with it.
/// This is a modelling artefact of the synthetic data, not anatomy.
inline constexpr double kBandCoupling = 0.25;

constexpr double deg(double degrees) noexcept { return degrees * std::numbers::pi / 180.0; }

/// Canonical pose of each posture.
struct PostureTable {
  std::array<NeckPose, kPostureCount> poses{};

  const NeckPose& operator[](PostureLabel p) const { return poses[index_of(p)]; }

  /// Default angles, inside normal cervical range of motion; roll follows
  /// the band-coupling rule.
  static PostureTable defaults(double coupling = kBandCoupling) {
    auto make = [coupling](double pitch_deg, double yaw_deg) {
      return NeckPose{deg(pitch_deg), coupling * deg(yaw_deg), deg(yaw_deg)};
    };
    PostureTable t;
    t.poses[index_of(PostureLabel::NU)] = make(50, 0);
    t.poses[index_of(PostureLabel::ND)] = make(-50, 0);
    t.poses[index_of(PostureLabel::NR)] = make(0, -60);
    t.poses[index_of(PostureLabel::NL)] = make(0, 60);
    t.poses[index_of(PostureLabel::NRU)] = make(35, -60);
    t.poses[index_of(PostureLabel::NRD)] = make(-35, -60);
    t.poses[index_of(PostureLabel::NLU)] = make(35, 60);
    t.poses[index_of(PostureLabel::NLD)] = make(-35, 60);
    t.poses[index_of(PostureLabel::NM)] = make(0, 0);
    return t;
  }
};

inline NeckPose posture_pose(PostureLabel label) {
  static const PostureTable table = PostureTable::defaults();
  return table[label];
}

/// Orientation of the neck-band sensor for a pose: yaw about the world
/// vertical, then pitch, then roll.
inline Eigen::Matrix3d sensor_orientation(const NeckPose& pose) {
  return (Eigen::AngleAxisd(pose.yaw, Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(pose.pitch, Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(pose.roll, Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

/// Noise-free static accelerometer reading in g: the +1 g reaction to
/// gravity expressed in the sensor frame.
inline Eigen::Vector3d accel_reading(const NeckPose& pose) {
  return sensor_orientation(pose).transpose() * Eigen::Vector3d::UnitY();
}

struct NoiseSpec {
  double accel_std = 0.02;   // g
  double jitter_std = 0.02;  // rad, per angle
  std::uint64_t seed = 42;

  NoiseSpec scaled(double factor) const { return {accel_std * factor, jitter_std * factor, seed}; }
};

struct SyntheticSession {
  ImuSeries imu;
  JointTrajectory truth;  // per-sample ground-truth pose
  std::vector<PostureLabel> labels;
};

inline constexpr std::int64_t kDefaultSessionEpochMs = 1'560'000'000'000;

/// Generates a labelled static-posture recording. Transitions between
/// schedule entries are instantaneous.
inline SyntheticSession simulate_session(const Schedule& schedule, const NoiseSpec& noise, double rate_hz = 100.0,
                                         const RangeOfMotion& rom = {},
                                         std::int64_t start_epoch_ms = kDefaultSessionEpochMs) {
  if (schedule.empty()) throw ConfigError("schedule is empty");
  if (!(rate_hz > 0.0)) throw ConfigError("sample rate must be positive");
  if (!(noise.accel_std >= 0.0) || !(noise.jitter_std >= 0.0)) throw ConfigError("noise deviations must be >= 0");

  const auto count = static_cast<std::size_t>(std::llround(schedule_duration(schedule) * rate_hz));
  SyntheticSession session;
  session.imu.rate_hz = rate_hz;
  session.imu.samples.reserve(count);
  session.truth.times.reserve(count);
  session.truth.poses.reserve(count);
  session.labels.reserve(count);

  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> jitter(0.0, 1.0);
  std::normal_distribution<double> accel_noise(0.0, 1.0);
  const PostureTable table = PostureTable::defaults();

  for (std::size_t i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / rate_hz;
    const PostureLabel label = label_at(schedule, t);
    NeckPose pose = table[label];
    pose.pitch += noise.jitter_std * jitter(rng);
    pose.roll += noise.jitter_std * jitter(rng);
    pose.yaw += noise.jitter_std * jitter(rng);
    pose = rom.clamp(pose);

    Eigen::Vector3d reading = accel_reading(pose);
    ImuSample s;
    s.epoch_ms = start_epoch_ms + std::llround(1000.0 * t);
    s.time = detail::format_wall_clock(s.epoch_ms);
    s.elapsed_s = t;
    for (std::size_t a = 0; a < 3; ++a)
      s.accel[a] = std::clamp(reading[a] + noise.accel_std * accel_noise(rng), -kAccelFullScale, kAccelFullScale);

    session.imu.samples.push_back(std::move(s));
    session.truth.times.push_back(t);
    session.truth.poses.push_back(pose);
    session.labels.push_back(label);
  }
  return session;
}

}  // namespace neckpose
