#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "neckpose/error.hpp"
#include "neckpose/neck_model.hpp"

namespace neckpose {

/// Passive tendon spring: zero at or below slack, linear beyond it.
/// Stands in for the muscle-driven tendon forces a computed-muscle-control
/// run would report; any strictly monotone length-to-force map keeps the
/// posture information.
inline double tendon_force(const MusclePath& muscle, double length) {
  if (!(length > 0.0) || !std::isfinite(length))
    throw DomainError("tendon length must be positive, got " + detail::format_shortest(length));
  return muscle.stiffness * std::max(0.0, length - muscle.slack_length);
}

using MuscleForces = std::array<double, kMuscleCount>;

/// Hyoid tendon forces over time, one column per model muscle (N).
struct MuscleForceSeries {
  std::vector<std::string> names;
  std::vector<double> times;
  std::vector<MuscleForces> forces;

  std::size_t size() const { return times.size(); }
  bool operator==(const MuscleForceSeries&) const = default;
};

inline MuscleForces muscle_forces(const NeckModel& model, const NeckPose& pose) {
  const auto lengths = muscle_lengths(model, pose);
  MuscleForces out{};
  for (std::size_t i = 0; i < kMuscleCount; ++i) out[i] = tendon_force(model.muscles()[i], lengths[i]);
  return out;
}

inline MuscleForceSeries compute_force_series(const NeckModel& model, const JointTrajectory& trajectory) {
  if (trajectory.times.size() != trajectory.poses.size())
    throw ShapeError("joint trajectory has mismatched time and pose counts");
  MuscleForceSeries out;
  out.names = model.muscle_names();
  out.times = trajectory.times;
  out.forces.reserve(trajectory.size());
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    try {
      out.forces.push_back(muscle_forces(model, trajectory.poses[k]));
    } catch (const RangeOfMotionError& e) {
      throw RangeOfMotionError("frame " + std::to_string(k) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace neckpose
