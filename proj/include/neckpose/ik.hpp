#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "neckpose/detail/text.hpp"
#include "neckpose/error.hpp"
#include "neckpose/neck_model.hpp"

namespace neckpose {

struct IkSettings {
  std::map<std::string, double> marker_weights;  // absent markers weigh 1
  double tolerance = 1e-10;                       // on the drop in weighted squared error
  std::size_t max_iterations = 100;
  double damping = 1e-6;
  double jacobian_step = 1e-6;  // rad, central differences
  std::size_t max_halvings = 20;

  double weight(const std::string& marker) const {
    const auto it = marker_weights.find(marker);
    return it == marker_weights.end() ? 1.0 : it->second;
  }
};

struct IkFrameResult {
  NeckPose pose;
  double rms_error = 0.0;  // weighted RMS marker distance, m
  std::size_t iterations = 0;
  bool converged = false;
};

struct IkTrajectoryResult {
  JointTrajectory trajectory;
  std::vector<IkFrameResult> frames;

  std::size_t non_converged() const {
    std::size_t n = 0;
    for (const auto& f : frames) n += f.converged ? 0 : 1;
    return n;
  }
};

namespace detail {

// The weighted marker-fitting objective for one frame.
class MarkerObjective {
public:
  MarkerObjective(const NeckModel& model, const MarkerFrame& target, const IkSettings& settings) : model_(model) {
    if (target.names.size() != target.positions.size())
      throw ShapeError("marker frame has mismatched names and positions");
    double total = 0.0;
    for (std::size_t i = 0; i < target.names.size(); ++i) {
      const std::size_t idx = model.marker_index(target.names[i]);
      const double w = settings.weight(target.names[i]);
      if (!(w >= 0.0) || !std::isfinite(w))
        throw ConfigError("marker weight for " + target.names[i] + " must be finite and >= 0");
      if (!target.positions[i].allFinite())
        throw DomainError("target marker " + target.names[i] + " is not finite");
      if (w == 0.0) continue;
      indices_.push_back(idx);
      sqrt_weights_.push_back(std::sqrt(w));
      targets_.push_back(target.positions[i]);
      total += w;
    }
    if (indices_.empty()) throw ConfigError("IK needs at least one marker with positive weight");
    weight_sum_ = total;
  }

  Eigen::VectorXd residual(const NeckPose& pose) const {
    const auto tf = model_.transforms_unchecked(pose);
    Eigen::VectorXd r(3 * indices_.size());
    for (std::size_t i = 0; i < indices_.size(); ++i)
      r.segment<3>(3 * static_cast<Eigen::Index>(i)) =
          sqrt_weights_[i] * (tf.point(model_.markers()[indices_[i]].at) - targets_[i]);
    return r;
  }

  double squared_error(const NeckPose& pose) const { return residual(pose).squaredNorm(); }

  Eigen::MatrixXd jacobian(const NeckPose& pose, double h) const {
    Eigen::MatrixXd j(3 * static_cast<Eigen::Index>(indices_.size()), 3);
    const Eigen::Vector3d q = pose.vector();
    for (int c = 0; c < 3; ++c) {
      Eigen::Vector3d plus = q;
      Eigen::Vector3d minus = q;
      plus[c] += h;
      minus[c] -= h;
      j.col(c) = (residual(NeckPose::from_vector(plus)) - residual(NeckPose::from_vector(minus))) / (2.0 * h);
    }
    return j;
  }

  double rms(double squared) const { return std::sqrt(squared / weight_sum_); }

  // Rounding-level uncertainty of squared_error near `squared`: each
  // residual carries an absolute error of a few ulps of the marker
  // coordinates, not of the residual itself.
  double rounding(double squared) const {
    double extent = 1.0;
    double w_max = 0.0;
    for (std::size_t i = 0; i < targets_.size(); ++i) {
      extent = std::max(extent, targets_[i].cwiseAbs().maxCoeff());
      w_max = std::max(w_max, sqrt_weights_[i]);
    }
    const double ulp = 32.0 * std::numeric_limits<double>::epsilon() * extent * w_max;
    return 2.0 * std::sqrt(squared * static_cast<double>(3 * targets_.size())) * ulp + ulp * ulp;
  }

private:
  const NeckModel& model_;
  std::vector<std::size_t> indices_;
  std::vector<double> sqrt_weights_;
  std::vector<Eigen::Vector3d> targets_;
  double weight_sum_ = 0.0;
};

}  // namespace detail

/// Minimises sum_i w_i |m_i(target) - m_i(model, q)|^2 over the neck pose by
/// damped Gauss-Newton with a central-difference Jacobian. Each iterate is
/// clamped to the range of motion; a step that raises the error is halved.
inline IkFrameResult solve_frame(const NeckModel& model, const MarkerFrame& target, const IkSettings& settings,
                                 const NeckPose& warm_start = {}) {
  if (!(settings.tolerance > 0.0)) throw ConfigError("IK tolerance must be > 0");
  if (settings.max_iterations < 1) throw ConfigError("IK needs at least one iteration");
  if (!(settings.damping >= 0.0) || !(settings.jacobian_step > 0.0)) throw ConfigError("invalid IK damping or step");
  model.check_range(warm_start);

  const detail::MarkerObjective objective(model, target, settings);
  const auto& rom = model.range_of_motion();

  IkFrameResult result;
  NeckPose q = warm_start;
  double err = objective.squared_error(q);
  if (err == 0.0) {
    result.converged = true;
    result.pose = q;
    return result;
  }

  double last_move = std::numeric_limits<double>::infinity();
  for (std::size_t it = 1; it <= settings.max_iterations; ++it) {
    result.iterations = it;
    const Eigen::VectorXd r = objective.residual(q);
    const Eigen::MatrixXd j = objective.jacobian(q, settings.jacobian_step);
    const Eigen::Matrix3d normal = j.transpose() * j + settings.damping * Eigen::Matrix3d::Identity();
    const Eigen::Vector3d step = normal.ldlt().solve(-j.transpose() * r);

    double scale = 1.0;
    NeckPose candidate = q;
    double candidate_err = err;
    bool accepted = false;
    // Near the optimum the error changes by less than its own rounding, so a
    // step that is no worse to working precision is taken; the step itself
    // comes from residuals and stays accurate there.
    const double noise = objective.rounding(err);
    for (std::size_t h = 0; h <= settings.max_halvings; ++h, scale *= 0.5) {
      candidate = rom.clamp(NeckPose::from_vector(q.vector() + scale * step));
      candidate_err = objective.squared_error(candidate);
      if (candidate_err <= err || (h == 0 && candidate_err <= err + noise)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No descent along the damped direction: a stationary point to
      // working precision.
      result.converged = true;
      break;
    }
    const double improvement = err - candidate_err;
    const double moved = (candidate.vector() - q.vector()).norm();
    q = candidate;
    err = candidate_err;
    if (err == 0.0) {
      result.converged = true;
      break;
    }
    if (improvement < settings.tolerance) {
      // Below rounding the error no longer tells progress apart; keep
      // stepping while the steps still shrink.
      if (improvement > noise || moved < 1e-13 || moved >= last_move) {
        result.converged = true;
        break;
      }
    }
    last_move = moved;
  }
  result.pose = q;
  result.rms_error = objective.rms(err);
  return result;
}

/// Solves every frame in time order. Warm starts chain from the previous
/// frame's solution unless `cold_start` is set, in which case each frame
/// starts at neutral.
inline IkTrajectoryResult solve_trajectory(const NeckModel& model, const MarkerTrajectorySet& markers,
                                           const IkSettings& settings, bool cold_start = false) {
  if (markers.size() == 0) throw DomainError("marker trajectory has no frames");
  IkTrajectoryResult out;
  out.frames.reserve(markers.size());
  NeckPose warm{};
  for (std::size_t k = 0; k < markers.size(); ++k) {
    const auto frame = markers.frame(k);
    auto result = solve_frame(model, frame, settings, cold_start ? NeckPose{} : warm);
    warm = result.pose;
    out.trajectory.times.push_back(frame.t);
    out.trajectory.poses.push_back(result.pose);
    out.frames.push_back(result);
  }
  return out;
}

/// Plain-text per-frame diagnostics written next to the motion file.
inline void write_ik_report(std::ostream& out, const IkTrajectoryResult& result) {
  out << "# frames=" << result.frames.size() << " non_converged=" << result.non_converged() << '\n';
  out << "frame\ttime\trms_error_m\titerations\tconverged\n";
  for (std::size_t k = 0; k < result.frames.size(); ++k) {
    const auto& f = result.frames[k];
    char rms[32];
    std::snprintf(rms, sizeof(rms), "%.3e", f.rms_error);
    out << k + 1 << '\t' << detail::format_fixed(result.trajectory.times[k], 8) << '\t' << rms << '\t'
        << f.iterations << '\t' << (f.converged ? "yes" : "no") << '\n';
  }
}

}  // namespace neckpose
