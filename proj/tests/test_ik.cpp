#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "neckpose/ik.hpp"
#include "neckpose/neck_model.hpp"
#include "neckpose/synth.hpp"
#include "oracles.hpp"

using namespace neckpose;

namespace {

NeckPose random_pose(std::mt19937_64& rng, double margin = 1.0) {
  std::uniform_real_distribution<double> u(-margin, margin);
  const RangeOfMotion rom;
  return {rom.pitch * u(rng), rom.roll * u(rng), rom.yaw * u(rng)};
}

MarkerFrame noisy(MarkerFrame f, std::mt19937_64& rng, double sigma) {
  std::normal_distribution<double> g(0.0, sigma);
  for (auto& p : f.positions) p += Eigen::Vector3d(g(rng), g(rng), g(rng));
  return f;
}

// Weighted squared marker error computed with the test-side chain.
double oracle_error(const NeckModel& model, const MarkerFrame& target, const NeckPose& q) {
  const auto chain = oracle::chain(model.link_lengths(), q.pitch, q.roll, q.yaw);
  double e = 0.0;
  for (std::size_t i = 0; i < target.names.size(); ++i) {
    const auto& at = model.markers()[model.marker_index(target.names[i])].at;
    const auto p = oracle::apply(chain[static_cast<std::size_t>(at.segment)], {at.offset.x(), at.offset.y(), at.offset.z()});
    for (int c = 0; c < 3; ++c) e += (p[c] - target.positions[i][c]) * (p[c] - target.positions[i][c]);
  }
  return e;
}

// Coarse grid over the pose box followed by a shrinking pattern search.
NeckPose grid_and_polish(const NeckModel& model, const MarkerFrame& target) {
  const RangeOfMotion rom = model.range_of_motion();
  NeckPose best{};
  double best_e = std::numeric_limits<double>::infinity();
  const int n = 13;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const NeckPose q{-rom.pitch + 2 * rom.pitch * i / (n - 1), -rom.roll + 2 * rom.roll * j / (n - 1),
                         -rom.yaw + 2 * rom.yaw * k / (n - 1)};
        const double e = oracle_error(model, target, q);
        if (e < best_e) {
          best_e = e;
          best = q;
        }
      }
  for (double step = 0.1; step > 1e-9; step *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (int axis = 0; axis < 3; ++axis)
        for (double sign : {-1.0, 1.0}) {
          Eigen::Vector3d v = best.vector();
          v[axis] += sign * step;
          const NeckPose q = rom.clamp(NeckPose::from_vector(v));
          const double e = oracle_error(model, target, q);
          if (e < best_e) {
            best_e = e;
            best = q;
            improved = true;
          }
        }
    }
  }
  return best;
}

}  // namespace

TEST(SolveFrame, RecoversFkPoseFromColdStart) {
  const auto model = build_default_model();
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto truth = random_pose(rng);
    const auto r = solve_frame(model, marker_positions(model, truth), IkSettings{});
    EXPECT_TRUE(r.converged);
    EXPECT_LT((r.pose.vector() - truth.vector()).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LT(r.rms_error, 1e-9);
    EXPECT_LE(r.iterations, IkSettings{}.max_iterations);
  }
}

TEST(SolveFrame, NeutralTargetIsImmediate) {
  const auto model = build_default_model();
  const auto r = solve_frame(model, marker_positions(model, {}), IkSettings{});
  EXPECT_LE(r.iterations, 1u);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.pose.vector(), Eigen::Vector3d::Zero());
  EXPECT_EQ(r.rms_error, 0.0);
}

TEST(SolveFrame, SettingsValidated) {
  const auto model = build_default_model();
  const auto target = marker_positions(model, {});
  IkSettings zero;
  for (const auto& n : model.marker_names()) zero.marker_weights[n] = 0.0;
  EXPECT_THROW(solve_frame(model, target, zero), ConfigError);
  IkSettings negative;
  negative.marker_weights["SJN"] = -1.0;
  EXPECT_THROW(solve_frame(model, target, negative), ConfigError);
  IkSettings tol;
  tol.tolerance = 0.0;
  EXPECT_THROW(solve_frame(model, target, tol), ConfigError);
  MarkerFrame unknown = target;
  unknown.names[0] = "NOSE";
  EXPECT_THROW(solve_frame(model, unknown, IkSettings{}), ConfigError);
  EXPECT_THROW(solve_frame(model, target, IkSettings{}, {2.0, 0, 0}), RangeOfMotionError);
}

TEST(SolveFrame, SubsetOfMarkersSuffices) {
  const auto model = build_default_model();
  const NeckPose truth{0.4, -0.3, 0.7};
  auto full = marker_positions(model, truth);
  MarkerFrame skull{0.0, {}, {}};
  for (std::size_t i = 0; i < 4; ++i) {
    skull.names.push_back(full.names[i]);
    skull.positions.push_back(full.positions[i]);
  }
  const auto r = solve_frame(model, skull, IkSettings{});
  EXPECT_LT((r.pose.vector() - truth.vector()).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(SolveFrame, NeverWorseThanStart) {
  const auto model = build_default_model();
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 50; ++trial) {
    const auto target = noisy(marker_positions(model, random_pose(rng)), rng, 0.01);
    const auto start = random_pose(rng);
    const auto r = solve_frame(model, target, IkSettings{}, start);
    EXPECT_LE(oracle_error(model, target, r.pose), oracle_error(model, target, start) + 1e-15);
    EXPECT_TRUE(model.range_of_motion().contains(r.pose));
  }
}

TEST(SolveFrame, WeightScaleEquivariance) {
  const auto model = build_default_model();
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 30; ++trial) {
    const auto target = noisy(marker_positions(model, random_pose(rng, 0.8)), rng, 0.005);
    IkSettings a;
    a.tolerance = 1e-20;
    a.marker_weights = {{"SKULL_FR", 2.0}, {"SKULL_BL", 0.5}, {"SJN", 3.0}};
    IkSettings b = a;
    for (auto& [name, w] : b.marker_weights) w *= 7.5;
    for (const auto& n : model.marker_names())
      if (!a.marker_weights.count(n)) b.marker_weights[n] = 7.5;
    const auto ra = solve_frame(model, target, a);
    const auto rb = solve_frame(model, target, b);
    EXPECT_LT((ra.pose.vector() - rb.pose.vector()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(SolveFrame, MatchesGridAndPolishOracle) {
  const auto model = build_default_model();
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 10; ++trial) {
    const auto target = noisy(marker_positions(model, random_pose(rng, 0.7)), rng, 0.003);
    const auto r = solve_frame(model, target, IkSettings{});
    const auto o = grid_and_polish(model, target);
    EXPECT_LT((r.pose.vector() - o.vector()).cwiseAbs().maxCoeff(), 1e-4)
        << "solver " << r.pose.vector().transpose() << " oracle " << o.vector().transpose();
  }
}

TEST(SolveTrajectory, SmoothPath) {
  const auto model = build_default_model();
  MarkerTrajectorySet markers;
  std::vector<NeckPose> truth;
  for (int k = 0; k < 200; ++k) {
    const double s = 0.05 * k;
    const NeckPose q{1.0 * std::sin(s), 0.6 * std::sin(0.7 * s + 1.0), 1.2 * std::cos(0.4 * s)};
    truth.push_back(q);
    markers.push_back(marker_positions(model, q, 0.01 * k));
  }
  const auto r = solve_trajectory(model, markers, IkSettings{});
  ASSERT_EQ(r.trajectory.size(), 200u);
  EXPECT_EQ(r.non_converged(), 0u);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    EXPECT_EQ(r.trajectory.times[k], 0.01 * k);
    worst = std::max(worst, (r.trajectory.poses[k].vector() - truth[k].vector()).cwiseAbs().maxCoeff());
  }
  EXPECT_LT(worst, 1e-5);
}

TEST(SolveTrajectory, WarmStartNoWorseThanCold) {
  const auto model = build_default_model();
  std::mt19937_64 rng(35);
  MarkerTrajectorySet markers;
  for (int k = 0; k < 60; ++k) {
    const double s = 0.1 * k;
    markers.push_back(noisy(marker_positions(model, {0.9 * std::sin(s), 0.3 * std::cos(s), 1.1 * std::sin(0.5 * s)}, k),
                            rng, 0.002));
  }
  // Solved to working precision, both starts land on the same minimum.
  IkSettings tight;
  tight.tolerance = 1e-20;
  const auto warm = solve_trajectory(model, markers, tight);
  const auto cold = solve_trajectory(model, markers, tight, true);
  for (int k = 0; k < 60; ++k) EXPECT_LE(warm.frames[k].rms_error, cold.frames[k].rms_error + 1e-12);
  // At the default tolerance the stopping points differ by at most the
  // allowed squared-error change, i.e. about 1e-10 / (2 * rms * 7) in rms.
  const auto warm_default = solve_trajectory(model, markers, IkSettings{});
  const auto cold_default = solve_trajectory(model, markers, IkSettings{}, true);
  for (int k = 0; k < 60; ++k)
    EXPECT_LE(warm_default.frames[k].rms_error, cold_default.frames[k].rms_error + 1e-8);
}

TEST(SolveTrajectory, SingleNeutralFrameAndSessionLength) {
  const auto model = build_default_model();
  MarkerTrajectorySet one;
  one.push_back(marker_positions(model, {}));
  const auto r = solve_trajectory(model, one, IkSettings{});
  ASSERT_EQ(r.trajectory.size(), 1u);
  EXPECT_EQ(r.trajectory.poses[0].vector(), Eigen::Vector3d::Zero());
  EXPECT_THROW(solve_trajectory(model, MarkerTrajectorySet{}, IkSettings{}), DomainError);

  MarkerTrajectorySet session;
  const auto schedule = default_schedule();
  for (int t = 0; t < 1080; ++t) session.push_back(marker_positions(model, posture_pose(label_at(schedule, t)), t));
  const auto s = solve_trajectory(model, session, IkSettings{});
  EXPECT_EQ(s.trajectory.size(), 1080u);
  EXPECT_EQ(s.non_converged(), 0u);
}

TEST(IkReport, ListsEveryFrame) {
  const auto model = build_default_model();
  MarkerTrajectorySet m;
  m.push_back(marker_positions(model, {}, 0.0));
  m.push_back(marker_positions(model, {0.1, 0, 0}, 1.0));
  std::ostringstream out;
  write_ik_report(out, solve_trajectory(model, m, IkSettings{}));
  const auto text = out.str();
  EXPECT_NE(text.find("# frames=2 non_converged=0"), std::string::npos);
  EXPECT_NE(text.find("frame\ttime\trms_error_m\titerations\tconverged"), std::string::npos);
  EXPECT_NE(text.find("\n2\t1.00000000\t"), std::string::npos);
}
