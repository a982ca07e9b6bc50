#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "neckpose/kinetics.hpp"
#include "neckpose/neck_model.hpp"
#include "neckpose/sim_io.hpp"

using namespace neckpose;

namespace {

MarkerTrajectorySet two_frames() {
  MarkerTrajectorySet m;
  m.names = {"A", "B"};
  m.times = {0.0, 0.01};
  m.frames = {{{1.0, 2.0, 3.0}, {-0.5, 0.25, 0.0}}, {{1.5, 2.5, 3.5}, {0.125, -1.0, 2.0}}};
  return m;
}

}  // namespace

TEST(Trc, WriterOutputIsExact) {
  const auto text = trc_string(trc_from_markers(two_frames(), {"demo.trc", 100.0, "m"}));
  const std::string expected =
      "PathFileType\t4\t(X/Y/Z)\tdemo.trc\n"
      "DataRate\tCameraRate\tNumFrames\tNumMarkers\tUnits\tOrigDataRate\tOrigDataStartFrame\tOrigNumFrames\n"
      "100\t100\t2\t2\tm\t100\t1\t2\n"
      "Frame#\tTime\tA\t\t\tB\t\t\n"
      "\t\tX1\tY1\tZ1\tX2\tY2\tZ2\n"
      "\n"
      "1\t0.00000000\t1.00000000\t2.00000000\t3.00000000\t-0.50000000\t0.25000000\t0.00000000\n"
      "2\t0.01000000\t1.50000000\t2.50000000\t3.50000000\t0.12500000\t-1.00000000\t2.00000000\n";
  EXPECT_EQ(text, expected);
}

TEST(Trc, SevenMarkerHeaderCounts) {
  const auto model = build_default_model();
  MarkerTrajectorySet m;
  m.push_back(marker_positions(model, {}));
  const auto doc = read_trc(trc_string(trc_from_markers(m)));
  EXPECT_EQ(doc.num_markers, 7u);
  EXPECT_EQ(doc.num_frames, 1u);
  EXPECT_EQ(doc.marker_names, model.marker_names());
}

TEST(Trc, MillimetreUnitsScale) {
  const auto doc = read_trc(trc_string(trc_from_markers(two_frames(), {"mm.trc", 100.0, "mm"})));
  EXPECT_EQ(doc.units, "mm");
  EXPECT_DOUBLE_EQ(doc.frames[0].xyz[0].x(), 1000.0);
  const auto back = markers_from_trc(doc);
  EXPECT_NEAR(back.frames[1][1].z(), 2.0, 1e-12);
}

TEST(Trc, MissingCoordinatesAreFormatErrors) {
  const auto good = trc_string(trc_from_markers(two_frames()));
  // Drop the last two coordinates of the final row.
  std::string truncated = good.substr(0, good.size() - 1);
  for (int k = 0; k < 2; ++k) truncated = truncated.substr(0, truncated.rfind('\t'));
  truncated += '\n';
  try {
    read_trc(truncated);
    FAIL() << "expected a format error";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 8"), std::string::npos) << e.what();
  }
  // Empty cells in place of numbers.
  std::string blanked = good;
  blanked.replace(blanked.rfind("2.00000000"), 10, "");
  EXPECT_THROW(read_trc(blanked), FormatError);
}

TEST(Trc, UnknownUnitsRejected) {
  auto text = trc_string(trc_from_markers(two_frames()));
  text.replace(text.find("\tm\t"), 3, "\tcm\t");
  EXPECT_THROW(read_trc(text), UnitsError);
  EXPECT_THROW(trc_from_markers(two_frames(), {"x", 1.0, "inch"}), UnitsError);
}

TEST(Trc, StrictCountsValidated) {
  auto text = trc_string(trc_from_markers(two_frames()));
  auto bad_frames = text;
  bad_frames.replace(bad_frames.find("\t2\t2\tm"), 6, "\t3\t2\tm");
  EXPECT_THROW(read_trc(bad_frames), FormatError);
  auto bad_sequence = text;
  bad_sequence.replace(bad_sequence.rfind("\n2\t"), 3, "\n5\t");
  EXPECT_THROW(read_trc(bad_sequence), FormatError);
  EXPECT_NO_THROW(read_trc(bad_sequence, ReadMode::Tolerant));
}

TEST(Trc, TolerantModeAcceptsSpaces) {
  const std::string text =
      "PathFileType 4 (X/Y/Z) spaced.trc\n"
      "DataRate CameraRate NumFrames NumMarkers Units OrigDataRate OrigDataStartFrame OrigNumFrames\n"
      "60 60 1 1 mm 60 1 1\n"
      "Frame#   Time   M1\n"
      "    X1 Y1 Z1\n"
      "\n"
      "1   0.0   10.0   20.0   30.0\n";
  const auto doc = read_trc(text, ReadMode::Tolerant);
  ASSERT_EQ(doc.frames.size(), 1u);
  EXPECT_EQ(doc.marker_names, std::vector<std::string>{"M1"});
  EXPECT_EQ(doc.frames[0].xyz[0].z(), 30.0);
  EXPECT_EQ(doc.data_rate, 60.0);
}

TEST(Trc, RandomRoundTrips) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_int_distribution<int> count(1, 12);
  for (int trial = 0; trial < 100; ++trial) {
    MarkerTrajectorySet m;
    const int markers = count(rng);
    for (int i = 0; i < markers; ++i) m.names.push_back("M" + std::to_string(i));
    const int frames = count(rng) * 3;
    for (int k = 0; k < frames; ++k) {
      m.times.push_back(0.01 * k);
      std::vector<Eigen::Vector3d> f;
      for (int i = 0; i < markers; ++i) f.emplace_back(u(rng), u(rng), u(rng));
      m.frames.push_back(f);
    }
    const auto back = markers_from_trc(read_trc(trc_string(trc_from_markers(m))));
    ASSERT_EQ(back.names, m.names);
    ASSERT_EQ(back.size(), m.size());
    for (int k = 0; k < frames; ++k) {
      EXPECT_NEAR(back.times[k], m.times[k], 1e-8);
      for (int i = 0; i < markers; ++i) EXPECT_LE((back.frames[k][i] - m.frames[k][i]).cwiseAbs().maxCoeff(), 1e-8);
    }
  }
}

TEST(Mot, WriterOutputIsExact) {
  JointTrajectory traj;
  traj.times = {0.0, 1.0};
  traj.poses = {{0.0, 0.0, 0.0}, {std::numbers::pi / 2, -0.1, 0.25}};
  const std::string expected =
      "neck\n"
      "version=1\n"
      "nRows=2\n"
      "nColumns=4\n"
      "inDegrees=yes\n"
      "endheader\n"
      "time\tneck_pitch\tneck_roll\tneck_yaw\n"
      "0.00000000\t0.00000000\t0.00000000\t0.00000000\n"
      "1.00000000\t90.00000000\t-5.72957795\t14.32394488\n";
  EXPECT_EQ(mot_string(mot_from_joint_trajectory(traj, true, "neck")), expected);
}

TEST(Mot, HeaderErrors) {
  JointTrajectory traj{{0.0, 1.0}, {{}, {}}};
  const auto text = mot_string(mot_from_joint_trajectory(traj, false));
  auto no_end = text;
  no_end.replace(no_end.find("endheader"), 9, "");
  EXPECT_THROW(read_mot(no_end), FormatError);
  auto wrong_rows = text;
  wrong_rows.replace(wrong_rows.find("nRows=2"), 7, "nRows=3");
  EXPECT_THROW(read_mot(wrong_rows), FormatError);
  auto wrong_cols = text;
  wrong_cols.replace(wrong_cols.find("nColumns=4"), 10, "nColumns=5");
  EXPECT_THROW(read_mot(wrong_cols), FormatError);
  EXPECT_NO_THROW(read_mot(wrong_cols, ReadMode::Tolerant));
  auto backwards = text;
  backwards.replace(backwards.rfind("1.00000000"), 10, "0.00000000");
  EXPECT_THROW(read_mot(backwards), FormatError);
}

TEST(Mot, SessionShape) {
  JointTrajectory traj;
  for (int k = 0; k < 1080; ++k) {
    traj.times.push_back(k);
    traj.poses.push_back({0.001 * k, 0.0, -0.0005 * k});
  }
  const auto doc = read_mot(mot_string(mot_from_joint_trajectory(traj, true)));
  EXPECT_EQ(doc.rows.size(), 1080u);
  EXPECT_EQ(doc.labels.size(), 4u);
  EXPECT_TRUE(doc.in_degrees);
  const auto back = joint_trajectory_from_mot(doc);
  EXPECT_NEAR(back.poses[1079].pitch, 1.079, 1e-9);
}

TEST(Mot, RandomRoundTrips) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-500.0, 500.0);
  std::uniform_int_distribution<int> count(1, 15);
  for (int trial = 0; trial < 100; ++trial) {
    MotDocument doc;
    doc.name = "table" + std::to_string(trial);
    doc.in_degrees = trial % 2 == 0;
    doc.labels = {"time"};
    const int cols = count(rng);
    for (int c = 0; c < cols; ++c) doc.labels.push_back("c" + std::to_string(c));
    const int rows = count(rng) * 4;
    for (int r = 0; r < rows; ++r) {
      std::vector<double> row{0.5 * r};
      for (int c = 0; c < cols; ++c) row.push_back(u(rng));
      doc.rows.push_back(row);
    }
    const auto back = read_mot(mot_string(doc));
    EXPECT_EQ(back.name, doc.name);
    EXPECT_EQ(back.labels, doc.labels);
    EXPECT_EQ(back.in_degrees, doc.in_degrees);
    ASSERT_EQ(back.rows.size(), doc.rows.size());
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c <= cols; ++c) EXPECT_NEAR(back.rows[r][c], doc.rows[r][c], 1e-8);
  }
}

TEST(Mot, ForcesAsSto) {
  const auto model = build_default_model();
  JointTrajectory traj{{0.0, 1.0, 2.0}, {{}, {0.5, 0.1, -0.3}, {-0.4, -0.2, 0.9}}};
  const auto forces = compute_force_series(model, traj);
  const auto doc = read_mot(mot_string(mot_from_forces(forces)));
  EXPECT_FALSE(doc.in_degrees);
  EXPECT_EQ(doc.labels.size(), 9u);
  const auto back = forces_from_mot(doc, model);
  EXPECT_EQ(back.names, forces.names);
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < kMuscleCount; ++i) EXPECT_NEAR(back.forces[k][i], forces.forces[k][i], 1e-8);
}

TEST(Mot, StoKeywordsAccepted) {
  const std::string sto =
      "forces\nversion=1\ndatarows=1\ndatacolumns=2\ninDegrees=no\nendheader\ntime\tf\n0.0\t1.5\n";
  const auto doc = read_mot(sto);
  EXPECT_EQ(doc.rows[0][1], 1.5);
}
