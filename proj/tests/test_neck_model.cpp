#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "neckpose/kv_config.hpp"
#include "neckpose/neck_model.hpp"
#include "neckpose/synth.hpp"
#include "oracles.hpp"

using namespace neckpose;

namespace {

NeckPose random_pose(std::mt19937_64& rng, const RangeOfMotion& rom = {}) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {rom.pitch * u(rng), rom.roll * u(rng), rom.yaw * u(rng)};
}

oracle::Vec3 oracle_point(const NeckModel& model, const NeckPose& pose, const Attachment& a) {
  const auto chain = oracle::chain(model.link_lengths(), pose.pitch, pose.roll, pose.yaw);
  return oracle::apply(chain[static_cast<std::size_t>(a.segment)], {a.offset.x(), a.offset.y(), a.offset.z()});
}

}  // namespace

TEST(BuildModel, DefaultHasSevenMarkersEightMuscles) {
  const auto model = build_default_model();
  EXPECT_EQ(model.markers().size(), 7u);
  EXPECT_EQ(model.muscles().size(), 8u);
  const std::vector<std::string> names = {"SKULL_FR", "SKULL_FL", "SKULL_BR", "SKULL_BL", "SJN", "AC_R", "AC_L"};
  EXPECT_EQ(model.marker_names(), names);
  for (const auto& m : model.muscles()) {
    EXPECT_NE(m.origin.segment, m.insertion.segment) << m.name;
    EXPECT_GT(m.slack_length, 0.0);
    EXPECT_EQ(m.stiffness, 500.0);
  }
}

TEST(BuildModel, ZeroLinkLengthRejected) {
  NeckModelConfig c;
  c.link_lengths[3] = 0.0;
  try {
    build_default_model(c);
    FAIL() << "expected a configuration error";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("link_length"), std::string::npos);
  }
  NeckModelConfig bad;
  bad.tendon_stiffness = -1.0;
  EXPECT_THROW(build_default_model(bad), ConfigError);
  bad = {};
  bad.range_of_motion.roll = 0.0;
  EXPECT_THROW(build_default_model(bad), ConfigError);
}

TEST(BuildModel, Deterministic) { EXPECT_EQ(build_default_model(), build_default_model()); }

TEST(BuildModel, FromKeyValueConfig) {
  const auto kv = KeyValueConfig::parse("link_length = 0.025\nlink_length.C1 = 0.03\nrom_yaw = 1.0\n");
  const auto model = build_default_model(model_config_from(kv));
  EXPECT_EQ(model.link_lengths()[0], 0.025);
  EXPECT_EQ(model.link_lengths()[6], 0.03);
  EXPECT_EQ(model.range_of_motion().yaw, 1.0);
  EXPECT_THROW(model_config_from(KeyValueConfig::parse("link_lenght = 0.02\n")), ConfigError);
  EXPECT_THROW(model_config_from(KeyValueConfig::parse("link_length = abc\n")), ConfigError);
  EXPECT_THROW(KeyValueConfig::parse("just words\n"), ParseError);
}

TEST(ForwardKinematics, NeutralSkullAboveThorax) {
  const auto model = build_default_model();
  const auto tf = forward_kinematics(model, {});
  EXPECT_TRUE(tf[Segment::Thorax].matrix().isIdentity(0.0));
  const Eigen::Vector3d skull = tf[Segment::Skull].translation();
  EXPECT_NEAR(skull.x(), 0.0, 1e-15);
  EXPECT_NEAR(skull.y(), 0.14, 1e-15);
  EXPECT_NEAR(skull.z(), 0.0, 1e-15);
  for (const auto& t : tf.world) EXPECT_TRUE(t.linear().isIdentity(1e-15));
}

TEST(ForwardKinematics, SmallPitchComposesAboutZ) {
  const auto model = build_default_model();
  const double eps = 1e-4;
  const auto tf = forward_kinematics(model, {7 * eps, 0, 0});
  const Eigen::AngleAxisd aa(tf[Segment::Skull].linear());
  EXPECT_NEAR(aa.angle(), 7 * eps, 1e-12);
  EXPECT_NEAR(aa.axis().z(), 1.0, 1e-9);
}

TEST(ForwardKinematics, MatchesChainedMatrixOracle) {
  const auto model = build_default_model();
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto pose = random_pose(rng);
    const auto tf = forward_kinematics(model, pose);
    const auto chain = oracle::chain(model.link_lengths(), pose.pitch, pose.roll, pose.yaw);
    for (std::size_t s = 0; s < kSegmentCount; ++s) {
      for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(tf.world[s].translation()[i], chain[s][i][3], 1e-10);
        for (int j = 0; j < 3; ++j) EXPECT_NEAR(tf.world[s].linear()(i, j), chain[s][i][j], 1e-12);
      }
    }
  }
}

TEST(ForwardKinematics, RigidTransforms) {
  const auto model = build_default_model();
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto tf = forward_kinematics(model, random_pose(rng));
    for (const auto& t : tf.world) {
      const Eigen::Matrix3d r = t.linear();
      EXPECT_TRUE((r.transpose() * r).isIdentity(1e-12));
      EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
    }
  }
}

TEST(ForwardKinematics, OutOfRangeRejected) {
  const auto model = build_default_model();
  EXPECT_THROW(forward_kinematics(model, {1.3, 0, 0}), RangeOfMotionError);
  EXPECT_THROW(marker_positions(model, {0, -0.95, 0}), RangeOfMotionError);
  EXPECT_THROW(muscle_lengths(model, {0, 0, 1.5}), RangeOfMotionError);
  EXPECT_THROW(muscle_lengths(model, {std::nan(""), 0, 0}), RangeOfMotionError);
}

TEST(Markers, ThoraxMarkersArePoseInvariant) {
  const auto model = build_default_model();
  const auto neutral = marker_positions(model, {});
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = marker_positions(model, random_pose(rng));
    for (const char* name : {"SJN", "AC_R", "AC_L"}) EXPECT_EQ(f.position(name), neutral.position(name));
  }
  EXPECT_TRUE(neutral.position("SJN").isApprox(Eigen::Vector3d(0.05, -0.02, 0.0)));
  EXPECT_TRUE(neutral.position("AC_R").isApprox(Eigen::Vector3d(0.0, 0.0, 0.18)));
}

TEST(Markers, NeutralTableMatches) {
  const auto model = build_default_model();
  const auto f = marker_positions(model, {});
  EXPECT_EQ(f.positions, model.neutral_markers());
  // Skull centre 0.04 above C1, markers at (+-0.07, 0.10, +-0.06) from it.
  EXPECT_TRUE(f.position("SKULL_FR").isApprox(Eigen::Vector3d(0.07, 0.28, 0.06), 1e-15));
  EXPECT_TRUE(f.position("SKULL_BL").isApprox(Eigen::Vector3d(-0.07, 0.28, -0.06), 1e-15));
}

TEST(Markers, MatchOracle) {
  const auto model = build_default_model();
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pose = random_pose(rng);
    const auto f = marker_positions(model, pose, 1.5);
    EXPECT_EQ(f.t, 1.5);
    for (std::size_t i = 0; i < model.markers().size(); ++i) {
      const auto p = oracle_point(model, pose, model.markers()[i].at);
      for (int c = 0; c < 3; ++c) EXPECT_NEAR(f.positions[i][c], p[c], 1e-10);
    }
  }
}

TEST(Markers, HalfTurnYawSwapsSkullMarkers) {
  // Needs a range of motion past the default so a half turn is legal.
  NeckModelConfig c;
  c.range_of_motion.yaw = 3.2;
  const auto model = build_default_model(c);
  const double pi = std::numbers::pi;
  const auto turned = marker_positions(model, {0, 0, pi});
  const auto neutral = marker_positions(model, {});
  for (auto [a, b] : {std::pair{"SKULL_FR", "SKULL_BL"}, {"SKULL_FL", "SKULL_BR"}}) {
    EXPECT_TRUE(turned.position(a).isApprox(neutral.position(b), 1e-12)) << a;
    EXPECT_TRUE(turned.position(b).isApprox(neutral.position(a), 1e-12)) << b;
    const auto p = oracle_point(model, {0, 0, pi}, model.markers()[model.marker_index(a)].at);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(turned.position(a)[i], p[i], 1e-12);
  }
}

TEST(Markers, MirrorSymmetry) {
  const auto model = build_default_model();
  const Eigen::Vector3d flip(1, 1, -1);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pose = random_pose(rng);
    const auto a = marker_positions(model, pose);
    const auto b = marker_positions(model, mirrored(pose));
    auto partner = [&](const std::string& n) -> std::string {
      if (n == "SKULL_FR") return "SKULL_FL";
      if (n == "SKULL_FL") return "SKULL_FR";
      if (n == "SKULL_BR") return "SKULL_BL";
      if (n == "SKULL_BL") return "SKULL_BR";
      if (n == "AC_R") return "AC_L";
      if (n == "AC_L") return "AC_R";
      return n;
    };
    for (std::size_t i = 0; i < a.names.size(); ++i)
      EXPECT_TRUE(b.position(partner(a.names[i])).isApprox(a.positions[i].cwiseProduct(flip), 1e-12));
  }
}

TEST(MuscleLengths, NeutralEqualsReference) {
  const auto model = build_default_model();
  const auto lengths = muscle_lengths(model, {});
  const auto chain = oracle::chain(model.link_lengths(), 0, 0, 0);
  for (std::size_t i = 0; i < kMuscleCount; ++i) {
    EXPECT_EQ(lengths[i], model.neutral_muscle_lengths()[i]);
    const auto& m = model.muscles()[i];
    const auto o = oracle::apply(chain[static_cast<std::size_t>(m.origin.segment)],
                                 {m.origin.offset.x(), m.origin.offset.y(), m.origin.offset.z()});
    const auto n = oracle::apply(chain[static_cast<std::size_t>(m.insertion.segment)],
                                 {m.insertion.offset.x(), m.insertion.offset.y(), m.insertion.offset.z()});
    EXPECT_NEAR(lengths[i], oracle::distance(o, n), 1e-15);
    EXPECT_NEAR(m.slack_length, 0.98 * lengths[i], 1e-15);
  }
}

TEST(MuscleLengths, SuprahyoidLengthenInExtension) {
  const auto model = build_default_model();
  const auto neutral = muscle_lengths(model, {});
  std::array<double, kMuscleCount> previous = neutral;
  for (int step = 1; step <= 60; ++step) {
    const double pitch = 1.2 * step / 60.0;
    const auto l = muscle_lengths(model, {pitch, 0, 0});
    for (auto i : kSuprahyoidMuscles) {
      EXPECT_GT(l[i], neutral[i]) << model.muscles()[i].name << " at pitch " << pitch;
      EXPECT_GT(l[i], previous[i]) << model.muscles()[i].name << " at pitch " << pitch;
    }
    previous = l;
  }
}

TEST(MuscleLengths, MirrorPairsSwap) {
  const auto model = build_default_model();
  EXPECT_EQ(model.muscles()[1].name, "digastric-post");
  EXPECT_EQ(model.muscles()[kMuscleMirror[1]].name, "stylohyoid");
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    auto pose = random_pose(rng);
    if (trial % 2 == 0) pose.roll = 0.0;  // the pure yaw <-> -yaw case
    const auto a = muscle_lengths(model, pose);
    const auto b = muscle_lengths(model, mirrored(pose));
    for (std::size_t i = 0; i < kMuscleCount; ++i) EXPECT_NEAR(a[i], b[kMuscleMirror[i]], 1e-14);
  }
}

TEST(MuscleLengths, LipschitzOnGrid) {
  const auto model = build_default_model();
  const double bound = model.reach();
  const auto& rom = model.range_of_motion();
  const double h = 0.05;
  for (double p = -rom.pitch; p + h <= rom.pitch; p += 0.3)
    for (double r = -rom.roll; r + h <= rom.roll; r += 0.3)
      for (double y = -rom.yaw; y + h <= rom.yaw; y += 0.35) {
        const auto a = muscle_lengths(model, {p, r, y});
        const NeckPose q{p + h, r + h, y + h};
        const auto b = muscle_lengths(model, q);
        const double dpose = std::sqrt(3.0) * h;
        for (std::size_t i = 0; i < kMuscleCount; ++i) {
          EXPECT_GT(b[i], 0.0);
          EXPECT_LE(std::abs(a[i] - b[i]), bound * dpose);
        }
      }
}

TEST(Tilt, BasicReadings) {
  auto t = tilt_from_accel({0, 1, 0});
  EXPECT_EQ(t.pitch, 0.0);
  EXPECT_EQ(t.roll, 0.0);
  t = tilt_from_accel({1, 0, 0});
  EXPECT_DOUBLE_EQ(t.pitch, std::numbers::pi / 2);
  EXPECT_THROW(tilt_from_accel({0.1, 0.1, 0.1}), DomainError);
  EXPECT_THROW(tilt_from_accel({0, 0, 0}), DomainError);
}

TEST(Tilt, RoundTripThroughAccelReading) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> pitch(-1.2, 1.2), roll(-0.9, 0.9);
  for (int trial = 0; trial < 1000; ++trial) {
    const NeckPose pose{pitch(rng), roll(rng), 0.0};
    const auto t = tilt_from_accel(accel_reading(pose));
    EXPECT_NEAR(t.pitch, pose.pitch, 1e-9);
    EXPECT_NEAR(t.roll, pose.roll, 1e-9);
  }
}
