#include "motioneval/ce_metrics.h"
#include "motioneval/errors.h"

#include "oracles.h"
#include "test_util.h"

#include <gtest/gtest.h>

namespace motioneval {
namespace {

oracle::RawMotion raw(const MotionSequence& m) {
  return {m.frameCount(), m.flat()};
}

CeConfig config(CeKind kind, CeComponent component, JointGrouping grouping, double s = 1.0) {
  CeConfig c;
  c.kind = kind;
  c.component = component;
  c.grouping = grouping;
  c.rootScale = s;
  return c;
}

MotionSequence singleJointX(const std::vector<double>& x) {
  std::vector<Pose> poses(x.size(), Pose::Zero());
  for (size_t t = 0; t < x.size(); ++t) {
    poses[t](0, 0) = x[t];
  }
  return MotionSequence(poses);
}

TEST(CeMetrics, Groupings) {
  EXPECT_EQ(groupJoints(JointGrouping::Root), std::vector<int>{0});
  EXPECT_EQ(groupJoints(JointGrouping::Joint).size(), 21u);
  EXPECT_EQ(groupJoints(JointGrouping::Joint).front(), 1);
  EXPECT_EQ(groupJoints(JointGrouping::Pose).size(), 22u);
}

TEST(CeMetrics, IdentityIsZero) {
  Rng rng(1);
  const MotionSequence m = testing::randomMotion(rng, 12);
  for (auto kind : {CeKind::AE, CeKind::AVE}) {
    for (auto comp : {CeComponent::Position, CeComponent::Velocity, CeComponent::Acceleration,
                      CeComponent::PV, CeComponent::PVA}) {
      for (auto g : {JointGrouping::Root, JointGrouping::Joint, JointGrouping::Pose}) {
        EXPECT_EQ(ceScore(m, m, config(kind, comp, g, 3.0)), 0.0);
      }
    }
  }
}

TEST(CeMetrics, HandAverageError) {
  const auto ref = singleJointX({0.0, 1.0});
  const auto gen = singleJointX({0.0, 0.0});
  EXPECT_DOUBLE_EQ(averageError(ref, gen, config(CeKind::AE, CeComponent::Position,
                                                 JointGrouping::Root)),
                   0.5);
}

TEST(CeMetrics, HandVarianceError) {
  const auto ref = singleJointX({0.0, 2.0});
  const auto gen = singleJointX({0.0, 0.0});
  EXPECT_DOUBLE_EQ(averageVarianceError(ref, gen, config(CeKind::AVE, CeComponent::Position,
                                                         JointGrouping::Root)),
                   2.0);
}

TEST(CeMetrics, PoseIsMeanOfPerJointErrors) {
  Rng rng(2);
  const auto a = testing::randomMotion(rng, 9);
  const auto b = testing::randomMotion(rng, 9);
  const auto ra = raw(a), rb = raw(b);
  double sum = 0.0;
  for (int j = 0; j < 22; ++j) {
    const auto sa = oracle::jointSignal(ra, 9, j, false, 1.0, 0);
    const auto sb = oracle::jointSignal(rb, 9, j, false, 1.0, 0);
    double e = 0.0;
    for (size_t t = 0; t < 9; ++t) {
      e += std::hypot(sa[t][0] - sb[t][0], sa[t][1] - sb[t][1], sa[t][2] - sb[t][2]);
    }
    sum += e / 9.0;
  }
  EXPECT_NEAR(averageError(a, b, config(CeKind::AE, CeComponent::Position, JointGrouping::Pose)),
              sum / 22.0, 1e-12);
}

TEST(CeMetrics, MatchesBruteForceOracle) {
  Rng rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const auto a = testing::randomMotion(rng, 2 + rng.index(20));
    const auto b = testing::randomMotion(rng, 2 + rng.index(20));
    const double s = std::ldexp(1.0, static_cast<int>(rng.index(9)) - 4);
    for (int kind = 0; kind < 2; ++kind) {
      for (int comp = 0; comp < 5; ++comp) {
        for (int g = 0; g < 3; ++g) {
          const auto cfg = config(static_cast<CeKind>(kind), static_cast<CeComponent>(comp),
                                  static_cast<JointGrouping>(g), s);
          const auto expected = oracle::ce(raw(a), raw(b), kind, comp, g, s);
          if (expected) {
            EXPECT_NEAR(ceScore(a, b, cfg), *expected, 1e-9) << cfg.name();
          } else {
            EXPECT_THROW(ceScore(a, b, cfg), DataError) << cfg.name();
          }
        }
      }
    }
  }
}

TEST(CeMetrics, VarianceShiftInvariance) {
  Rng rng(4);
  const auto a = testing::randomMotion(rng, 15);
  const auto b = testing::randomMotion(rng, 15);
  std::vector<Pose> shifted = b.frames();
  for (auto& p : shifted) {
    p.array() += 4.25;
  }
  const auto cfg = config(CeKind::AVE, CeComponent::Position, JointGrouping::Pose);
  EXPECT_NEAR(averageVarianceError(a, b, cfg), averageVarianceError(a, MotionSequence(shifted), cfg),
              1e-9);
}

TEST(CeMetrics, SymmetryAndClipping) {
  Rng rng(5);
  const auto a = testing::randomMotion(rng, 20);
  const auto b = testing::randomMotion(rng, 13);
  for (auto kind : {CeKind::AE, CeKind::AVE}) {
    for (auto comp : {CeComponent::Position, CeComponent::Velocity, CeComponent::PVA}) {
      const auto cfg = config(kind, comp, JointGrouping::Pose, 0.5);
      const double ab = ceScore(a, b, cfg);
      EXPECT_GE(ab, 0.0);
      EXPECT_NEAR(ab, ceScore(b, a, cfg), 1e-12);
      EXPECT_EQ(ab, ceScore(a.clipped(13), b, cfg));
    }
  }
}

TEST(CeMetrics, CombinedWeights) {
  Rng rng(6);
  const auto a = testing::randomMotion(rng, 10);
  const auto b = testing::randomMotion(rng, 10);
  CeConfig pv = config(CeKind::AE, CeComponent::PV, JointGrouping::Joint);
  pv.weights = {2.0, 1.0, 1.0};
  const double pos = averageError(a, b, config(CeKind::AE, CeComponent::Position, JointGrouping::Joint));
  const double vel = averageError(a, b, config(CeKind::AE, CeComponent::Velocity, JointGrouping::Joint));
  EXPECT_NEAR(combinedCe(a, b, pv), 2.0 * pos + vel, 1e-12);

  CeConfig pva = config(CeKind::AVE, CeComponent::PVA, JointGrouping::Pose);
  pva.weights = {1.5, 3.0, 0.5};
  const double base = combinedCe(a, b, pva);
  pva.weights = {3.0, 6.0, 1.0};
  EXPECT_NEAR(combinedCe(a, b, pva), 2.0 * base, 1e-12);
}

TEST(CeMetrics, CombinedArithmeticExample) {
  // CE_pos = 0.5 and CE_vel = 0.25 on a two-frame root signal.
  const auto ref = singleJointX({0.0, 0.5});
  const auto gen = singleJointX({0.0, 0.0});
  CeConfig pv = config(CeKind::AE, CeComponent::PV, JointGrouping::Root);
  pv.weights = {2.0, 1.0, 1.0};
  const double pos = averageError(ref, gen, config(CeKind::AE, CeComponent::Position, JointGrouping::Root));
  const double vel = averageError(ref, gen, config(CeKind::AE, CeComponent::Velocity, JointGrouping::Root));
  EXPECT_DOUBLE_EQ(pos, 0.25);
  EXPECT_DOUBLE_EQ(vel, 0.5);
  EXPECT_DOUBLE_EQ(combinedCe(ref, gen, pv), 1.0);
  pv.weights = {1.0, 2.0, 1.0};
  EXPECT_DOUBLE_EQ(combinedCe(ref, gen, pv), 1.25);
}

TEST(CeMetrics, CombinedRejectsBadWeights) {
  Rng rng(7);
  const auto a = testing::randomMotion(rng, 6);
  CeConfig pv = config(CeKind::AE, CeComponent::PV, JointGrouping::Pose);
  pv.weights.acceleration = 4.0;
  EXPECT_THROW(combinedCe(a, a, pv), ConfigError);
  pv.weights = {0.0, 1.0, 1.0};
  EXPECT_THROW(combinedCe(a, a, pv), ConfigError);
  EXPECT_THROW(combinedCe(a, a, config(CeKind::AE, CeComponent::Position, JointGrouping::Pose)),
               ConfigError);
  EXPECT_THROW(ceScore(a, a, config(CeKind::AE, CeComponent::Position, JointGrouping::Pose, 0.0)),
               ConfigError);
}

TEST(CeMetrics, RootScalingOnlyTouchesGroupedJoints) {
  Rng rng(8);
  const auto m = testing::randomMotion(rng, 5);
  const auto sig = componentSignal(m, CeComponent::Position, JointGrouping::Root, 4.0);
  EXPECT_EQ(sig[2].row(0), 4.0 * m.frame(2).row(0));
  EXPECT_EQ(sig[2].row(7), m.frame(2).row(7));
  const auto joint = componentSignal(m, CeComponent::Position, JointGrouping::Joint, 4.0);
  EXPECT_EQ(joint[1].row(0), m.frame(1).row(0));
  EXPECT_LT((joint[1].row(7) - (4.0 * m.frame(1).row(0) + m.frame(1).row(7) - m.frame(1).row(0)))
                .norm(),
            1e-12);
}

TEST(CeMetrics, NamesRoundTrip) {
  const auto cfg = config(CeKind::AVE, CeComponent::PVA, JointGrouping::Joint);
  EXPECT_EQ(cfg.name(), "Joint_AVE_PVA");
  EXPECT_EQ(parseCeKind("AE"), CeKind::AE);
  EXPECT_EQ(parseCeComponent("Acceleration"), CeComponent::Acceleration);
  EXPECT_EQ(parseJointGrouping("Pose"), JointGrouping::Pose);
  EXPECT_THROW(parseCeKind("MSE"), ConfigError);
}

} // namespace
} // namespace motioneval
