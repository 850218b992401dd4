#include "motioneval/errors.h"
#include "motioneval/motion.h"
#include "motioneval/npy.h"

#include "test_util.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace motioneval {
namespace {

// Hand-built npy v1.0 container, independent of the writer under test.
std::string handNpy(const std::string& descr, const std::string& shape, const std::string& payload,
                    bool fortran = false) {
  std::string dict = "{'descr': '" + descr + "', 'fortran_order': " + (fortran ? "True" : "False") +
                     ", 'shape': " + shape + ", }";
  size_t total = 10 + dict.size() + 1;
  const size_t pad = (64 - total % 64) % 64;
  dict += std::string(pad, ' ') + "\n";
  std::string out = "\x93NUMPY";
  out += '\x01';
  out += '\x00';
  const uint16_t len = static_cast<uint16_t>(dict.size());
  out += static_cast<char>(len & 0xff);
  out += static_cast<char>(len >> 8);
  return out + dict + payload;
}

template <class T>
std::string rawBytes(const std::vector<T>& v) {
  std::string s(v.size() * sizeof(T), '\0');
  std::memcpy(s.data(), v.data(), s.size());
  return s;
}

TEST(Npy, ParsesHandBuiltFloat32) {
  std::vector<float> values = {1.5f, -2.0f, 3.25f, 0.0f, 7.0f, 8.5f};
  const NpyArray a = parseNpy(handNpy("<f4", "(2, 3)", rawBytes(values)));
  ASSERT_EQ(a.shape, (std::vector<size_t>{2, 3}));
  EXPECT_EQ(a.dtype, NpyDtype::Float32);
  for (size_t i = 0; i < values.size(); ++i) {
    EXPECT_EQ(a.data[i], values[i]);
  }
}

TEST(Npy, ParsesHandBuiltFloat64) {
  std::vector<double> values = {0.1, 0.2, 0.3};
  const NpyArray a = parseNpy(handNpy("<f8", "(3,)", rawBytes(values)));
  ASSERT_EQ(a.shape, (std::vector<size_t>{3}));
  EXPECT_EQ(a.data, values);
}

TEST(Npy, RejectsMalformedContainers) {
  const std::string payload = rawBytes(std::vector<float>(6, 0.0f));
  EXPECT_THROW(parseNpy("not an npy file at all"), FormatError);
  std::string badMagic = handNpy("<f4", "(2, 3)", payload);
  badMagic[1] = 'X';
  EXPECT_THROW(parseNpy(badMagic), FormatError);
  std::string v2 = handNpy("<f4", "(2, 3)", payload);
  v2[6] = '\x02';
  EXPECT_THROW(parseNpy(v2), FormatError);
  EXPECT_THROW(parseNpy(handNpy(">f4", "(2, 3)", payload)), FormatError);
  EXPECT_THROW(parseNpy(handNpy("<i4", "(2, 3)", payload)), FormatError);
  EXPECT_THROW(parseNpy(handNpy("<f4", "(2, 3)", payload, true)), FormatError);
  EXPECT_THROW(parseNpy(handNpy("<f4", "(2, 4)", payload)), FormatError);
}

TEST(Npy, RandomFloat32FileRoundTripsByteIdentical) {
  Rng rng(11);
  std::vector<float> values(10 * 22 * 3);
  for (auto& v : values) {
    v = static_cast<float>(rng.normal());
  }
  const std::string payload = rawBytes(values);
  const std::string original = handNpy("<f4", "(10, 22, 3)", payload);

  testing::TempDir dir("npy");
  const auto in = dir.path() / "in.npy";
  const auto out = dir.path() / "out.npy";
  {
    std::ofstream f(in, std::ios::binary);
    f << original;
  }
  saveNpy(out, loadNpy(in));
  std::ifstream f(out, std::ios::binary);
  const std::string written((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  const NpyArray back = parseNpy(written);
  ASSERT_EQ(back.shape, (std::vector<size_t>{10, 22, 3}));
  ASSERT_GE(written.size(), payload.size());
  EXPECT_EQ(written.substr(written.size() - payload.size()), payload);
  EXPECT_EQ(written.size() % 64, payload.size() % 64);
}

TEST(Npy, KeepsFirst22JointsOfWiderArrays) {
  NpyArray a;
  a.shape = {120, 52, 3};
  a.data.assign(120 * 52 * 3, 0.0);
  for (size_t t = 0; t < 120; ++t) {
    for (size_t j = 0; j < 22; ++j) {
      for (size_t k = 0; k < 3; ++k) {
        a.data[(t * 52 + j) * 3 + k] = static_cast<double>(t + j) + 0.1 * static_cast<double>(k);
      }
    }
  }
  const MotionSequence m = motionFromNpy(a);
  EXPECT_EQ(m.frameCount(), 120u);
  EXPECT_DOUBLE_EQ(m.joint(5, 21).x(), 26.0);
  EXPECT_DOUBLE_EQ(m.joint(119, 3).z(), 122.2);
}

TEST(Npy, MinimalZeroMotionIsValid) {
  NpyArray a;
  a.shape = {2, 22, 3};
  a.data.assign(2 * 22 * 3, 0.0);
  const MotionSequence m = motionFromNpy(a);
  EXPECT_EQ(m.frameCount(), 2u);
  EXPECT_EQ(m.frame(1).squaredNorm(), 0.0);
}

TEST(Npy, MotionPreconditions) {
  NpyArray a;
  a.shape = {1, 22, 3};
  a.data.assign(66, 0.0);
  EXPECT_THROW(motionFromNpy(a), DataError);
  a.shape = {2, 21, 3};
  a.data.assign(2 * 21 * 3, 0.0);
  EXPECT_THROW(motionFromNpy(a), DataError);
  a.shape = {2, 22, 3};
  a.data.assign(132, 0.0);
  a.data[40] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(motionFromNpy(a), DataError);
  a.data[40] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(motionFromNpy(a), DataError);
}

TEST(Derivatives, ConstantSignalHasZeroDerivatives) {
  Pose p = Pose::Constant(0.7);
  const auto d = derivatives(MotionSequence(std::vector<Pose>(5, p)));
  ASSERT_EQ(d.velocity.size(), 4u);
  ASSERT_EQ(d.acceleration.size(), 3u);
  for (const auto& v : d.velocity) {
    EXPECT_EQ(v.squaredNorm(), 0.0);
  }
  for (const auto& a : d.acceleration) {
    EXPECT_EQ(a.squaredNorm(), 0.0);
  }
}

TEST(Derivatives, HandComputedDifferences) {
  std::vector<Pose> poses(3, Pose::Zero());
  poses[1](0, 0) = 1.0;
  poses[2](0, 0) = 3.0;
  const auto d = derivatives(MotionSequence(poses));
  EXPECT_EQ(d.velocity[0](0, 0), 1.0);
  EXPECT_EQ(d.velocity[1](0, 0), 2.0);
  ASSERT_EQ(d.acceleration.size(), 1u);
  EXPECT_EQ(d.acceleration[0](0, 0), 1.0);
}

TEST(Derivatives, LinearMotionHasZeroAcceleration) {
  std::vector<Pose> poses(4, Pose::Zero());
  for (int t = 0; t < 4; ++t) {
    poses[t].col(0).setConstant(2.0 * t);
  }
  for (const auto& a : fullDerivatives(MotionSequence(poses)).acceleration) {
    EXPECT_EQ(a.squaredNorm(), 0.0);
  }
}

TEST(Derivatives, TwoFramesGiveVelocityOnly) {
  const auto d = derivatives(MotionSequence(std::vector<Pose>(2, Pose::Zero())));
  EXPECT_EQ(d.velocity.size(), 1u);
  EXPECT_TRUE(d.acceleration.empty());
  EXPECT_THROW(fullDerivatives(MotionSequence(std::vector<Pose>(2, Pose::Zero()))), DataError);
}

TEST(Derivatives, CumulativeVelocityReconstructsPositions) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const MotionSequence m = testing::randomMotion(rng, 2 + rng.index(60));
    const auto d = derivatives(m);
    Pose acc = m.frame(0);
    for (size_t t = 0; t < d.velocity.size(); ++t) {
      acc += d.velocity[t];
      EXPECT_LT((acc - m.frame(t + 1)).cwiseAbs().maxCoeff(), 1e-12);
    }
    for (size_t t = 0; t < d.acceleration.size(); ++t) {
      EXPECT_EQ(d.acceleration[t], d.velocity[t + 1] - d.velocity[t]);
    }
  }
}

TEST(Motion, ClipAndFlat) {
  Rng rng(5);
  const MotionSequence m = testing::randomMotion(rng, 7);
  const MotionSequence c = m.clipped(4);
  EXPECT_EQ(c.frameCount(), 4u);
  EXPECT_EQ(c.frame(3), m.frame(3));
  EXPECT_THROW(m.clipped(1), DataError);
  EXPECT_THROW(m.clipped(8), DataError);
  const auto flat = m.flat();
  const MotionSequence back = MotionSequence::fromFlat(flat, 7);
  for (size_t t = 0; t < 7; ++t) {
    EXPECT_EQ(back.frame(t), m.frame(t));
  }
  EXPECT_THROW(MotionSequence::fromFlat(flat, 6), ShapeError);
}

} // namespace
} // namespace motioneval
