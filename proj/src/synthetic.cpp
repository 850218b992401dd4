#include "motioneval/synthetic.h"

#include "motioneval/errors.h"

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>

namespace motioneval::synthetic {

Pose restPose() {
  Pose p;
  p << 0.00, 0.95, 0.00,   // 0 pelvis
      0.09, 0.86, 0.00,    // 1 left hip
      -0.09, 0.86, 0.00,   // 2 right hip
      0.00, 1.05, 0.00,    // 3 spine1
      0.10, 0.50, 0.01,    // 4 left knee
      -0.10, 0.50, 0.01,   // 5 right knee
      0.00, 1.18, 0.00,    // 6 spine2
      0.10, 0.08, -0.02,   // 7 left ankle
      -0.10, 0.08, -0.02,  // 8 right ankle
      0.00, 1.25, 0.00,    // 9 spine3
      0.11, 0.02, 0.10,    // 10 left foot
      -0.11, 0.02, 0.10,   // 11 right foot
      0.00, 1.45, 0.00,    // 12 neck
      0.08, 1.38, 0.00,    // 13 left collar
      -0.08, 1.38, 0.00,   // 14 right collar
      0.00, 1.60, 0.03,    // 15 head
      0.18, 1.40, 0.00,    // 16 left shoulder
      -0.18, 1.40, 0.00,   // 17 right shoulder
      0.21, 1.13, -0.01,   // 18 left elbow
      -0.21, 1.13, -0.01,  // 19 right elbow
      0.23, 0.88, 0.02,    // 20 left wrist
      -0.23, 0.88, 0.02;   // 21 right wrist
  return p;
}

MotionSequence walk(double relativeAngle, double facingYaw, const WalkOptions& o, Rng& rng) {
  if (o.frames < 2 || !(o.rateHz > 0)) {
    throw ConfigError("synthetic walk needs >= 2 frames and a positive rate");
  }
  const Pose rest = restPose();
  const double speed = o.speed * (1.0 + o.speedJitter * rng.uniform(-1.0, 1.0));
  const double step = speed / o.rateHz;
  const double phase0 = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double cadence = 2.0 * std::numbers::pi * 1.8 / o.rateHz; // ~1.8 strides per second
  // Walking direction in the body frame (+z forward, +x left).
  const Eigen::Vector3d dir(std::sin(relativeAngle), 0.0, std::cos(relativeAngle));
  const Eigen::Matrix3d yaw =
      Eigen::AngleAxisd(facingYaw, Eigen::Vector3d::UnitY()).toRotationMatrix();

  std::vector<Pose> frames;
  frames.reserve(static_cast<size_t>(o.frames));
  for (int t = 0; t < o.frames; ++t) {
    const double ph = phase0 + cadence * t;
    const double swing = 0.18 * std::sin(ph);
    Pose p = rest;
    const Eigen::RowVector3d leftLeg = (swing * dir).transpose();
    for (int j : {4, 7, 10}) {
      const double w = j == 4 ? 0.5 : 1.0;
      p.row(j) += w * leftLeg;
      p.row(j + 1) -= w * leftLeg;
    }
    const double liftL = 0.06 * std::max(0.0, std::cos(ph));
    const double liftR = 0.06 * std::max(0.0, -std::cos(ph));
    p(7, 1) += liftL;
    p(10, 1) += liftL;
    p(8, 1) += liftR;
    p(11, 1) += liftR;
    // Arms counter-swing.
    for (int j : {18, 20}) {
      p.row(j) -= 0.5 * leftLeg;
      p.row(j + 1) += 0.5 * leftLeg;
    }
    const double bob = 0.02 * std::cos(2.0 * ph);
    const Eigen::RowVector3d travel = (step * t * dir).transpose();
    for (int j = 0; j < kNumJoints; ++j) {
      p.row(j) += travel;
      if (j != 7 && j != 8 && j != 10 && j != 11) p(j, 1) += bob;
      for (int c = 0; c < 3; ++c) p(j, c) += o.noise * rng.normal();
    }
    // Yaw about the start position.
    frames.push_back((p * yaw.transpose()).eval());
  }
  return MotionSequence(std::move(frames), o.rateHz);
}

namespace {

std::vector<WalkSample> task(int classes, int samplesPerClass, uint64_t seed, const WalkOptions& o,
                             const std::vector<std::string>& texts) {
  if (classes < 2 || samplesPerClass < 1) {
    throw ConfigError("synthetic task needs >= 2 classes and >= 1 sample per class");
  }
  Rng rng(seed);
  std::vector<WalkSample> out;
  for (int s = 0; s < samplesPerClass; ++s) {
    for (int c = 0; c < classes; ++c) {
      const double angle = 2.0 * std::numbers::pi * c / classes;
      const double facing = o.randomFacing ? rng.uniform(-std::numbers::pi, std::numbers::pi) : 0.0;
      out.push_back({walk(angle, facing, o, rng), texts[static_cast<size_t>(c)], c});
    }
  }
  return out;
}

} // namespace

std::vector<WalkSample> directionTask(int samplesPerClass, uint64_t seed, const WalkOptions& options) {
  std::vector<std::string> texts;
  for (const char* d : kDirectionNames) texts.push_back(std::string("a person walks ") + d);
  return task(static_cast<int>(texts.size()), samplesPerClass, seed, options, texts);
}

std::vector<WalkSample> bearingTask(int classes, int samplesPerClass, uint64_t seed,
                                    const WalkOptions& options) {
  std::vector<std::string> texts;
  for (int c = 0; c < classes; ++c) texts.push_back("a person walks on bearing " + std::to_string(c));
  return task(classes, samplesPerClass, seed, options, texts);
}

} // namespace motioneval::synthetic
