#include "motioneval/features.h"

#include "motioneval/errors.h"

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>

namespace motioneval {

namespace {

namespace fl = feature_layout;

// Rest-pose bone directions of the 22-joint skeleton (joint relative to its parent).
const std::array<Vec3, kNumJoints> kRestDirections = {
    Vec3(0, 0, 0),  Vec3(1, 0, 0),  Vec3(-1, 0, 0), Vec3(0, 1, 0),  Vec3(0, -1, 0),
    Vec3(0, -1, 0), Vec3(0, 1, 0),  Vec3(0, -1, 0), Vec3(0, -1, 0), Vec3(0, 1, 0),
    Vec3(0, 0, 1),  Vec3(0, 0, 1),  Vec3(0, 1, 0),  Vec3(1, 0, 0),  Vec3(-1, 0, 0),
    Vec3(0, 0, 1),  Vec3(0, -1, 0), Vec3(0, -1, 0), Vec3(0, -1, 0), Vec3(0, -1, 0),
    Vec3(0, -1, 0), Vec3(0, -1, 0)};

constexpr int kRightHip = 2;
constexpr int kLeftHip = 1;
constexpr int kRightShoulder = 17;
constexpr int kLeftShoulder = 16;
constexpr double kTiny = 1e-12;

Eigen::Matrix3d rotationY(double angle) {
  Eigen::Matrix3d r;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  r << c, 0, s, 0, 1, 0, -s, 0, c;
  return r;
}

// Minimal rotation taking unit vector a onto unit vector b.
Eigen::Matrix3d swingRotation(const Vec3& a, const Vec3& b) {
  const Vec3 axis = a.cross(b);
  const double c = a.dot(b);
  const double s = axis.norm();
  if (s < kTiny) {
    if (c > 0) {
      return Eigen::Matrix3d::Identity();
    }
    // Antiparallel: half turn about any axis perpendicular to a.
    Vec3 perp = a.cross(Vec3::UnitX());
    if (perp.norm() < 1e-6) {
      perp = a.cross(Vec3::UnitY());
    }
    perp.normalize();
    return 2.0 * perp * perp.transpose() - Eigen::Matrix3d::Identity();
  }
  const Vec3 k = axis / s;
  Eigen::Matrix3d kx;
  kx << 0, -k.z(), k.y(), k.z(), 0, -k.x(), -k.y(), k.x(), 0;
  return Eigen::Matrix3d::Identity() + s * kx + (1 - c) * kx * kx;
}

double wrapAngle(double a) {
  constexpr double twoPi = 2.0 * std::numbers::pi;
  a = std::fmod(a + std::numbers::pi, twoPi);
  if (a < 0) {
    a += twoPi;
  }
  return a - std::numbers::pi;
}

bool forwardDirection(const Pose& pose, Vec3& forward) {
  const Vec3 across = (pose.row(kRightHip) - pose.row(kLeftHip)).transpose() +
                      (pose.row(kRightShoulder) - pose.row(kLeftShoulder)).transpose();
  forward = Vec3::UnitY().cross(across);
  forward.y() = 0.0;
  const double n = forward.norm();
  if (n < kTiny) {
    return false;
  }
  forward /= n;
  return true;
}

} // namespace

double headingAngle(const Pose& pose) {
  Vec3 f;
  if (!forwardDirection(pose, f)) {
    return 0.0;
  }
  return std::atan2(f.x(), f.z());
}

Eigen::Matrix3d facingRotation(const Pose& pose) {
  return rotationY(-headingAngle(pose));
}

MotionFeatures extractFeatures(const MotionSequence& motion, double footThreshold) {
  const auto& frames = motion.frames();
  const size_t T = frames.size();

  bool degenerate = true;
  for (const auto& pose : frames) {
    for (int j = 1; j < kNumJoints && degenerate; ++j) {
      if ((pose.row(j) - pose.row(kRootJoint)).norm() > 0.0) {
        degenerate = false;
      }
    }
    if (!degenerate) {
      break;
    }
  }
  if (degenerate) {
    throw DataError("degenerate skeleton: all joints coincide in every frame");
  }

  MotionFeatures out;
  out.values.setZero(static_cast<Eigen::Index>(T), fl::kDim);

  std::vector<double> heading(T);
  for (size_t t = 0; t < T; ++t) {
    heading[t] = headingAngle(frames[t]);
  }

  for (size_t t = 0; t < T; ++t) {
    const auto row = static_cast<Eigen::Index>(t);
    const Pose& pose = frames[t];
    const Eigen::Matrix3d face = rotationY(-heading[t]);
    // Forward difference; the final frame reuses the previous step.
    const size_t a = t + 1 < T ? t : t - 1;
    const Pose delta = frames[a + 1] - frames[a];
    const double dTheta = wrapAngle(heading[a + 1] - heading[a]);

    out.values(row, fl::kRootAngularVelocity) = dTheta;
    const Vec3 rootVel = face * delta.row(kRootJoint).transpose();
    out.values(row, fl::kRootLinearVelocity) = rootVel.x();
    out.values(row, fl::kRootLinearVelocity + 1) = rootVel.z();
    out.values(row, fl::kRootHeight) = pose(kRootJoint, 1);

    const Vec3 root = pose.row(kRootJoint).transpose();
    std::array<Eigen::Matrix3d, kNumJoints> global;
    global[kRootJoint].setIdentity();
    for (int j = 1; j < kNumJoints; ++j) {
      const Vec3 rel = face * (pose.row(j).transpose() - root);
      out.values.block<1, 3>(row, fl::kRelativePositions + 3 * (j - 1)) = rel.transpose();

      const int parent = kSmplParents[j];
      const Vec3 bone = face * (pose.row(j) - pose.row(parent)).transpose();
      const double len = bone.norm();
      Eigen::Matrix3d local = Eigen::Matrix3d::Identity();
      if (len > kTiny) {
        global[j] = swingRotation(kRestDirections[j], bone / len);
        local = global[parent].transpose() * global[j];
      } else {
        global[j] = global[parent];
      }
      const int base = fl::kRotations + 6 * (j - 1);
      for (int r = 0; r < 3; ++r) {
        out.values(row, base + r) = local(r, 0);
        out.values(row, base + 3 + r) = local(r, 1);
      }
    }

    for (int j = 0; j < kNumJoints; ++j) {
      const Vec3 v = face * delta.row(j).transpose();
      out.values.block<1, 3>(row, fl::kJointVelocities + 3 * j) = v.transpose();
    }
    for (size_t f = 0; f < kFootJoints.size(); ++f) {
      const double speed = delta.row(kFootJoints[f]).norm();
      out.values(row, fl::kFootContacts + static_cast<int>(f)) = speed < footThreshold ? 1.0 : 0.0;
    }
  }
  return out;
}

} // namespace motioneval
