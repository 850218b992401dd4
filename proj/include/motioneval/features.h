#pragma once

#include "motioneval/motion.h"

#include <Eigen/Core>

#include <array>

namespace motioneval {

// Per-frame 263-dim motion representation (HumanML3D layout):
//   [0]        root angular velocity about +y (rad/frame)
//   [1, 3)     root linear velocity, x and z, in the facing frame
//   [3]        root height
//   [4, 67)    joints 1..21 relative to the root, facing frame
//   [67, 193)  joints 1..21 local rotation, 6D (first two matrix columns)
//   [193, 259) joints 0..21 velocity, facing frame
//   [259, 263) foot contacts for joints 7, 10, 8, 11 (left ankle/foot, right ankle/foot)
namespace feature_layout {
inline constexpr int kRootAngularVelocity = 0;
inline constexpr int kRootLinearVelocity = 1;
inline constexpr int kRootHeight = 3;
inline constexpr int kRelativePositions = 4;
inline constexpr int kRotations = 67;
inline constexpr int kJointVelocities = 193;
inline constexpr int kFootContacts = 259;
inline constexpr int kDim = 263;
static_assert(1 + 2 + 1 + 63 + 126 + 66 + 4 == kDim);
static_assert(kFootContacts + 4 == kDim);
} // namespace feature_layout

inline constexpr std::array<int, 4> kFootJoints = {7, 10, 8, 11};
inline constexpr double kDefaultFootThreshold = 0.002; // m/frame

struct MotionFeatures {
  Eigen::MatrixXd values; // frames x 263

  [[nodiscard]] Eigen::Index frameCount() const { return values.rows(); }
  [[nodiscard]] Eigen::Index dim() const { return values.cols(); }
};

// Throws DataError when every joint coincides with the root in every frame.
MotionFeatures extractFeatures(const MotionSequence& motion,
                               double footThreshold = kDefaultFootThreshold);

// Rotation about +y that maps the body's forward direction (from hips and
// shoulders) onto +z. Identity if the facing direction is undefined.
Eigen::Matrix3d facingRotation(const Pose& pose);

// Heading angle of the forward direction, atan2(x, z); 0 when undefined.
double headingAngle(const Pose& pose);

} // namespace motioneval
