#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <vector>

namespace motioneval {

inline constexpr int kNumJoints = 22;
inline constexpr int kRootJoint = 0;
inline constexpr double kDefaultRateHz = 20.0;

using Vec3 = Eigen::Vector3d;

// Per-frame joint coordinates, 22 rows (joints) by 3 columns (x, y, z).
using Pose = Eigen::Matrix<double, kNumJoints, 3>;

// Global joint coordinates (meters) of a 22 joint SMPL skeleton, y up.
//
// Invariants: at least two frames, all coordinates finite. Joint 0 is the
// root (pelvis). Construction validates and throws DataError on violation.
class MotionSequence {
 public:
  explicit MotionSequence(std::vector<Pose> frames, double rateHz = kDefaultRateHz);

  // Builds from a flat row-major (T, 22, 3) buffer.
  static MotionSequence fromFlat(const std::vector<double>& data, size_t frames,
                                 double rateHz = kDefaultRateHz);

  [[nodiscard]] size_t frameCount() const { return frames_.size(); }
  [[nodiscard]] double rateHz() const { return rateHz_; }
  [[nodiscard]] const Pose& frame(size_t t) const { return frames_[t]; }
  [[nodiscard]] const std::vector<Pose>& frames() const { return frames_; }
  [[nodiscard]] Vec3 joint(size_t t, int j) const { return frames_[t].row(j).transpose(); }

  // First n frames; n must be in [2, frameCount()].
  [[nodiscard]] MotionSequence clipped(size_t n) const;

  // Flat row-major (T, 22, 3) copy.
  [[nodiscard]] std::vector<double> flat() const;

 private:
  std::vector<Pose> frames_;
  double rateHz_ = kDefaultRateHz;
};

// Frame-wise finite differences of a joint signal.
struct MotionDerivatives {
  std::vector<Pose> velocity;     // (T-1) frames, m/frame
  std::vector<Pose> acceleration; // (T-2) frames, m/frame^2
};

// Forward differences of an arbitrary per-frame signal.
std::vector<Pose> differences(const std::vector<Pose>& signal);

// Velocity always; acceleration only when T >= 3 (empty otherwise).
// Throws DataError when T < 2.
MotionDerivatives derivatives(const MotionSequence& motion);

// Same as derivatives() but requires T >= 3 so both are populated.
MotionDerivatives fullDerivatives(const MotionSequence& motion);

// SMPL 22-joint kinematic tree (parent of each joint, -1 for the root).
extern const std::array<int, kNumJoints> kSmplParents;

} // namespace motioneval
