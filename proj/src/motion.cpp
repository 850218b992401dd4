#include "motioneval/motion.h"

#include "motioneval/errors.h"

#include <cmath>
#include <string>

namespace motioneval {

const std::array<int, kNumJoints> kSmplParents = {
    -1, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 9, 9, 12, 13, 14, 16, 17, 18, 19};

MotionSequence::MotionSequence(std::vector<Pose> frames, double rateHz)
    : frames_(std::move(frames)), rateHz_(rateHz) {
  if (frames_.size() < 2) {
    throw DataError("motion needs at least 2 frames, got " + std::to_string(frames_.size()));
  }
  if (!(rateHz_ > 0.0)) {
    throw DataError("motion sampling rate must be positive");
  }
  for (size_t t = 0; t < frames_.size(); ++t) {
    if (!frames_[t].allFinite()) {
      throw DataError("non-finite joint coordinate in frame " + std::to_string(t));
    }
  }
}

MotionSequence MotionSequence::fromFlat(const std::vector<double>& data, size_t frames,
                                        double rateHz) {
  if (data.size() != frames * kNumJoints * 3) {
    throw ShapeError("flat motion buffer has " + std::to_string(data.size()) +
                     " values, expected " + std::to_string(frames * kNumJoints * 3));
  }
  std::vector<Pose> poses(frames);
  size_t k = 0;
  for (auto& pose : poses) {
    for (int j = 0; j < kNumJoints; ++j) {
      for (int a = 0; a < 3; ++a) {
        pose(j, a) = data[k++];
      }
    }
  }
  return MotionSequence(std::move(poses), rateHz);
}

MotionSequence MotionSequence::clipped(size_t n) const {
  if (n < 2 || n > frames_.size()) {
    throw DataError("cannot clip motion of " + std::to_string(frames_.size()) + " frames to " +
                    std::to_string(n));
  }
  return MotionSequence(std::vector<Pose>(frames_.begin(), frames_.begin() + n), rateHz_);
}

std::vector<double> MotionSequence::flat() const {
  std::vector<double> out;
  out.reserve(frames_.size() * kNumJoints * 3);
  for (const auto& pose : frames_) {
    for (int j = 0; j < kNumJoints; ++j) {
      for (int a = 0; a < 3; ++a) {
        out.push_back(pose(j, a));
      }
    }
  }
  return out;
}

std::vector<Pose> differences(const std::vector<Pose>& signal) {
  std::vector<Pose> out;
  if (signal.size() < 2) {
    return out;
  }
  out.reserve(signal.size() - 1);
  for (size_t t = 0; t + 1 < signal.size(); ++t) {
    out.push_back(signal[t + 1] - signal[t]);
  }
  return out;
}

MotionDerivatives derivatives(const MotionSequence& motion) {
  if (motion.frameCount() < 2) {
    throw DataError("velocity requires at least 2 frames");
  }
  MotionDerivatives d;
  d.velocity = differences(motion.frames());
  d.acceleration = differences(d.velocity);
  return d;
}

MotionDerivatives fullDerivatives(const MotionSequence& motion) {
  if (motion.frameCount() < 3) {
    throw DataError("acceleration requires at least 3 frames, got " +
                    std::to_string(motion.frameCount()));
  }
  return derivatives(motion);
}

} // namespace motioneval
