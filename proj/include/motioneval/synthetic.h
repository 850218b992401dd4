#pragma once

#include "motioneval/motion.h"
#include "motioneval/rng.h"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

// Procedural walking clips for tests and the bundled training demo. A clip
// walks in a direction relative to the body's facing, and the whole clip is
// rotated to a random world heading, so the direction is only recoverable
// after facing canonicalization.
namespace motioneval::synthetic {

inline constexpr std::array<const char*, 8> kDirectionNames = {
    "forward",       "forward and to the left",   "to the left",  "backward and to the left",
    "backward",      "backward and to the right", "to the right", "forward and to the right",
};

struct WalkOptions {
  int frames = 60;
  double rateHz = kDefaultRateHz;
  double speed = 1.0;       // m/s
  double speedJitter = 0.1; // relative, uniform
  double noise = 0.003;     // per-coordinate Gaussian, m
  bool randomFacing = true;
};

struct WalkSample {
  MotionSequence motion;
  std::string text;
  int label = 0;
};

// SMPL-like rest pose at the origin, facing +z, left side on +x.
Pose restPose();

// One walking clip. relativeAngle is measured from the body's forward axis
// toward its left side (radians); facingYaw rotates the whole clip about +y.
MotionSequence walk(double relativeAngle, double facingYaw, const WalkOptions& options, Rng& rng);

// "a person walks <direction>" over the eight compass directions relative to
// the body, samplesPerClass clips each, interleaved by class.
std::vector<WalkSample> directionTask(int samplesPerClass, uint64_t seed,
                                      const WalkOptions& options = {});

// `classes` evenly spaced relative directions with text "a person walks on
// bearing <k>"; used where each class needs a distinct caption.
std::vector<WalkSample> bearingTask(int classes, int samplesPerClass, uint64_t seed,
                                    const WalkOptions& options = {});

} // namespace motioneval::synthetic
