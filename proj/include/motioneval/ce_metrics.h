#pragma once

#include "motioneval/motion.h"

#include <string>
#include <vector>

namespace motioneval {

enum class CeKind { AE, AVE };
enum class CeComponent { Position, Velocity, Acceleration, PV, PVA };
enum class JointGrouping { Root, Joint, Pose };

std::string toString(CeKind kind);
std::string toString(CeComponent component);
std::string toString(JointGrouping grouping);
CeKind parseCeKind(const std::string& s);
CeComponent parseCeComponent(const std::string& s);
JointGrouping parseJointGrouping(const std::string& s);

// Root = {0}, Joint = {1..21}, Pose = {0..21}.
std::vector<int> groupJoints(JointGrouping grouping);

// Multipliers for the position, velocity and acceleration terms of PV / PVA.
struct ComponentWeights {
  double position = 1.0;
  double velocity = 1.0;
  double acceleration = 1.0;
};

struct CeConfig {
  CeKind kind = CeKind::AE;
  CeComponent component = CeComponent::Position;
  JointGrouping grouping = JointGrouping::Pose;
  // Multiplies the root translation term of every grouped joint's position.
  double rootScale = 1.0;
  ComponentWeights weights;

  // e.g. "Root_AE_Position"
  [[nodiscard]] std::string name() const;
};

// Component signal of the grouped joints after root scaling: each joint
// position is rootScale * root + (joint - root), then differenced 0, 1 or 2
// times. Joints outside the grouping are left unscaled.
std::vector<Pose> componentSignal(const MotionSequence& motion, CeComponent component,
                                  JointGrouping grouping, double rootScale);

// Mean per-frame, per-joint L2 error over the grouping. Motions are clipped
// to the shorter length first. CeConfig::kind is ignored; PV / PVA forward
// to combinedCe with the AE kind.
double averageError(const MotionSequence& ref, const MotionSequence& gen, const CeConfig& cfg);

// Mean over grouped joints of the L2 norm of the difference between per-axis
// sample variances (T - 1 denominator). PV / PVA forward to combinedCe.
double averageVarianceError(const MotionSequence& ref, const MotionSequence& gen,
                            const CeConfig& cfg);

// w_p * CE_pos + w_v * CE_vel (+ w_a * CE_acc for PVA). Throws ConfigError for
// non-positive weights, a non-default acceleration weight under PV, or a
// single-component config.
double combinedCe(const MotionSequence& ref, const MotionSequence& gen, const CeConfig& cfg);

// Dispatches on cfg.kind and cfg.component.
double ceScore(const MotionSequence& ref, const MotionSequence& gen, const CeConfig& cfg);

} // namespace motioneval
