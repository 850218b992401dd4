#include "motioneval/ce_metrics.h"

#include "motioneval/errors.h"

#include <algorithm>
#include <cmath>

namespace motioneval {

namespace {

bool isCombined(CeComponent c) {
  return c == CeComponent::PV || c == CeComponent::PVA;
}

int differenceOrder(CeComponent c) {
  switch (c) {
    case CeComponent::Position:
      return 0;
    case CeComponent::Velocity:
      return 1;
    case CeComponent::Acceleration:
      return 2;
    default:
      throw ConfigError("combined component has no single difference order");
  }
}

void checkScale(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw ConfigError("root scale must be positive and finite");
  }
}

// Clips to the shorter motion and returns both component signals.
std::pair<std::vector<Pose>, std::vector<Pose>> clippedSignals(const MotionSequence& ref,
                                                               const MotionSequence& gen,
                                                               const CeConfig& cfg,
                                                               size_t minLength) {
  checkScale(cfg.rootScale);
  const size_t n = std::min(ref.frameCount(), gen.frameCount());
  const MotionSequence r = ref.frameCount() == n ? ref : ref.clipped(n);
  const MotionSequence g = gen.frameCount() == n ? gen : gen.clipped(n);
  auto a = componentSignal(r, cfg.component, cfg.grouping, cfg.rootScale);
  auto b = componentSignal(g, cfg.component, cfg.grouping, cfg.rootScale);
  if (a.size() < minLength) {
    throw DataError(toString(cfg.component) + " signal has " + std::to_string(a.size()) +
                    " frames after clipping to " + std::to_string(n) + ", need " +
                    std::to_string(minLength));
  }
  return {std::move(a), std::move(b)};
}

Vec3 sampleVariance(const std::vector<Pose>& signal, int joint) {
  const double n = static_cast<double>(signal.size());
  Vec3 mean = Vec3::Zero();
  for (const auto& p : signal) {
    mean += p.row(joint).transpose();
  }
  mean /= n;
  Vec3 var = Vec3::Zero();
  for (const auto& p : signal) {
    const Vec3 d = p.row(joint).transpose() - mean;
    var += d.cwiseProduct(d);
  }
  return var / (n - 1.0);
}

} // namespace

std::string toString(CeKind kind) {
  return kind == CeKind::AE ? "AE" : "AVE";
}

std::string toString(CeComponent component) {
  switch (component) {
    case CeComponent::Position:
      return "Position";
    case CeComponent::Velocity:
      return "Velocity";
    case CeComponent::Acceleration:
      return "Acceleration";
    case CeComponent::PV:
      return "PV";
    case CeComponent::PVA:
      return "PVA";
  }
  return "?";
}

std::string toString(JointGrouping grouping) {
  switch (grouping) {
    case JointGrouping::Root:
      return "Root";
    case JointGrouping::Joint:
      return "Joint";
    case JointGrouping::Pose:
      return "Pose";
  }
  return "?";
}

CeKind parseCeKind(const std::string& s) {
  if (s == "AE") {
    return CeKind::AE;
  }
  if (s == "AVE") {
    return CeKind::AVE;
  }
  throw ConfigError("unknown CE kind '" + s + "' (AE, AVE)");
}

CeComponent parseCeComponent(const std::string& s) {
  for (auto c : {CeComponent::Position, CeComponent::Velocity, CeComponent::Acceleration,
                 CeComponent::PV, CeComponent::PVA}) {
    if (toString(c) == s) {
      return c;
    }
  }
  throw ConfigError("unknown CE component '" + s + "' (Position, Velocity, Acceleration, PV, PVA)");
}

JointGrouping parseJointGrouping(const std::string& s) {
  for (auto g : {JointGrouping::Root, JointGrouping::Joint, JointGrouping::Pose}) {
    if (toString(g) == s) {
      return g;
    }
  }
  throw ConfigError("unknown joint grouping '" + s + "' (Root, Joint, Pose)");
}

std::string CeConfig::name() const {
  return toString(grouping) + "_" + toString(kind) + "_" + toString(component);
}

std::vector<int> groupJoints(JointGrouping grouping) {
  std::vector<int> out;
  const int first = grouping == JointGrouping::Joint ? 1 : 0;
  const int last = grouping == JointGrouping::Root ? 0 : kNumJoints - 1;
  for (int j = first; j <= last; ++j) {
    out.push_back(j);
  }
  return out;
}

std::vector<Pose> componentSignal(const MotionSequence& motion, CeComponent component,
                                  JointGrouping grouping, double rootScale) {
  const auto joints = groupJoints(grouping);
  std::vector<Pose> signal = motion.frames();
  if (rootScale != 1.0) {
    for (auto& pose : signal) {
      const Eigen::RowVector3d root = pose.row(kRootJoint);
      for (int j : joints) {
        pose.row(j) = rootScale * root + (pose.row(j) - root);
      }
    }
  }
  for (int k = differenceOrder(component); k > 0; --k) {
    signal = differences(signal);
  }
  return signal;
}

double averageError(const MotionSequence& ref, const MotionSequence& gen, const CeConfig& cfg) {
  if (isCombined(cfg.component)) {
    CeConfig c = cfg;
    c.kind = CeKind::AE;
    return combinedCe(ref, gen, c);
  }
  const auto [a, b] = clippedSignals(ref, gen, cfg, 1);
  const auto joints = groupJoints(cfg.grouping);
  double total = 0.0;
  for (int j : joints) {
    for (size_t t = 0; t < a.size(); ++t) {
      total += (a[t].row(j) - b[t].row(j)).norm();
    }
  }
  return total / (static_cast<double>(joints.size()) * static_cast<double>(a.size()));
}

double averageVarianceError(const MotionSequence& ref, const MotionSequence& gen,
                            const CeConfig& cfg) {
  if (isCombined(cfg.component)) {
    CeConfig c = cfg;
    c.kind = CeKind::AVE;
    return combinedCe(ref, gen, c);
  }
  const auto [a, b] = clippedSignals(ref, gen, cfg, 2);
  const auto joints = groupJoints(cfg.grouping);
  double total = 0.0;
  for (int j : joints) {
    total += (sampleVariance(a, j) - sampleVariance(b, j)).norm();
  }
  return total / static_cast<double>(joints.size());
}

double combinedCe(const MotionSequence& ref, const MotionSequence& gen, const CeConfig& cfg) {
  if (!isCombined(cfg.component)) {
    throw ConfigError("combinedCe requires the PV or PVA component");
  }
  const auto& w = cfg.weights;
  if (!(w.position > 0.0) || !(w.velocity > 0.0) || !(w.acceleration > 0.0)) {
    throw ConfigError("component weights must be positive");
  }
  if (cfg.component == CeComponent::PV && w.acceleration != ComponentWeights{}.acceleration) {
    throw ConfigError("acceleration weight is only meaningful for PVA");
  }
  const auto single = [&](CeComponent c) {
    CeConfig s = cfg;
    s.component = c;
    return cfg.kind == CeKind::AE ? averageError(ref, gen, s) : averageVarianceError(ref, gen, s);
  };
  double score = w.position * single(CeComponent::Position) +
                 w.velocity * single(CeComponent::Velocity);
  if (cfg.component == CeComponent::PVA) {
    score += w.acceleration * single(CeComponent::Acceleration);
  }
  return score;
}

double ceScore(const MotionSequence& ref, const MotionSequence& gen, const CeConfig& cfg) {
  if (isCombined(cfg.component)) {
    return combinedCe(ref, gen, cfg);
  }
  return cfg.kind == CeKind::AE ? averageError(ref, gen, cfg) : averageVarianceError(ref, gen, cfg);
}

} // namespace motioneval
