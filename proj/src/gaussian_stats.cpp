#include "motioneval/gaussian_stats.h"

#include "motioneval/errors.h"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace motioneval {

namespace {

constexpr double kNegativeTolerance = 1e-6;

Eigen::VectorXd clampedEigenvalues(const Eigen::VectorXd& lambda, const char* what) {
  const double scale = lambda.cwiseAbs().maxCoeff();
  Eigen::VectorXd out = lambda;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (out[i] < -kNegativeTolerance * scale) {
      throw NumericalError(std::string(what) + " is not positive semidefinite (eigenvalue " +
                           std::to_string(out[i]) + ")");
    }
    out[i] = std::max(out[i], 0.0);
  }
  return out;
}

} // namespace

GaussianStats gaussianStats(const Eigen::MatrixXd& samples) {
  if (samples.rows() < 2) {
    throw DataError("gaussian stats need at least 2 samples, got " +
                    std::to_string(samples.rows()));
  }
  GaussianStats s;
  s.n = static_cast<size_t>(samples.rows());
  s.mean = samples.colwise().mean().transpose();
  const Eigen::MatrixXd centered = samples.rowwise() - s.mean.transpose();
  s.covariance = (centered.transpose() * centered) / static_cast<double>(samples.rows() - 1);
  return s;
}

GaussianStats gaussianStats(const std::vector<Eigen::VectorXd>& samples) {
  if (samples.empty()) {
    throw DataError("gaussian stats need at least 2 samples, got 0");
  }
  const Eigen::Index d = samples.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(samples.size()), d);
  for (size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].size() != d) {
      throw ShapeError("gaussian stats: samples have differing dimensions");
    }
    m.row(static_cast<Eigen::Index>(i)) = samples[i].transpose();
  }
  return gaussianStats(m);
}

Eigen::MatrixXd psdSqrt(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eigendecomposition failed");
  }
  const Eigen::VectorXd lambda = clampedEigenvalues(es.eigenvalues(), "covariance");
  return es.eigenvectors() * lambda.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

double fid(const GaussianStats& a, const GaussianStats& b, MeanDistance meanDistance) {
  if (a.mean.size() != b.mean.size() || a.covariance.rows() != b.covariance.rows()) {
    throw ShapeError("fid: distributions have different dimensions");
  }
  const Eigen::MatrixXd rootA = psdSqrt(a.covariance);
  psdSqrt(b.covariance); // validates the second covariance
  Eigen::MatrixXd inner = rootA * b.covariance * rootA;
  inner = 0.5 * (inner + inner.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(inner, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericalError("fid: eigendecomposition failed");
  }
  const Eigen::VectorXd lambda = clampedEigenvalues(es.eigenvalues(), "covariance product");
  const double traceSqrt = lambda.cwiseSqrt().sum();
  const double meanDiff = (a.mean - b.mean).squaredNorm();
  const double meanTerm = meanDistance == MeanDistance::Squared ? meanDiff : std::sqrt(meanDiff);
  return meanTerm + a.covariance.trace() + b.covariance.trace() - 2.0 * traceSqrt;
}

} // namespace motioneval
