#pragma once

#include <Eigen/Core>

#include <vector>

namespace motioneval {

// Sample mean and covariance (n - 1 denominator) of an embedding distribution.
struct GaussianStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  size_t n = 0;
};

// Rows of `samples` are observations. Throws DataError for fewer than 2.
GaussianStats gaussianStats(const Eigen::MatrixXd& samples);
GaussianStats gaussianStats(const std::vector<Eigen::VectorXd>& samples);

// How the mean term of FID is measured. Squared is the standard Frechet
// distance; Euclidean uses the unsquared norm |mu1 - mu2|.
enum class MeanDistance { Squared, Euclidean };

// ||mu1 - mu2||^2 + tr(S1 + S2 - 2 (S1 S2)^{1/2}). The trace of the square
// root is taken from the eigenvalues of the symmetric S1^{1/2} S2 S1^{1/2}.
// Eigenvalues below -1e-6 * max|lambda| throw NumericalError; smaller
// negative values are treated as zero.
double fid(const GaussianStats& a, const GaussianStats& b,
           MeanDistance meanDistance = MeanDistance::Squared);

// Symmetric PSD square root. Same clamping / error rule as fid().
Eigen::MatrixXd psdSqrt(const Eigen::MatrixXd& m);

} // namespace motioneval
