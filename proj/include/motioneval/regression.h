#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <optional>
#include <string>

namespace motioneval {

enum class RegressionKind { RbfSvr, LinearRidge };

RegressionKind parseRegressionKind(const std::string& s);
std::string toString(RegressionKind k);

struct SvrOptions {
  double C = 3.68;
  double epsilon = 0.3;
  double tol = 1e-8;
  // Defaults to 1 / (n_features * var(X)) over all entries, or 1 if X is constant.
  std::optional<double> gamma;
  // <= 0 picks max(1e7, 100 * 2n).
  long maxIterations = 0;
};

struct RidgeOptions {
  double alpha = 0.12;
};

// Minimum number of training rows for either head.
inline constexpr int kMinRegressionSamples = 10;

// Standardization with population std; zero-variance columns keep scale 1.
struct StandardScaler {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;

  static StandardScaler fit(const Eigen::MatrixXd& x);
  [[nodiscard]] Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const;
};

double scaleGamma(const Eigen::MatrixXd& x);

class RegressionHead {
 public:
  // Rows of x are samples. Throws DataError for fewer than 10 samples or
  // mismatched sizes, TrainingError if the SVR hits its iteration cap.
  static RegressionHead fitSvr(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                               const SvrOptions& options = {});
  static RegressionHead fitRidge(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                 const RidgeOptions& options = {});
  static RegressionHead fit(RegressionKind kind, const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

  [[nodiscard]] RegressionKind kind() const { return kind_; }
  [[nodiscard]] Eigen::Index inputDim() const;
  [[nodiscard]] double predict(const Eigen::VectorXd& features) const;
  [[nodiscard]] Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;

  // SVR internals, exposed for inspection.
  [[nodiscard]] double gamma() const { return gamma_; }
  [[nodiscard]] double intercept() const { return intercept_; }
  [[nodiscard]] const Eigen::MatrixXd& supportVectors() const { return supportVectors_; }
  [[nodiscard]] const Eigen::VectorXd& coefficients() const { return coef_; }
  [[nodiscard]] long iterations() const { return iterations_; }
  [[nodiscard]] const StandardScaler& scaler() const { return scaler_; }

  [[nodiscard]] std::string toJson() const;
  static RegressionHead fromJson(const std::string& json);
  void save(const std::filesystem::path& path) const;
  static RegressionHead load(const std::filesystem::path& path);

 private:
  RegressionKind kind_ = RegressionKind::LinearRidge;
  // SVR: support vectors (rows) with dual coefficients; ridge: weights over
  // standardized features.
  Eigen::MatrixXd supportVectors_;
  Eigen::VectorXd coef_;
  double intercept_ = 0.0;
  double gamma_ = 0.0;
  long iterations_ = 0;
  StandardScaler scaler_;
};

} // namespace motioneval
