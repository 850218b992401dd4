#include "motioneval/regression.h"

#include "motioneval/errors.h"

#include "json.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace motioneval {

namespace {

void checkTrainingData(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) {
    throw ShapeError("regression: " + std::to_string(x.rows()) + " feature rows but " +
                     std::to_string(y.size()) + " targets");
  }
  if (x.rows() < kMinRegressionSamples) {
    throw DataError("regression needs at least " + std::to_string(kMinRegressionSamples) +
                    " samples, got " + std::to_string(x.rows()));
  }
  if (x.cols() == 0 || !x.allFinite() || !y.allFinite()) {
    throw DataError("regression inputs must be non-empty and finite");
  }
}

double rbf(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b, double gamma) {
  return std::exp(-gamma * (a - b).squaredNorm());
}

// libsvm-style SMO over the 2n-variable epsilon-SVR dual:
//   min 0.5 b'Qb + p'b,  sum s_i b_i = 0,  0 <= b_i <= C
// with s = (+1..., -1...), p = (eps - y, eps + y), Q_ij = s_i s_j K(i mod n, j mod n).
// Working pairs use second-order selection; no shrinking.
struct SmoResult {
  Eigen::VectorXd beta;
  double rho = 0.0;
  long iterations = 0;
};

SmoResult solveSvrDual(const Eigen::MatrixXd& K, const Eigen::VectorXd& y, const SvrOptions& o) {
  constexpr double kTau = 1e-12;
  const Eigen::Index n = y.size();
  const Eigen::Index l = 2 * n;
  const double C = o.C;
  std::vector<double> beta(static_cast<size_t>(l), 0.0);
  std::vector<double> G(static_cast<size_t>(l));
  std::vector<int> s(static_cast<size_t>(l));
  for (Eigen::Index i = 0; i < n; ++i) {
    s[static_cast<size_t>(i)] = 1;
    s[static_cast<size_t>(i + n)] = -1;
    G[static_cast<size_t>(i)] = o.epsilon - y[i];
    G[static_cast<size_t>(i + n)] = o.epsilon + y[i];
  }
  auto q = [&](Eigen::Index i, Eigen::Index j) {
    return static_cast<double>(s[static_cast<size_t>(i)] * s[static_cast<size_t>(j)]) * K(i % n, j % n);
  };
  auto upper = [&](Eigen::Index i) { return beta[static_cast<size_t>(i)] >= C; };
  auto lower = [&](Eigen::Index i) { return beta[static_cast<size_t>(i)] <= 0.0; };

  const long cap = o.maxIterations > 0 ? o.maxIterations : std::max<long>(10000000, 100 * l);
  long iter = 0;
  while (true) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmax2 = -std::numeric_limits<double>::infinity();
    Eigen::Index i = -1;
    for (Eigen::Index t = 0; t < l; ++t) {
      const double g = G[static_cast<size_t>(t)];
      if (s[static_cast<size_t>(t)] == 1) {
        if (!upper(t) && -g >= gmax) {
          gmax = -g;
          i = t;
        }
      } else if (!lower(t) && g >= gmax) {
        gmax = g;
        i = t;
      }
    }
    Eigen::Index j = -1;
    double best = std::numeric_limits<double>::infinity();
    if (i >= 0) {
      const double qii = K(i % n, i % n);
      const int si = s[static_cast<size_t>(i)];
      for (Eigen::Index t = 0; t < l; ++t) {
        const double g = G[static_cast<size_t>(t)];
        const double qtt = K(t % n, t % n);
        double gradDiff = 0.0;
        double quad = 0.0;
        if (s[static_cast<size_t>(t)] == 1) {
          if (lower(t)) continue;
          gmax2 = std::max(gmax2, g);
          gradDiff = gmax + g;
          quad = qii + qtt - 2.0 * si * q(i, t);
        } else {
          if (upper(t)) continue;
          gmax2 = std::max(gmax2, -g);
          gradDiff = gmax - g;
          quad = qii + qtt + 2.0 * si * q(i, t);
        }
        if (gradDiff > 0) {
          const double obj = -(gradDiff * gradDiff) / (quad > 0 ? quad : kTau);
          if (obj <= best) {
            best = obj;
            j = t;
          }
        }
      }
    }
    if (i < 0 || j < 0 || gmax + gmax2 < o.tol) {
      break;
    }
    if (++iter > cap) {
      throw TrainingError("SVR did not converge within " + std::to_string(cap) + " iterations");
    }

    const double oldI = beta[static_cast<size_t>(i)];
    const double oldJ = beta[static_cast<size_t>(j)];
    double& ai = beta[static_cast<size_t>(i)];
    double& aj = beta[static_cast<size_t>(j)];
    const double qij = q(i, j);
    const double qii = K(i % n, i % n);
    const double qjj = K(j % n, j % n);
    const double gi = G[static_cast<size_t>(i)];
    const double gj = G[static_cast<size_t>(j)];
    if (s[static_cast<size_t>(i)] != s[static_cast<size_t>(j)]) {
      double quad = qii + qjj + 2.0 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (-gi - gj) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0) {
        if (aj < 0) { aj = 0; ai = diff; }
      } else if (ai < 0) {
        ai = 0;
        aj = -diff;
      }
      if (diff > 0) {
        if (ai > C) { ai = C; aj = C - diff; }
      } else if (aj > C) {
        aj = C;
        ai = C + diff;
      }
    } else {
      double quad = qii + qjj - 2.0 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (gi - gj) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > C) {
        if (ai > C) { ai = C; aj = sum - C; }
      } else if (aj < 0) {
        aj = 0;
        ai = sum;
      }
      if (sum > C) {
        if (aj > C) { aj = C; ai = sum - C; }
      } else if (ai < 0) {
        ai = 0;
        aj = sum;
      }
    }
    const double di = ai - oldI;
    const double dj = aj - oldJ;
    for (Eigen::Index t = 0; t < l; ++t) {
      G[static_cast<size_t>(t)] += q(i, t) * di + q(j, t) * dj;
    }
  }

  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sumFree = 0.0;
  int nFree = 0;
  for (Eigen::Index t = 0; t < l; ++t) {
    const int st = s[static_cast<size_t>(t)];
    const double yg = st * G[static_cast<size_t>(t)];
    if (upper(t)) {
      if (st == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (st == 1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++nFree;
      sumFree += yg;
    }
  }
  SmoResult r;
  r.rho = nFree > 0 ? sumFree / nFree : (ub + lb) / 2.0;
  r.beta = Eigen::Map<Eigen::VectorXd>(beta.data(), l);
  r.iterations = iter;
  return r;
}

} // namespace

RegressionKind parseRegressionKind(const std::string& s) {
  if (s == "svr") return RegressionKind::RbfSvr;
  if (s == "ridge") return RegressionKind::LinearRidge;
  throw ConfigError("unknown regression head '" + s + "' (expected svr or ridge)");
}

std::string toString(RegressionKind k) {
  return k == RegressionKind::RbfSvr ? "svr" : "ridge";
}

StandardScaler StandardScaler::fit(const Eigen::MatrixXd& x) {
  StandardScaler s;
  s.mean = x.colwise().mean();
  s.scale = ((x.rowwise() - s.mean).array().square().colwise().mean()).sqrt();
  for (Eigen::Index i = 0; i < s.scale.size(); ++i) {
    if (s.scale[i] == 0.0) s.scale[i] = 1.0;
  }
  return s;
}

Eigen::MatrixXd StandardScaler::transform(const Eigen::MatrixXd& x) const {
  if (x.cols() != mean.size()) {
    throw ShapeError("scaler expects " + std::to_string(mean.size()) + " features");
  }
  return (x.rowwise() - mean).array().rowwise() / scale.array();
}

double scaleGamma(const Eigen::MatrixXd& x) {
  const double mean = x.mean();
  const double var = (x.array() - mean).square().mean();
  return var > 0.0 ? 1.0 / (static_cast<double>(x.cols()) * var) : 1.0;
}

RegressionHead RegressionHead::fitSvr(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                      const SvrOptions& options) {
  checkTrainingData(x, y);
  if (!(options.C > 0) || !(options.epsilon >= 0) || !(options.tol > 0)) {
    throw ConfigError("SVR needs C > 0, epsilon >= 0, tol > 0");
  }
  RegressionHead h;
  h.kind_ = RegressionKind::RbfSvr;
  h.gamma_ = options.gamma.value_or(scaleGamma(x));
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      K(i, j) = K(j, i) = rbf(x.row(i), x.row(j), h.gamma_);
    }
  }
  const SmoResult r = solveSvrDual(K, y, options);
  std::vector<Eigen::Index> support;
  std::vector<double> coef;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double c = r.beta[i] - r.beta[i + n];
    if (c != 0.0) {
      support.push_back(i);
      coef.push_back(c);
    }
  }
  h.supportVectors_.resize(static_cast<Eigen::Index>(support.size()), x.cols());
  h.coef_.resize(static_cast<Eigen::Index>(support.size()));
  for (size_t k = 0; k < support.size(); ++k) {
    h.supportVectors_.row(static_cast<Eigen::Index>(k)) = x.row(support[k]);
    h.coef_[static_cast<Eigen::Index>(k)] = coef[k];
  }
  h.intercept_ = -r.rho;
  h.iterations_ = r.iterations;
  // Keeps the input width even when there are no support vectors.
  h.scaler_.mean = Eigen::RowVectorXd::Zero(x.cols());
  h.scaler_.scale = Eigen::RowVectorXd::Ones(x.cols());
  return h;
}

RegressionHead RegressionHead::fitRidge(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                        const RidgeOptions& options) {
  checkTrainingData(x, y);
  if (!(options.alpha > 0)) {
    throw ConfigError("ridge alpha must be positive");
  }
  RegressionHead h;
  h.kind_ = RegressionKind::LinearRidge;
  h.scaler_ = StandardScaler::fit(x);
  const Eigen::MatrixXd z = h.scaler_.transform(x);
  const double ym = y.mean();
  Eigen::MatrixXd a = z.transpose() * z;
  a.diagonal().array() += options.alpha;
  h.coef_ = a.ldlt().solve(z.transpose() * (y.array() - ym).matrix());
  h.intercept_ = ym;
  return h;
}

RegressionHead RegressionHead::fit(RegressionKind kind, const Eigen::MatrixXd& x,
                                   const Eigen::VectorXd& y) {
  return kind == RegressionKind::RbfSvr ? fitSvr(x, y) : fitRidge(x, y);
}

Eigen::Index RegressionHead::inputDim() const {
  return scaler_.mean.size();
}

double RegressionHead::predict(const Eigen::VectorXd& features) const {
  if (features.size() != inputDim()) {
    throw ShapeError("regression head expects " + std::to_string(inputDim()) + " features, got " +
                     std::to_string(features.size()));
  }
  if (kind_ == RegressionKind::LinearRidge) {
    const Eigen::RowVectorXd z =
        (features.transpose() - scaler_.mean).array() / scaler_.scale.array();
    return z.dot(coef_.transpose()) + intercept_;
  }
  double f = intercept_;
  for (Eigen::Index k = 0; k < coef_.size(); ++k) {
    f += coef_[k] * rbf(supportVectors_.row(k), features.transpose(), gamma_);
  }
  return f;
}

Eigen::VectorXd RegressionHead::predict(const Eigen::MatrixXd& x) const {
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out[i] = predict(Eigen::VectorXd(x.row(i).transpose()));
  }
  return out;
}

namespace {

std::vector<double> toVec(const Eigen::MatrixXd& m) {
  std::vector<double> v;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) v.push_back(m(r, c));
  return v;
}

Eigen::MatrixXd toMat(const std::vector<double>& v, Eigen::Index rows, Eigen::Index cols) {
  if (static_cast<Eigen::Index>(v.size()) != rows * cols) {
    throw FormatError("regression head JSON: array size mismatch");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0, k = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = v[static_cast<size_t>(k++)];
  return m;
}

} // namespace

std::string RegressionHead::toJson() const {
  nlohmann::json j;
  j["kind"] = toString(kind_);
  j["input_dim"] = inputDim();
  j["intercept"] = intercept_;
  j["coef"] = toVec(coef_);
  if (kind_ == RegressionKind::RbfSvr) {
    j["gamma"] = gamma_;
    j["support_vectors"] = toVec(supportVectors_);
  } else {
    j["scaler_mean"] = toVec(scaler_.mean);
    j["scaler_scale"] = toVec(scaler_.scale);
  }
  return j.dump(1);
}

RegressionHead RegressionHead::fromJson(const std::string& json) {
  RegressionHead h;
  try {
    const auto j = nlohmann::json::parse(json);
    h.kind_ = parseRegressionKind(j.at("kind").get<std::string>());
    const auto dim = j.at("input_dim").get<Eigen::Index>();
    h.intercept_ = j.at("intercept").get<double>();
    const auto coef = j.at("coef").get<std::vector<double>>();
    h.coef_ = toMat(coef, static_cast<Eigen::Index>(coef.size()), 1);
    if (h.kind_ == RegressionKind::RbfSvr) {
      h.gamma_ = j.at("gamma").get<double>();
      h.supportVectors_ = toMat(j.at("support_vectors").get<std::vector<double>>(), h.coef_.size(), dim);
      h.scaler_.mean = Eigen::RowVectorXd::Zero(dim);
      h.scaler_.scale = Eigen::RowVectorXd::Ones(dim);
    } else {
      h.scaler_.mean = toMat(j.at("scaler_mean").get<std::vector<double>>(), 1, dim);
      h.scaler_.scale = toMat(j.at("scaler_scale").get<std::vector<double>>(), 1, dim);
      if (h.coef_.size() != dim) {
        throw FormatError("ridge head JSON: coefficient count does not match input_dim");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("regression head JSON: ") + e.what());
  }
  return h;
}

void RegressionHead::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) {
    throw DataError("cannot write " + path.string());
  }
  out << toJson() << '\n';
}

RegressionHead RegressionHead::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open regression head " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return fromJson(ss.str());
}

} // namespace motioneval
