#include "motioneval/autograd.h"

#include "motioneval/errors.h"
#include "motioneval/mobert_loss.h"

#include <cmath>
#include <limits>
#include <string>

namespace motioneval::ag {

const Matrix& Var::value() const {
  return tape_->value(id_);
}

Var Tape::constant(Matrix value) {
  Node n;
  n.owned = std::move(value);
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::parameter(const Matrix& storage, int key) {
  if (auto it = parameterLeaves_.find(key); it != parameterLeaves_.end()) {
    return Var(this, it->second);
  }
  Node n;
  n.external = &storage;
  n.needsGrad = true;
  nodes_.push_back(std::move(n));
  const int id = static_cast<int>(nodes_.size()) - 1;
  parameterLeaves_.emplace(key, id);
  return Var(this, id);
}

Var Tape::record(Matrix value, std::span<const Var> inputs,
                 std::function<void(const Matrix&)> backward) {
  Node n;
  n.owned = std::move(value);
  for (const auto& in : inputs) {
    if (nodes_[in.id()].needsGrad) {
      n.needsGrad = true;
      break;
    }
  }
  if (n.needsGrad) {
    n.backward = std::move(backward);
  }
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

void Tape::accumulate(const Var& v, const Matrix& g) {
  Node& n = nodes_[v.id()];
  if (!n.needsGrad) {
    return;
  }
  if (n.grad.size() == 0) {
    n.grad = g;
  } else {
    n.grad += g;
  }
}

const Matrix& Tape::value(int id) const {
  const Node& n = nodes_[id];
  return n.external != nullptr ? *n.external : n.owned;
}

void Tape::backward(const Var& loss) {
  if (loss.rows() != 1 || loss.cols() != 1) {
    throw ShapeError("backward() needs a scalar (1x1) loss");
  }
  accumulate(loss, Matrix::Ones(1, 1));
  for (int i = loss.id(); i >= 0; --i) {
    Node& n = nodes_[i];
    if (n.backward && n.grad.size() != 0) {
      n.backward(n.grad);
    }
  }
}

const Matrix* Tape::gradient(int key) const {
  auto it = parameterLeaves_.find(key);
  if (it == parameterLeaves_.end()) {
    return nullptr;
  }
  const Node& n = nodes_[it->second];
  return n.grad.size() == 0 ? nullptr : &n.grad;
}

namespace {

void requireSameShape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shape mismatch (" + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()) + ")");
  }
}

constexpr double kSeluLambda = 1.0507009873554804934193349852946;
constexpr double kSeluAlpha = 1.6732632423543772848170429916717;

} // namespace

Var matmul(const Var& a, const Var& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimensions differ");
  }
  Tape& t = a.tape();
  const Var in[] = {a, b};
  return t.record(a.value() * b.value(), in, [a, b](const Matrix& g) {
    Tape& tp = a.tape();
    if (tp.needsGrad(a)) {
      tp.accumulate(a, g * b.value().transpose());
    }
    if (tp.needsGrad(b)) {
      tp.accumulate(b, a.value().transpose() * g);
    }
  });
}

Var matmulTransB(const Var& a, const Var& b) {
  if (a.cols() != b.cols()) {
    throw ShapeError("matmulTransB: inner dimensions differ");
  }
  Tape& t = a.tape();
  const Var in[] = {a, b};
  return t.record(a.value() * b.value().transpose(), in, [a, b](const Matrix& g) {
    Tape& tp = a.tape();
    if (tp.needsGrad(a)) {
      tp.accumulate(a, g * b.value());
    }
    if (tp.needsGrad(b)) {
      tp.accumulate(b, g.transpose() * a.value());
    }
  });
}

Var linear(const Var& x, const Var& weight, const Var& bias) {
  if (x.cols() != weight.cols() || bias.rows() != 1 || bias.cols() != weight.rows()) {
    throw ShapeError("linear: input width " + std::to_string(x.cols()) +
                     " does not match weight " + std::to_string(weight.rows()) + "x" +
                     std::to_string(weight.cols()));
  }
  Tape& t = x.tape();
  Matrix y = x.value() * weight.value().transpose();
  y.rowwise() += bias.value().row(0);
  const Var in[] = {x, weight, bias};
  return t.record(std::move(y), in, [x, weight, bias](const Matrix& g) {
    Tape& tp = x.tape();
    if (tp.needsGrad(x)) {
      tp.accumulate(x, g * weight.value());
    }
    if (tp.needsGrad(weight)) {
      tp.accumulate(weight, g.transpose() * x.value());
    }
    if (tp.needsGrad(bias)) {
      tp.accumulate(bias, g.colwise().sum());
    }
  });
}

Var add(const Var& a, const Var& b) {
  requireSameShape(a.value(), b.value(), "add");
  const Var in[] = {a, b};
  return a.tape().record(a.value() + b.value(), in, [a, b](const Matrix& g) {
    a.tape().accumulate(a, g);
    b.tape().accumulate(b, g);
  });
}

Var scale(const Var& a, double s) {
  const Var in[] = {a};
  return a.tape().record(a.value() * s, in,
                         [a, s](const Matrix& g) { a.tape().accumulate(a, g * s); });
}

Var selu(const Var& x) {
  const Matrix& v = x.value();
  Matrix y = v.unaryExpr([](double z) {
    return z > 0 ? kSeluLambda * z : kSeluLambda * kSeluAlpha * std::expm1(z);
  });
  const Var in[] = {x};
  return x.tape().record(std::move(y), in, [x](const Matrix& g) {
    const Matrix d = x.value().unaryExpr(
        [](double z) { return z > 0 ? kSeluLambda : kSeluLambda * kSeluAlpha * std::exp(z); });
    x.tape().accumulate(x, g.cwiseProduct(d));
  });
}

Var relu(const Var& x) {
  const Var in[] = {x};
  return x.tape().record(x.value().cwiseMax(0.0), in, [x](const Matrix& g) {
    const Matrix d = (x.value().array() > 0.0).cast<double>().matrix();
    x.tape().accumulate(x, g.cwiseProduct(d));
  });
}

Var dropout(const Var& x, double p, Rng& rng) {
  if (p <= 0.0) {
    return x;
  }
  Matrix mask(x.rows(), x.cols());
  const double keep = 1.0 / (1.0 - p);
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = rng.uniform() < p ? 0.0 : keep;
  }
  Matrix y = x.value().cwiseProduct(mask);
  const Var in[] = {x};
  return x.tape().record(std::move(y), in, [x, mask = std::move(mask)](const Matrix& g) {
    x.tape().accumulate(x, g.cwiseProduct(mask));
  });
}

Var groupNorm(const Var& x, int groups, const Var& gamma, const Var& beta, double eps) {
  const Eigen::Index rows = x.rows();
  const Eigen::Index channels = x.cols();
  if (groups <= 0 || channels % groups != 0) {
    throw ShapeError("groupNorm: " + std::to_string(groups) + " groups do not divide " +
                     std::to_string(channels) + " channels");
  }
  if (gamma.cols() != channels || beta.cols() != channels) {
    throw ShapeError("groupNorm: affine parameters do not match channel count");
  }
  const Eigen::Index width = channels / groups;
  Matrix normalized(rows, channels);
  Matrix invStd(rows, groups);
  const Matrix& v = x.value();
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (int g = 0; g < groups; ++g) {
      const auto seg = v.block(r, g * width, 1, width);
      const double mean = seg.mean();
      const double var = (seg.array() - mean).square().mean();
      const double is = 1.0 / std::sqrt(var + eps);
      invStd(r, g) = is;
      normalized.block(r, g * width, 1, width) = (seg.array() - mean) * is;
    }
  }
  Matrix y = normalized.array().rowwise() * gamma.value().row(0).array();
  y.rowwise() += beta.value().row(0);
  const Var in[] = {x, gamma, beta};
  return x.tape().record(
      std::move(y), in,
      [x, gamma, beta, groups, width, normalized = std::move(normalized),
       invStd = std::move(invStd)](const Matrix& g) {
        Tape& tp = x.tape();
        if (tp.needsGrad(gamma)) {
          tp.accumulate(gamma, g.cwiseProduct(normalized).colwise().sum());
        }
        if (tp.needsGrad(beta)) {
          tp.accumulate(beta, g.colwise().sum());
        }
        if (!tp.needsGrad(x)) {
          return;
        }
        const Matrix dn = g.array().rowwise() * gamma.value().row(0).array();
        Matrix dx(g.rows(), g.cols());
        const double n = static_cast<double>(width);
        for (Eigen::Index r = 0; r < g.rows(); ++r) {
          for (int k = 0; k < groups; ++k) {
            const auto d = dn.block(r, k * width, 1, width).array();
            const auto xh = normalized.block(r, k * width, 1, width).array();
            const double sumD = d.sum();
            const double sumDX = (d * xh).sum();
            dx.block(r, k * width, 1, width) =
                ((n * d - sumD - xh * sumDX) * (invStd(r, k) / n)).matrix();
          }
        }
        tp.accumulate(x, dx);
      });
}

Var gatherRows(const Var& table, std::span<const int> ids) {
  Matrix y(static_cast<Eigen::Index>(ids.size()), table.cols());
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= table.rows()) {
      throw ShapeError("gatherRows: index " + std::to_string(ids[i]) + " out of range " +
                       std::to_string(table.rows()));
    }
    y.row(static_cast<Eigen::Index>(i)) = table.value().row(ids[i]);
  }
  const Var in[] = {table};
  return table.tape().record(std::move(y), in,
                             [table, idx = std::vector<int>(ids.begin(), ids.end())](
                                 const Matrix& g) {
                               Matrix dt = Matrix::Zero(table.rows(), table.cols());
                               for (size_t i = 0; i < idx.size(); ++i) {
                                 dt.row(idx[i]) += g.row(static_cast<Eigen::Index>(i));
                               }
                               table.tape().accumulate(table, dt);
                             });
}

Var gatherFlatten(const Var& x, const std::vector<std::vector<int>>& windows) {
  if (windows.empty()) {
    throw ShapeError("gatherFlatten: no windows");
  }
  const Eigen::Index d = x.cols();
  const auto len = static_cast<Eigen::Index>(windows.front().size());
  Matrix y(static_cast<Eigen::Index>(windows.size()), len * d);
  for (size_t c = 0; c < windows.size(); ++c) {
    if (static_cast<Eigen::Index>(windows[c].size()) != len) {
      throw ShapeError("gatherFlatten: windows differ in length");
    }
    for (Eigen::Index k = 0; k < len; ++k) {
      const int src = windows[c][static_cast<size_t>(k)];
      if (src < 0 || src >= x.rows()) {
        throw ShapeError("gatherFlatten: frame index out of range");
      }
      y.block(static_cast<Eigen::Index>(c), k * d, 1, d) = x.value().row(src);
    }
  }
  const Var in[] = {x};
  return x.tape().record(std::move(y), in, [x, windows, d, len](const Matrix& g) {
    Matrix dx = Matrix::Zero(x.rows(), x.cols());
    for (size_t c = 0; c < windows.size(); ++c) {
      for (Eigen::Index k = 0; k < len; ++k) {
        dx.row(windows[c][static_cast<size_t>(k)]) +=
            g.block(static_cast<Eigen::Index>(c), k * d, 1, d);
      }
    }
    x.tape().accumulate(x, dx);
  });
}

Var sliceCols(const Var& x, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > x.cols()) {
    throw ShapeError("sliceCols: range out of bounds");
  }
  const Var in[] = {x};
  return x.tape().record(x.value().middleCols(start, count), in,
                         [x, start, count](const Matrix& g) {
                           Matrix dx = Matrix::Zero(x.rows(), x.cols());
                           dx.middleCols(start, count) = g;
                           x.tape().accumulate(x, dx);
                         });
}

Var concatCols(std::span<const Var> parts) {
  if (parts.empty()) {
    throw ShapeError("concatCols: nothing to concatenate");
  }
  const Eigen::Index rows = parts.front().rows();
  Eigen::Index cols = 0;
  for (const auto& p : parts) {
    if (p.rows() != rows) {
      throw ShapeError("concatCols: row counts differ");
    }
    cols += p.cols();
  }
  Matrix y(rows, cols);
  std::vector<Eigen::Index> offsets;
  Eigen::Index off = 0;
  for (const auto& p : parts) {
    offsets.push_back(off);
    y.middleCols(off, p.cols()) = p.value();
    off += p.cols();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return parts.front().tape().record(std::move(y), parts,
                                     [inputs, offsets](const Matrix& g) {
                                       for (size_t i = 0; i < inputs.size(); ++i) {
                                         inputs[i].tape().accumulate(
                                             inputs[i], g.middleCols(offsets[i], inputs[i].cols()));
                                       }
                                     });
}

Var concatRows(std::span<const Var> parts) {
  if (parts.empty()) {
    throw ShapeError("concatRows: nothing to concatenate");
  }
  const Eigen::Index cols = parts.front().cols();
  Eigen::Index rows = 0;
  for (const auto& p : parts) {
    if (p.cols() != cols) {
      throw ShapeError("concatRows: column counts differ");
    }
    rows += p.rows();
  }
  Matrix y(rows, cols);
  std::vector<Eigen::Index> offsets;
  Eigen::Index off = 0;
  for (const auto& p : parts) {
    offsets.push_back(off);
    y.middleRows(off, p.rows()) = p.value();
    off += p.rows();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return parts.front().tape().record(std::move(y), parts,
                                     [inputs, offsets](const Matrix& g) {
                                       for (size_t i = 0; i < inputs.size(); ++i) {
                                         inputs[i].tape().accumulate(
                                             inputs[i], g.middleRows(offsets[i], inputs[i].rows()));
                                       }
                                     });
}

Var row(const Var& x, Eigen::Index r) {
  if (r < 0 || r >= x.rows()) {
    throw ShapeError("row: index out of range");
  }
  const Var in[] = {x};
  return x.tape().record(x.value().row(r), in, [x, r](const Matrix& g) {
    Matrix dx = Matrix::Zero(x.rows(), x.cols());
    dx.row(r) = g;
    x.tape().accumulate(x, dx);
  });
}

Var maskedSoftmaxRows(const Var& x, const std::vector<bool>& keyMask) {
  if (static_cast<Eigen::Index>(keyMask.size()) != x.cols()) {
    throw ShapeError("maskedSoftmaxRows: mask length does not match columns");
  }
  const Matrix& v = x.value();
  Matrix p = Matrix::Zero(v.rows(), v.cols());
  for (Eigen::Index r = 0; r < v.rows(); ++r) {
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
      if (keyMask[static_cast<size_t>(c)]) {
        best = std::max(best, v(r, c));
      }
    }
    double z = 0.0;
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
      if (keyMask[static_cast<size_t>(c)]) {
        p(r, c) = std::exp(v(r, c) - best);
        z += p(r, c);
      }
    }
    if (z > 0.0) {
      p.row(r) /= z;
    }
  }
  const Var in[] = {x};
  Matrix keep = p;
  return x.tape().record(std::move(p), in, [x, probs = std::move(keep)](const Matrix& g) {
    const Eigen::VectorXd dot = g.cwiseProduct(probs).rowwise().sum();
    const Matrix dx = probs.cwiseProduct(g - dot.replicate(1, g.cols()));
    x.tape().accumulate(x, dx);
  });
}

Var maxRows(const Var& x) {
  if (x.rows() == 0) {
    throw ShapeError("maxRows: empty input");
  }
  Matrix y(1, x.cols());
  std::vector<Eigen::Index> arg(static_cast<size_t>(x.cols()));
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    Eigen::Index r = 0;
    y(0, c) = x.value().col(c).maxCoeff(&r);
    arg[static_cast<size_t>(c)] = r;
  }
  const Var in[] = {x};
  return x.tape().record(std::move(y), in, [x, arg = std::move(arg)](const Matrix& g) {
    Matrix dx = Matrix::Zero(x.rows(), x.cols());
    for (size_t c = 0; c < arg.size(); ++c) {
      dx(arg[c], static_cast<Eigen::Index>(c)) = g(0, static_cast<Eigen::Index>(c));
    }
    x.tape().accumulate(x, dx);
  });
}

Var hypot2(const Var& a, const Var& b) {
  if (a.value().size() != 1 || b.value().size() != 1) {
    throw ShapeError("hypot2: operands must be 1x1");
  }
  const double av = a.value()(0, 0);
  const double bv = b.value()(0, 0);
  const double l = balancedLoss(av, bv);
  const Var in[] = {a, b};
  return a.tape().record(Matrix::Constant(1, 1, l), in, [a, b, av, bv, l](const Matrix& g) {
    if (l == 0.0) {
      return;
    }
    a.tape().accumulate(a, g * (av / l));
    b.tape().accumulate(b, g * (bv / l));
  });
}

Var bceWithLogits(const Var& logits, std::span<const double> labels,
                  std::span<const double> weights) {
  const auto n = static_cast<size_t>(logits.rows());
  if (logits.cols() != 1 || labels.size() != n || (!weights.empty() && weights.size() != n)) {
    throw ShapeError("bceWithLogits: logits must be N x 1 with N labels (and weights)");
  }
  std::vector<double> z(n);
  for (size_t i = 0; i < n; ++i) {
    z[i] = logits.value()(static_cast<Eigen::Index>(i), 0);
  }
  const double loss = weights.empty() ? bceGroup(z, labels) : weightedBceMean(z, labels, weights);
  // d loss / d z_i = coef_i * (sigmoid(z_i) - y_i)
  std::vector<double> coef = bceMeanCoefficients(n, weights);
  const Var in[] = {logits};
  return logits.tape().record(
      Matrix::Constant(1, 1, loss), in,
      [logits, z = std::move(z), y = std::vector<double>(labels.begin(), labels.end()),
       coef = std::move(coef)](const Matrix& g) {
        Matrix dz(static_cast<Eigen::Index>(z.size()), 1);
        for (size_t i = 0; i < z.size(); ++i) {
          dz(static_cast<Eigen::Index>(i), 0) = g(0, 0) * coef[i] * (sigmoid(z[i]) - y[i]);
        }
        logits.tape().accumulate(logits, dz);
      });
}

} // namespace motioneval::ag
