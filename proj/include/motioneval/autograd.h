#pragma once

#include "motioneval/rng.h"

#include <Eigen/Core>

#include <deque>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

// Minimal tape-based reverse-mode differentiation over dense matrices, enough
// for the MoBERT encoder stack. Every op records its output on the tape
// together with a closure that pushes the output gradient back to its inputs.
namespace motioneval::ag {

using Matrix = Eigen::MatrixXd;

class Tape;

// Handle to a value recorded on a tape. Cheap to copy.
class Var {
 public:
  Var() = default;
  [[nodiscard]] const Matrix& value() const;
  [[nodiscard]] Eigen::Index rows() const { return value().rows(); }
  [[nodiscard]] Eigen::Index cols() const { return value().cols(); }
  [[nodiscard]] Tape& tape() const { return *tape_; }
  [[nodiscard]] int id() const { return id_; }

 private:
  friend class Tape;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}
  Tape* tape_ = nullptr;
  int id_ = -1;
};

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);

  // Leaf bound to externally owned storage (no copy). Gradients flow into it
  // and are reported under `key` by gradient(). The same key returns the
  // same leaf for the lifetime of the tape.
  Var parameter(const Matrix& storage, int key);

  // Records an op result. `inputs` decide whether it needs a gradient.
  Var record(Matrix value, std::span<const Var> inputs, std::function<void(const Matrix&)> backward);

  // Adds g into the gradient of v (no-op when v needs none).
  void accumulate(const Var& v, const Matrix& g);

  [[nodiscard]] const Matrix& value(int id) const;
  [[nodiscard]] bool needsGrad(const Var& v) const { return nodes_[v.id()].needsGrad; }

  // Seeds d(loss)/d(loss) = 1 for a 1x1 value and runs every closure in
  // reverse recording order.
  void backward(const Var& loss);

  // Gradient of a parameter leaf after backward(); nullptr if it received none.
  [[nodiscard]] const Matrix* gradient(int key) const;

  [[nodiscard]] size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix owned;
    const Matrix* external = nullptr;
    Matrix grad;
    bool needsGrad = false;
    std::function<void(const Matrix&)> backward;
  };
  std::deque<Node> nodes_;
  std::unordered_map<int, int> parameterLeaves_;
};

// y = a b
Var matmul(const Var& a, const Var& b);
// y = a b^T
Var matmulTransB(const Var& a, const Var& b);
// y = x W^T + b, with W (out x in) and b (1 x out)
Var linear(const Var& x, const Var& weight, const Var& bias);
Var add(const Var& a, const Var& b);
Var scale(const Var& a, double s);
Var selu(const Var& x);
Var relu(const Var& x);
// Inverted dropout; identity when p == 0.
Var dropout(const Var& x, double p, Rng& rng);
// Per-row group normalization over `groups` contiguous channel groups, then a
// per-channel affine (gamma, beta are 1 x C). LayerNorm is groups == 1.
Var groupNorm(const Var& x, int groups, const Var& gamma, const Var& beta, double eps);
// Rows of `table` at `ids`.
Var gatherRows(const Var& table, std::span<const int> ids);
// Output row c is the concatenation of x's rows windows[c][0], windows[c][1], ...
Var gatherFlatten(const Var& x, const std::vector<std::vector<int>>& windows);
Var sliceCols(const Var& x, Eigen::Index start, Eigen::Index count);
Var concatCols(std::span<const Var> parts);
Var concatRows(std::span<const Var> parts);
Var row(const Var& x, Eigen::Index r);
// Row softmax restricted to columns where keyMask is true; others get 0.
Var maskedSoftmaxRows(const Var& x, const std::vector<bool>& keyMask);
// Per-column max over rows (gradient to the arg max).
Var maxRows(const Var& x);
// sqrt(a^2 + b^2) of two 1x1 values.
Var hypot2(const Var& a, const Var& b);

// Mean binary cross entropy from logits (N x 1) against labels. With weights,
// a weighted mean sum(w_i * bce_i) / sum(w_i); equal weights reduce exactly to
// the plain mean. Throws DegenerateBatchError if all weights are zero.
Var bceWithLogits(const Var& logits, std::span<const double> labels,
                  std::span<const double> weights = {});

} // namespace motioneval::ag
