#include "motioneval/retrieval.h"

#include "motioneval/errors.h"

#include <string>

namespace motioneval {

int trueMatchRank(const Eigen::MatrixXd& motions, const Eigen::MatrixXd& texts, int i) {
  if (motions.rows() != texts.rows() || motions.cols() != texts.cols()) {
    throw ShapeError("retrieval: motion and text embedding batches differ in shape");
  }
  const double own = (motions.row(i) - texts.row(i)).squaredNorm();
  int rank = 0;
  for (Eigen::Index j = 0; j < texts.rows(); ++j) {
    if (j == i) {
      continue;
    }
    const double d = (motions.row(i) - texts.row(j)).squaredNorm();
    if (d < own || (d == own && j < i)) {
      ++rank;
    }
  }
  return rank;
}

RPrecision rPrecisionBatch(const Eigen::MatrixXd& motions, const Eigen::MatrixXd& texts,
                           int allowance, int batchSize) {
  if (motions.rows() != batchSize) {
    throw ConfigError("R-Precision batch must hold exactly " + std::to_string(batchSize) +
                      " pairs, got " + std::to_string(motions.rows()));
  }
  if (allowance < 1 || allowance > batchSize - 1) {
    throw ConfigError("retrieval allowance must be in [1, " + std::to_string(batchSize - 1) + "]");
  }
  RPrecision out;
  out.hits.resize(static_cast<size_t>(batchSize));
  int total = 0;
  for (int i = 0; i < batchSize; ++i) {
    out.hits[static_cast<size_t>(i)] = trueMatchRank(motions, texts, i) < allowance ? 1 : 0;
    total += out.hits[static_cast<size_t>(i)];
  }
  out.precision = static_cast<double>(total) / batchSize;
  return out;
}

int sampleRetrievalRank(const Eigen::MatrixXd& motions, const Eigen::MatrixXd& texts, int index,
                        Rng& rng, int batchSize) {
  const auto n = static_cast<int>(motions.rows());
  if (n < batchSize) {
    throw DataError("sample-level R-Precision needs at least " + std::to_string(batchSize) +
                    " pairs, got " + std::to_string(n));
  }
  std::vector<int> pool;
  pool.reserve(static_cast<size_t>(n - 1));
  for (int j = 0; j < n; ++j) {
    if (j != index) {
      pool.push_back(j);
    }
  }
  // Partial Fisher-Yates: the first batchSize - 1 entries are the distractors.
  for (int k = 0; k < batchSize - 1; ++k) {
    const auto pick = k + static_cast<int>(rng.index(static_cast<uint64_t>(pool.size() - k)));
    std::swap(pool[static_cast<size_t>(k)], pool[static_cast<size_t>(pick)]);
  }
  const int slot = static_cast<int>(rng.index(static_cast<uint64_t>(batchSize)));
  Eigen::MatrixXd bm(batchSize, motions.cols());
  Eigen::MatrixXd bt(batchSize, texts.cols());
  int next = 0;
  for (int b = 0; b < batchSize; ++b) {
    const int src = b == slot ? index : pool[static_cast<size_t>(next++)];
    bm.row(b) = motions.row(src);
    bt.row(b) = texts.row(src);
  }
  return trueMatchRank(bm, bt, slot);
}

double multimodalDistance(const Eigen::VectorXd& motion, const Eigen::VectorXd& text) {
  if (motion.size() != text.size()) {
    throw ShapeError("multimodal distance: embedding dimensions differ");
  }
  return (motion - text).norm();
}

} // namespace motioneval
