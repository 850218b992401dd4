#pragma once

#include "motioneval/rng.h"

#include <Eigen/Core>

#include <vector>

namespace motioneval {

inline constexpr int kRPrecisionBatchSize = 32;
inline constexpr int kMaxRetrievalAllowance = 20;

// 0-based rank of text `i` among all batch texts by Euclidean distance to
// motion `i`. Equal distances are broken by batch index (lower index first).
int trueMatchRank(const Eigen::MatrixXd& motions, const Eigen::MatrixXd& texts, int i);

struct RPrecision {
  std::vector<int> hits; // per motion, 0 or 1
  double precision = 0.0;
};

// Rows of motions / texts are paired embeddings. The batch must have exactly
// batchSize rows and 1 <= allowance <= batchSize - 1 (ConfigError otherwise).
RPrecision rPrecisionBatch(const Eigen::MatrixXd& motions, const Eigen::MatrixXd& texts,
                           int allowance, int batchSize = kRPrecisionBatchSize);

// Sample-level R-Precision for pair `index` of a dataset: batchSize - 1
// distractor pairs are drawn without replacement and the true pair is placed
// at a random batch position. Returns the 0-based rank of the true text, so
// hit@k = rank < k for every allowance at once.
int sampleRetrievalRank(const Eigen::MatrixXd& motions, const Eigen::MatrixXd& texts, int index,
                        Rng& rng, int batchSize = kRPrecisionBatchSize);

double multimodalDistance(const Eigen::VectorXd& motion, const Eigen::VectorXd& text);

} // namespace motioneval
