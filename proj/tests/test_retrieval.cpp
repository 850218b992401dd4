#include "motioneval/errors.h"
#include "motioneval/retrieval.h"

#include <gtest/gtest.h>

#include <cmath>

namespace motioneval {
namespace {

Eigen::MatrixXd randomRows(Rng& rng, int n, int d) {
  Eigen::MatrixXd m(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) {
      m(i, j) = rng.normal();
    }
  }
  return m;
}

// Rank of the true text by a full sort, lower batch index first on ties.
int sortedRank(const Eigen::MatrixXd& m, const Eigen::MatrixXd& t, int i) {
  std::vector<std::pair<double, int>> d;
  for (int j = 0; j < t.rows(); ++j) {
    d.emplace_back((m.row(i) - t.row(j)).squaredNorm(), j);
  }
  std::sort(d.begin(), d.end());
  for (size_t r = 0; r < d.size(); ++r) {
    if (d[r].second == i) {
      return static_cast<int>(r);
    }
  }
  return -1;
}

TEST(RPrecision, PerfectCoEmbedding) {
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(32, 32);
  const auto r = rPrecisionBatch(eye, eye, 1);
  EXPECT_EQ(r.precision, 1.0);
  for (int h : r.hits) {
    EXPECT_EQ(h, 1);
  }
}

TEST(RPrecision, LargestAllowanceMissesOnlyLastRanked) {
  Rng rng(1);
  for (int b = 0; b < 20; ++b) {
    const Eigen::MatrixXd m = randomRows(rng, 32, 4), t = randomRows(rng, 32, 4);
    const auto r = rPrecisionBatch(m, t, 31);
    for (int i = 0; i < 32; ++i) {
      EXPECT_EQ(r.hits[i], trueMatchRank(m, t, i) == 31 ? 0 : 1);
    }
  }
  // Near-perfect co-embedding: nothing ranks last, so k = 31 is 1.0.
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(32, 32);
  EXPECT_EQ(rPrecisionBatch(eye, 0.9 * eye, 31).precision, 1.0);
}

TEST(RPrecision, RankMatchesSortOracle) {
  Rng rng(2);
  for (int b = 0; b < 20; ++b) {
    Eigen::MatrixXd m = randomRows(rng, 32, 3), t = randomRows(rng, 32, 3);
    // Plant exact ties.
    t.row(5) = t.row(9);
    m.row(9) = m.row(5);
    for (int i = 0; i < 32; ++i) {
      EXPECT_EQ(trueMatchRank(m, t, i), sortedRank(m, t, i));
    }
  }
}

TEST(RPrecision, TieBreaksTowardLowerIndex) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(32, 2);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(32, 2);
  EXPECT_EQ(trueMatchRank(m, t, 0), 0);
  EXPECT_EQ(trueMatchRank(m, t, 7), 7);
  EXPECT_EQ(rPrecisionBatch(m, t, 1).precision, 1.0 / 32.0);
}

TEST(RPrecision, RandomEmbeddingsNearChanceAndMonotone) {
  Rng rng(3);
  const std::vector<int> ks = {1, 2, 3, 5, 10};
  std::vector<double> sum(ks.size(), 0.0), sumSq(ks.size(), 0.0);
  const int batches = 1000;
  for (int b = 0; b < batches; ++b) {
    const Eigen::MatrixXd m = randomRows(rng, 32, 8), t = randomRows(rng, 32, 8);
    double prev = 0.0;
    for (int k = 1; k <= 31; ++k) {
      const double p = rPrecisionBatch(m, t, k).precision;
      ASSERT_GE(p, prev);
      prev = p;
    }
    for (size_t i = 0; i < ks.size(); ++i) {
      const double p = rPrecisionBatch(m, t, ks[i]).precision;
      sum[i] += p;
      sumSq[i] += p * p;
    }
  }
  for (size_t i = 0; i < ks.size(); ++i) {
    const double mean = sum[i] / batches;
    const double var = (sumSq[i] - batches * mean * mean) / (batches - 1);
    const double se = std::sqrt(var / batches);
    EXPECT_NEAR(mean, ks[i] / 32.0, 3.0 * se) << "k=" << ks[i];
  }
}

TEST(RPrecision, PreconditionsAreEnforced) {
  Rng rng(4);
  const Eigen::MatrixXd m = randomRows(rng, 32, 2);
  EXPECT_THROW(rPrecisionBatch(m, m, 0), ConfigError);
  EXPECT_THROW(rPrecisionBatch(m, m, 32), ConfigError);
  EXPECT_THROW(rPrecisionBatch(randomRows(rng, 31, 2), randomRows(rng, 31, 2), 1), ConfigError);
  EXPECT_THROW(trueMatchRank(m, randomRows(rng, 32, 3), 0), ShapeError);
}

TEST(RPrecision, SampleRankIsSeededAndInRange) {
  Rng data(5);
  const Eigen::MatrixXd m = randomRows(data, 80, 4), t = randomRows(data, 80, 4);
  for (int i = 0; i < 80; ++i) {
    Rng a(100 + i), b(100 + i);
    const int r = sampleRetrievalRank(m, t, i, a);
    EXPECT_EQ(r, sampleRetrievalRank(m, t, i, b));
    EXPECT_GE(r, 0);
    EXPECT_LT(r, 32);
  }
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(40, 40);
  Rng rng(6);
  for (int i = 0; i < 40; ++i) {
    EXPECT_EQ(sampleRetrievalRank(eye, eye, i, rng), 0);
  }
  EXPECT_THROW(sampleRetrievalRank(randomRows(data, 20, 2), randomRows(data, 20, 2), 0, rng),
               DataError);
}

TEST(MultimodalDistance, Basics) {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(2), b(2);
  b << 3, 4;
  EXPECT_DOUBLE_EQ(multimodalDistance(a, b), 5.0);
  EXPECT_DOUBLE_EQ(multimodalDistance(b, a), 5.0);
  EXPECT_EQ(multimodalDistance(b, b), 0.0);
  EXPECT_THROW(multimodalDistance(a, Eigen::VectorXd::Zero(3)), ShapeError);
}

} // namespace
} // namespace motioneval
