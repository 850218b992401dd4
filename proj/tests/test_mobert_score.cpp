#include "motioneval/errors.h"
#include "motioneval/mobert_score.h"

#include <gtest/gtest.h>

namespace motioneval {
namespace {

MotionFeatures randomFeatures(Rng& rng, int frames) {
  MotionFeatures f;
  f.values.resize(frames, feature_layout::kDim);
  for (Eigen::Index i = 0; i < f.values.size(); ++i) f.values.data()[i] = rng.normal();
  return f;
}

class ScoreTest : public ::testing::Test {
 protected:
  MoBertModel model{MoBertConfig::reduced(), InitOptions{2, false}};
  Rng rng{3};
};

TEST_F(ScoreTest, FeaturesAreCls_TextMax_ChunkMax) {
  const auto f = randomFeatures(rng, 50);
  const std::vector<int> text = {6, 7, 8, 9};
  const auto r = forwardEval(model, f, text);
  const auto x = regressionFeatures(r);
  const int d = model.config().dModel;
  ASSERT_EQ(x.size(), 3 * d);
  for (int c = 0; c < d; ++c) {
    EXPECT_EQ(x[c], r.states(0, c));
    double tmax = -1e300, mmax = -1e300;
    for (int p = 0; p < 4; ++p) tmax = std::max(tmax, r.states(2 + p, c));
    for (int p = 0; p < r.layout.chunkCount; ++p) {
      mmax = std::max(mmax, r.states(r.layout.chunkBegin() + p, c));
    }
    EXPECT_EQ(x[d + c], tmax);
    EXPECT_EQ(x[2 * d + c], mmax);
  }
  EXPECT_EQ(extractRegressionFeatures(model, f, text), x);
}

TEST_F(ScoreTest, DefaultWidthIs768) {
  PairResult r;
  r.states = Eigen::MatrixXd::Ones(64, 256);
  r.layout.textCount = 3;
  r.layout.chunkCount = 5;
  r.layout.maxContext = 64;
  EXPECT_EQ(regressionFeatures(r).size(), 768);
}

TEST_F(ScoreTest, PoolingIsOrderInvariant) {
  PairResult r;
  r.states.resize(16, 4);
  for (Eigen::Index i = 0; i < r.states.size(); ++i) r.states.data()[i] = rng.normal();
  r.layout.textCount = 3;
  r.layout.chunkCount = 6;
  r.layout.maxContext = 16;
  const auto a = regressionFeatures(r);
  PairResult s = r;
  // Reverse the chunk rows and the text rows.
  s.states.middleRows(r.layout.chunkBegin(), 6) =
      r.states.middleRows(r.layout.chunkBegin(), 6).colwise().reverse();
  s.states.middleRows(2, 3) = r.states.middleRows(2, 3).colwise().reverse();
  EXPECT_EQ(regressionFeatures(s), a);
}

TEST_F(ScoreTest, TextFreeSliceIsExactlyZero) {
  const auto x = extractRegressionFeatures(model, randomFeatures(rng, 40), {});
  const int d = model.config().dModel;
  EXPECT_TRUE(x.segment(d, d).isZero(0.0));
  EXPECT_FALSE(x.head(d).isZero(0.0));
}

TEST_F(ScoreTest, AlignmentModeIsSigmoidOfLogit) {
  for (int i = 0; i < 4; ++i) {
    const auto f = randomFeatures(rng, 20 + 15 * i);
    const std::vector<int> text = {5, 10, 15};
    const double p = score(model, nullptr, ScoreMode::Alignment, f, text);
    EXPECT_EQ(p, forwardEval(model, f, text).probability);
    EXPECT_GT(p, 0.0);
    EXPECT_LT(p, 1.0);
    EXPECT_EQ(score(model, nullptr, ScoreMode::Alignment, f, std::nullopt),
              forwardEval(model, f, {}).probability);
  }
}

TEST_F(ScoreTest, RegressionModeIsComposition) {
  std::vector<MotionFeatures> motions;
  Eigen::MatrixXd x(12, 3 * model.config().dModel);
  Eigen::VectorXd y(12);
  const std::vector<int> text = {11, 12};
  for (int i = 0; i < 12; ++i) {
    motions.push_back(randomFeatures(rng, 30));
    x.row(i) = extractRegressionFeatures(model, motions.back(), text).transpose();
    y[i] = rng.uniform(0, 4);
  }
  const auto ridge = RegressionHead::fitRidge(x, y);
  const auto svr = RegressionHead::fitSvr(x, y);
  for (const auto& m : motions) {
    const auto feats = extractRegressionFeatures(model, m, text);
    EXPECT_EQ(score(model, &ridge, ScoreMode::Ridge, m, text), ridge.predict(feats));
    EXPECT_EQ(score(model, &svr, ScoreMode::Svr, m, text), svr.predict(feats));
  }
  EXPECT_THROW(score(model, nullptr, ScoreMode::Ridge, motions[0], text), ConfigError);
  EXPECT_THROW(score(model, &svr, ScoreMode::Ridge, motions[0], text), ConfigError);
}

TEST_F(ScoreTest, PrepareTextClipsToBudget) {
  const auto vocab = BpeVocab::train({"a b c d e f g h i j k l m n o p q r s t u v w x y z"}, 40);
  std::string longText;
  for (int i = 0; i < 80; ++i) longText += "a ";
  // 200 frames leave 41 text slots in a 64-position context.
  EXPECT_EQ(prepareText(model, vocab, longText, 200).size(), 41u);
  EXPECT_EQ(prepareText(model, vocab, "b c", 200).size(), 2u);
  EXPECT_EQ(parseScoreMode("ridge"), ScoreMode::Ridge);
  EXPECT_THROW(parseScoreMode("clip"), ConfigError);
}

} // namespace
} // namespace motioneval
