#include "motioneval/embedding.h"
#include "motioneval/errors.h"
#include "motioneval/features.h"
#include "motioneval/retrieval.h"
#include "motioneval/synthetic.h"
#include "motioneval/toy_coembedding.h"

#include "test_util.h"

#include <gtest/gtest.h>

#include <fstream>

namespace motioneval {
namespace {

void writeText(const std::filesystem::path& p, const std::string& s) {
  std::ofstream(p) << s;
}

TEST(EmbeddingIo, Float32RoundTrip) {
  testing::TempDir dir("emb");
  EmbeddingTable t;
  t.modality = Modality::Text;
  t.rows.resize(3, 2);
  t.rows << 0.5, -1.25, 2, 3, 1e-3, 7;
  saveEmbeddings(dir.path() / "text.f32", t);
  const auto back = loadEmbeddings(dir.path() / "text.f32");
  EXPECT_EQ(back.modality, Modality::Text);
  ASSERT_EQ(back.rows.rows(), 3);
  for (Eigen::Index i = 0; i < t.rows.size(); ++i) {
    EXPECT_EQ(back.rows.data()[i], static_cast<double>(static_cast<float>(t.rows.data()[i])));
  }
}

TEST(EmbeddingIo, CsvWithManifest) {
  testing::TempDir dir("emb");
  writeText(dir.path() / "motion.csv", "# exported\n1,2,3\n4,5,6\n");
  writeText(dir.path() / "motion.json", R"({"dim": 3, "count": 2, "modality": "motion"})");
  const auto t = loadEmbeddings(dir.path() / "motion.csv");
  EXPECT_EQ(t.modality, Modality::Motion);
  EXPECT_EQ(t.rows(1, 2), 6.0);
}

TEST(EmbeddingIo, ManifestMismatchesAreFormatErrors) {
  testing::TempDir dir("emb");
  writeText(dir.path() / "a.csv", "1,2\n3,4\n");
  writeText(dir.path() / "a.json", R"({"dim": 3, "count": 2, "modality": "motion"})");
  EXPECT_THROW(loadEmbeddings(dir.path() / "a.csv"), FormatError);
  writeText(dir.path() / "a.json", R"({"dim": 2, "count": 3, "modality": "motion"})");
  EXPECT_THROW(loadEmbeddings(dir.path() / "a.csv"), FormatError);
  writeText(dir.path() / "a.json", R"({"dim": 2, "count": 2, "modality": "audio"})");
  EXPECT_THROW(loadEmbeddings(dir.path() / "a.csv"), FormatError);
  writeText(dir.path() / "a.json", R"({"dim": 2})");
  EXPECT_THROW(loadEmbeddings(dir.path() / "a.csv"), FormatError);
  writeText(dir.path() / "b.f32", "abc");
  writeText(dir.path() / "b.json", R"({"dim": 2, "count": 2, "modality": "text"})");
  EXPECT_THROW(loadEmbeddings(dir.path() / "b.f32"), FormatError);
  EXPECT_THROW(loadEmbeddings(dir.path() / "missing.f32"), DataError);
}

std::vector<CoEmbeddingPair> corpus(int classes, int perClass, uint64_t seed) {
  std::vector<CoEmbeddingPair> out;
  for (const auto& s : synthetic::bearingTask(classes, perClass, seed)) {
    out.push_back({extractFeatures(s.motion), s.text});
  }
  return out;
}

class ToyCoEmbeddingTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    // 60 clips per bearing; with fewer the linear map overfits the 263-dim pooled features.
    provider_ = new ToyCoEmbedding(trainToyCoEmbedding(corpus(32, 60, 1)));
  }
  static void TearDownTestSuite() {
    delete provider_;
    provider_ = nullptr;
  }
  static ToyCoEmbedding* provider_;
};

ToyCoEmbedding* ToyCoEmbeddingTest::provider_ = nullptr;

TEST_F(ToyCoEmbeddingTest, DimensionAndDeterminism) {
  const auto pairs = corpus(32, 1, 99);
  const auto m1 = provider_->embedMotion(pairs[3].features);
  const auto m2 = provider_->embedMotion(pairs[3].features);
  const auto t1 = provider_->embedText(pairs[3].text);
  EXPECT_EQ(m1.size(), provider_->dim());
  EXPECT_EQ(t1.size(), provider_->dim());
  EXPECT_EQ(provider_->dim(), ToyCoEmbeddingOptions{}.dim);
  EXPECT_EQ(m1, m2);
  EXPECT_EQ(t1, provider_->embedText(pairs[3].text));
  EXPECT_GE(provider_->heldOutSeparation(), 0.9);
}

TEST_F(ToyCoEmbeddingTest, HeldOutRPrecisionAtOne) {
  // 32 fresh clips, one per bearing, so each batch row has a distinct caption.
  double total = 0.0;
  const int batches = 5;
  for (int b = 0; b < batches; ++b) {
    const auto pairs = corpus(32, 1, 1000 + b);
    Eigen::MatrixXd m(32, provider_->dim()), t(32, provider_->dim());
    for (int i = 0; i < 32; ++i) {
      m.row(i) = provider_->embedMotion(pairs[i].features).transpose();
      t.row(i) = provider_->embedText(pairs[i].text).transpose();
    }
    total += rPrecisionBatch(m, t, 1).precision;
  }
  EXPECT_GE(total / batches, 0.8);
}

TEST(ToyCoEmbedding, NeedsEnoughPairs) {
  EXPECT_THROW(trainToyCoEmbedding(corpus(8, 7, 2)), DataError);
}

TEST(ToyCoEmbedding, UnreachableCriterionIsTrainingError) {
  ToyCoEmbeddingOptions o;
  o.epochs = 1;
  o.criterion = 1.01;
  EXPECT_THROW(trainToyCoEmbedding(corpus(8, 10, 3), o), TrainingError);
}

TEST(ToyCoEmbedding, SplitWordsLowercases) {
  EXPECT_EQ(splitWords("A  Person\tWALKS"), (std::vector<std::string>{"a", "person", "walks"}));
  EXPECT_TRUE(splitWords("   ").empty());
}

} // namespace
} // namespace motioneval
