#pragma once

#include "motioneval/embedding.h"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace motioneval {

struct CoEmbeddingPair {
  MotionFeatures features;
  std::string text;
};

struct ToyCoEmbeddingOptions {
  int dim = 16;
  int epochs = 200;
  int batchSize = 32;
  double learningRate = 0.01;
  double heldOutFraction = 0.2;
  double criterion = 0.9; // required held-out matched-closer-than-mismatched rate
  uint64_t seed = 0;
};

// Linear co-embedding: motions are mean-pooled over frames, standardized and
// projected; texts are bag-of-words frequency vectors over the training
// vocabulary, projected into the same space. A stand-in for a pretrained
// motion/text encoder so the embedding metrics can run end to end.
class ToyCoEmbedding : public EmbeddingProvider {
 public:
  [[nodiscard]] int dim() const override { return static_cast<int>(motionProjection_.rows()); }
  [[nodiscard]] Eigen::VectorXd embedMotion(const MotionFeatures& features) const override;
  [[nodiscard]] Eigen::VectorXd embedText(const std::string& text) const override;

  // Fraction of held-out pairs whose matched text is closer than a random
  // mismatched one, measured at the end of training.
  [[nodiscard]] double heldOutSeparation() const { return heldOutSeparation_; }

  friend ToyCoEmbedding trainToyCoEmbedding(const std::vector<CoEmbeddingPair>& corpus,
                                            const ToyCoEmbeddingOptions& options);

 private:
  [[nodiscard]] Eigen::VectorXd pooledMotion(const MotionFeatures& features) const;
  [[nodiscard]] Eigen::VectorXd bagOfWords(const std::string& text) const;

  Eigen::VectorXd featureMean_;
  Eigen::VectorXd featureScale_;
  std::map<std::string, int> vocabulary_;
  Eigen::MatrixXd motionProjection_; // dim x 263
  Eigen::MatrixXd textProjection_;   // dim x |vocabulary|
  double heldOutSeparation_ = 0.0;
};

// Throws DataError for fewer than 64 pairs and TrainingError when the
// held-out criterion is not met within the epoch budget.
ToyCoEmbedding trainToyCoEmbedding(const std::vector<CoEmbeddingPair>& corpus,
                                   const ToyCoEmbeddingOptions& options = {});

// Lowercased whitespace tokens.
std::vector<std::string> splitWords(const std::string& text);

} // namespace motioneval
