#pragma once

#include <string>

namespace motioneval {

// Text-to-text similarity in [0, 1] used to down-weight contrastive texts
// that happen to describe the motion anyway.
class SimilarityProvider {
 public:
  virtual ~SimilarityProvider() = default;
  [[nodiscard]] virtual double similarity(const std::string& a, const std::string& b) const = 0;
};

// Cosine of lowercased word-count vectors; 0 if either text has no words.
class BagOfWordsCosine : public SimilarityProvider {
 public:
  [[nodiscard]] double similarity(const std::string& a, const std::string& b) const override;
};

class ConstantSimilarity : public SimilarityProvider {
 public:
  explicit ConstantSimilarity(double alpha);
  [[nodiscard]] double similarity(const std::string&, const std::string&) const override {
    return alpha_;
  }

 private:
  double alpha_;
};

} // namespace motioneval
