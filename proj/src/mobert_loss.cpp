#include "motioneval/mobert_loss.h"

#include "motioneval/errors.h"

#include <algorithm>
#include <cmath>

namespace motioneval {

namespace {

bool allEqual(std::span<const double> w) {
  return std::all_of(w.begin(), w.end(), [&](double v) { return v == w.front(); });
}

double weightedMean(std::span<const double> values, std::span<const double> weights) {
  if (values.size() != weights.size() || values.empty()) {
    throw ShapeError("weighted mean: values and weights must be non-empty and equally long");
  }
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) {
      throw DataError("contrastive weights must be non-negative");
    }
    total += w;
  }
  if (total <= 0.0) {
    throw DegenerateBatchError("all contrastive weights are zero (every alpha == 1)");
  }
  double sum = 0.0;
  if (allEqual(weights)) {
    for (double v : values) {
      sum += v;
    }
    return sum / static_cast<double>(values.size());
  }
  for (size_t i = 0; i < values.size(); ++i) {
    sum += weights[i] * values[i];
  }
  return sum / total;
}

} // namespace

double sigmoid(double z) {
  if (z >= 0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double bceWithLogits(double logit, double label) {
  return std::max(logit, 0.0) - logit * label + std::log1p(std::exp(-std::abs(logit)));
}

double bceGroup(std::span<const double> logits, std::span<const double> labels) {
  if (logits.size() != labels.size() || logits.empty()) {
    throw ShapeError("bce: logits and labels must be non-empty and equally long");
  }
  double sum = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    sum += bceWithLogits(logits[i], labels[i]);
  }
  return sum / static_cast<double>(logits.size());
}

double weightedBceMean(std::span<const double> logits, std::span<const double> labels,
                       std::span<const double> weights) {
  if (logits.size() != labels.size()) {
    throw ShapeError("bce: logits and labels must be equally long");
  }
  std::vector<double> bce(logits.size());
  for (size_t i = 0; i < logits.size(); ++i) {
    bce[i] = bceWithLogits(logits[i], labels[i]);
  }
  return weightedMean(bce, weights);
}

std::vector<double> bceMeanCoefficients(size_t n, std::span<const double> weights) {
  if (weights.empty() || allEqual(weights)) {
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
  }
  double total = 0.0;
  for (double w : weights) {
    total += w;
  }
  std::vector<double> c(n);
  for (size_t i = 0; i < n; ++i) {
    c[i] = weights[i] / total;
  }
  return c;
}

double balancedLoss(double validLoss, double contrastiveLoss) {
  return std::sqrt(validLoss * validLoss + contrastiveLoss * contrastiveLoss);
}

double weightedContrastiveLoss(std::span<const double> contrastiveBce,
                               std::span<const double> alpha) {
  std::vector<double> w(alpha.size());
  for (size_t i = 0; i < alpha.size(); ++i) {
    if (!(alpha[i] >= 0.0 && alpha[i] <= 1.0)) {
      throw DataError("similarity alpha must lie in [0, 1]");
    }
    w[i] = contrastiveWeight(alpha[i]);
  }
  return weightedMean(contrastiveBce, w);
}

double weightedLoss(double validLoss, std::span<const double> contrastiveBce,
                    std::span<const double> alpha) {
  return balancedLoss(validLoss, weightedContrastiveLoss(contrastiveBce, alpha));
}

} // namespace motioneval
