#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace motioneval {

struct FoldAssignment {
  std::vector<std::vector<size_t>> folds; // sample indices, ascending within a fold
  std::vector<int> foldOf;                // per sample
};

// Seeded shuffle then contiguous split into k folds whose sizes differ by at
// most one. Throws ConfigError for k < 2 or k > n.
FoldAssignment kfoldPartition(size_t n, int k, uint64_t seed);

// As above, but the shuffle runs over samples ordered by key, so a sample's
// fold depends only on its key and the seed, not on its input position.
FoldAssignment kfoldPartition(std::span<const uint64_t> keys, int k, uint64_t seed);

// Out-of-fold predictions: for each fold, fit(trainIndices) is called on the
// complement and predict(model, i) on every held-out i. Each sample is
// predicted exactly once, by a model that never saw it.
template <class Fit, class Predict>
std::vector<double> kfoldPredictions(const FoldAssignment& assignment, Fit&& fit,
                                     Predict&& predict) {
  const size_t n = assignment.foldOf.size();
  std::vector<double> out(n, 0.0);
  for (size_t f = 0; f < assignment.folds.size(); ++f) {
    std::vector<size_t> train;
    train.reserve(n - assignment.folds[f].size());
    for (size_t i = 0; i < n; ++i) {
      if (assignment.foldOf[i] != static_cast<int>(f)) {
        train.push_back(i);
      }
    }
    const auto model = fit(std::as_const(train));
    for (size_t i : assignment.folds[f]) {
      out[i] = predict(model, i);
    }
  }
  return out;
}

} // namespace motioneval
