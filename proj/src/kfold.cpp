#include "motioneval/kfold.h"

#include "motioneval/errors.h"
#include "motioneval/rng.h"

#include <algorithm>
#include <numeric>
#include <string>

namespace motioneval {

namespace {

FoldAssignment split(std::vector<size_t> order, int k, uint64_t seed) {
  const size_t n = order.size();
  if (k < 2 || static_cast<size_t>(k) > n) {
    throw ConfigError("k-fold needs 2 <= k <= n (k=" + std::to_string(k) +
                      ", n=" + std::to_string(n) + ")");
  }
  Rng rng(seed);
  rng.shuffle(order);
  FoldAssignment a;
  a.folds.resize(static_cast<size_t>(k));
  a.foldOf.assign(n, -1);
  const size_t base = n / static_cast<size_t>(k);
  const size_t extra = n % static_cast<size_t>(k);
  size_t pos = 0;
  for (size_t f = 0; f < static_cast<size_t>(k); ++f) {
    const size_t size = base + (f < extra ? 1 : 0);
    for (size_t i = 0; i < size; ++i, ++pos) {
      a.folds[f].push_back(order[pos]);
      a.foldOf[order[pos]] = static_cast<int>(f);
    }
    std::sort(a.folds[f].begin(), a.folds[f].end());
  }
  return a;
}

} // namespace

FoldAssignment kfoldPartition(size_t n, int k, uint64_t seed) {
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  return split(std::move(order), k, seed);
}

FoldAssignment kfoldPartition(std::span<const uint64_t> keys, int k, uint64_t seed) {
  std::vector<size_t> order(keys.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return keys[a] < keys[b]; });
  return split(std::move(order), k, seed);
}

} // namespace motioneval
