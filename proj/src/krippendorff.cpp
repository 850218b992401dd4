#include "motioneval/krippendorff.h"

#include "motioneval/errors.h"

namespace motioneval {

double krippendorffAlphaInterval(const RatingMatrix& ratings) {
  if (ratings.empty()) {
    throw DataError("krippendorff: empty rating matrix");
  }
  const size_t items = ratings.front().size();
  for (const auto& rater : ratings) {
    if (rater.size() != items) {
      throw DataError("krippendorff: raters have differing item counts");
    }
  }

  // Observed disagreement accumulates within-unit ordered-pair distances
  // weighted by 1 / (m_u - 1); expected disagreement uses all pairable values.
  double observed = 0.0;
  double sum = 0.0;
  double sumSq = 0.0;
  double n = 0.0;
  size_t pairableUnits = 0;
  std::vector<double> values;
  for (size_t u = 0; u < items; ++u) {
    values.clear();
    for (const auto& rater : ratings) {
      if (rater[u]) {
        values.push_back(*rater[u]);
      }
    }
    const size_t m = values.size();
    if (m < 2) {
      continue;
    }
    ++pairableUnits;
    double within = 0.0;
    for (size_t a = 0; a < m; ++a) {
      for (size_t b = a + 1; b < m; ++b) {
        const double d = values[a] - values[b];
        within += 2.0 * d * d;
      }
    }
    observed += within / static_cast<double>(m - 1);
    for (double v : values) {
      sum += v;
      sumSq += v * v;
    }
    n += static_cast<double>(m);
  }
  if (pairableUnits < 2) {
    throw DataError("krippendorff: need at least 2 items with 2 or more ratings");
  }
  const double dObserved = observed / n;
  const double allPairs = 2.0 * n * sumSq - 2.0 * sum * sum;
  const double dExpected = allPairs / (n * (n - 1.0));
  if (dExpected <= 0.0) {
    return 1.0;
  }
  return 1.0 - dObserved / dExpected;
}

} // namespace motioneval
