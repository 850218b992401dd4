#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace motioneval {

enum class Level { Sample, Model };
enum class RatingKind { Naturalness, Faithfulness };

std::string_view toString(Level level);
std::string_view toString(RatingKind rating);

struct Correlation {
  double r = 0.0;
  double pValue = 1.0; // two-tailed
  size_t n = 0;
};

// Regularized incomplete beta function I_x(a, b), continued-fraction evaluation.
double regularizedIncompleteBeta(double a, double b, double x);

// Two-tailed p-value of Student's t statistic with df degrees of freedom.
double studentTwoTailedP(double t, double df);

// Product-moment correlation with a t-test p-value (n - 2 dof).
// Throws DataError for n < 3 or mismatched lengths and UndefinedCorrelation
// when either series is constant.
Correlation pearson(std::span<const double> x, std::span<const double> y);

// As pearson(), but a constant series yields nullopt instead of throwing.
std::optional<Correlation> tryPearson(std::span<const double> x, std::span<const double> y);

// Scores paired with ratings, one point per sample or per model.
struct PairedSeries {
  std::vector<double> scores;
  std::vector<double> ratings;
  std::vector<std::string> labels; // model names at model level, empty otherwise
};

// Model level averages score and rating per model name (models in sorted order).
PairedSeries aggregate(std::span<const std::string> models, std::span<const double> scores,
                       std::span<const double> ratings, Level level);

} // namespace motioneval
