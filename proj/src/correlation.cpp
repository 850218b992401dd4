#include "motioneval/correlation.h"

#include "motioneval/errors.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace motioneval {

std::string_view toString(Level level) {
  return level == Level::Sample ? "sample" : "model";
}

std::string_view toString(RatingKind rating) {
  return rating == RatingKind::Naturalness ? "naturalness" : "faithfulness";
}

namespace {

// Modified Lentz evaluation of the incomplete beta continued fraction.
double betaContinuedFraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-16;
  constexpr double kFpMin = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) {
    d = kFpMin;
  }
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) {
      d = kFpMin;
    }
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) {
      c = kFpMin;
    }
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) {
      d = kFpMin;
    }
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) {
      c = kFpMin;
    }
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) {
      return h;
    }
  }
  throw NumericalError("incomplete beta continued fraction did not converge");
}

} // namespace

double regularizedIncompleteBeta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw NumericalError("incomplete beta requires a, b > 0");
  }
  if (x <= 0.0) {
    return 0.0;
  }
  if (x >= 1.0) {
    return 1.0;
  }
  const double lnFront =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(lnFront);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betaContinuedFraction(a, b, x) / a;
  }
  return 1.0 - front * betaContinuedFraction(b, a, 1.0 - x) / b;
}

double studentTwoTailedP(double t, double df) {
  if (!std::isfinite(t)) {
    return 0.0;
  }
  const double x = df / (df + t * t);
  return std::clamp(regularizedIncompleteBeta(0.5 * df, 0.5, x), 0.0, 1.0);
}

std::optional<Correlation> tryPearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw DataError("pearson: series lengths differ (" + std::to_string(x.size()) + " vs " +
                    std::to_string(y.size()) + ")");
  }
  const size_t n = x.size();
  if (n < 3) {
    throw DataError("pearson: need at least 3 points, got " + std::to_string(n));
  }
  double mx = 0.0;
  double my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    return std::nullopt;
  }
  Correlation c;
  c.n = n;
  c.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double df = static_cast<double>(n - 2);
  const double oneMinus = 1.0 - c.r * c.r;
  if (oneMinus <= 0.0) {
    c.pValue = 0.0;
  } else {
    c.pValue = studentTwoTailedP(c.r * std::sqrt(df / oneMinus), df);
  }
  return c;
}

Correlation pearson(std::span<const double> x, std::span<const double> y) {
  auto c = tryPearson(x, y);
  if (!c) {
    throw UndefinedCorrelation("pearson: correlation undefined for a constant series");
  }
  return *c;
}

PairedSeries aggregate(std::span<const std::string> models, std::span<const double> scores,
                       std::span<const double> ratings, Level level) {
  if (models.size() != scores.size() || scores.size() != ratings.size()) {
    throw DataError("aggregate: models, scores and ratings must have equal length");
  }
  PairedSeries out;
  if (level == Level::Sample) {
    out.scores.assign(scores.begin(), scores.end());
    out.ratings.assign(ratings.begin(), ratings.end());
    return out;
  }
  struct Acc {
    double score = 0.0;
    double rating = 0.0;
    size_t n = 0;
  };
  std::map<std::string, Acc> groups;
  for (size_t i = 0; i < models.size(); ++i) {
    auto& g = groups[models[i]];
    g.score += scores[i];
    g.rating += ratings[i];
    ++g.n;
  }
  for (const auto& [name, g] : groups) {
    out.labels.push_back(name);
    out.scores.push_back(g.score / static_cast<double>(g.n));
    out.ratings.push_back(g.rating / static_cast<double>(g.n));
  }
  return out;
}

} // namespace motioneval
