#include "motioneval/scaling_search.h"

#include "motioneval/errors.h"

#include <cmath>
#include <iomanip>

namespace motioneval {

namespace {

void checkDataset(const std::vector<RatedPair>& dataset) {
  if (dataset.size() < 3) {
    throw DataError("scaling search needs at least 3 rated samples, got " +
                    std::to_string(dataset.size()));
  }
}

std::array<std::optional<size_t>, 4> pickBest(const std::vector<SearchCell>& cells) {
  std::array<std::optional<size_t>, 4> best;
  for (size_t slot = 0; slot < 4; ++slot) {
    double bestAbs = -1.0;
    for (size_t i = 0; i < cells.size(); ++i) {
      const auto& c = cells[i].correlations[slot];
      if (c && std::abs(c->r) > bestAbs) {
        bestAbs = std::abs(c->r);
        best[slot] = i;
      }
    }
  }
  return best;
}

} // namespace

std::array<std::optional<Correlation>, 4> correlateScores(const std::vector<RatedPair>& dataset,
                                                          const std::vector<double>& scores) {
  std::vector<std::string> models;
  std::vector<double> nat;
  std::vector<double> faith;
  for (const auto& d : dataset) {
    models.push_back(d.model);
    nat.push_back(d.naturalness);
    faith.push_back(d.faithfulness);
  }
  std::array<std::optional<Correlation>, 4> out;
  for (auto rating : {RatingKind::Naturalness, RatingKind::Faithfulness}) {
    const auto& ratings = rating == RatingKind::Naturalness ? nat : faith;
    for (auto level : {Level::Sample, Level::Model}) {
      const auto series = aggregate(models, scores, ratings, level);
      if (series.scores.size() >= 3) {
        out[correlationSlot(rating, level)] = tryPearson(series.scores, series.ratings);
      }
    }
  }
  return out;
}

SearchResult rootScalingSearch(const std::vector<RatedPair>& dataset, const CeConfig& base) {
  checkDataset(dataset);
  SearchResult result;
  for (int e = kRootScaleMinExponent; e <= kRootScaleMaxExponent; ++e) {
    SearchCell cell;
    cell.rootExponent = e;
    cell.config = base;
    cell.config.rootScale = std::ldexp(1.0, e);
    cell.scores.reserve(dataset.size());
    for (const auto& d : dataset) {
      cell.scores.push_back(ceScore(d.reference, d.generated, cell.config));
    }
    cell.correlations = correlateScores(dataset, cell.scores);
    result.cells.push_back(std::move(cell));
  }
  result.best = pickBest(result.cells);
  return result;
}

SearchResult componentScalingSearch(const std::vector<RatedPair>& dataset, const CeConfig& base) {
  checkDataset(dataset);
  if (base.component != CeComponent::PV && base.component != CeComponent::PVA) {
    throw ConfigError("component search requires a PV or PVA config");
  }
  const bool withAcc = base.component == CeComponent::PVA;

  // Single-component scores are weight independent; compute them once.
  std::vector<std::array<double, 3>> parts;
  parts.reserve(dataset.size());
  for (const auto& d : dataset) {
    CeConfig s = base;
    std::array<double, 3> p = {0.0, 0.0, 0.0};
    s.component = CeComponent::Position;
    p[0] = ceScore(d.reference, d.generated, s);
    s.component = CeComponent::Velocity;
    p[1] = ceScore(d.reference, d.generated, s);
    if (withAcc) {
      s.component = CeComponent::Acceleration;
      p[2] = ceScore(d.reference, d.generated, s);
    }
    parts.push_back(p);
  }

  SearchResult result;
  const int accMax = withAcc ? kComponentMaxExponent : kComponentMinExponent;
  for (int ep = kComponentMinExponent; ep <= kComponentMaxExponent; ++ep) {
    for (int ev = kComponentMinExponent; ev <= kComponentMaxExponent; ++ev) {
      for (int ea = kComponentMinExponent; ea <= accMax; ++ea) {
        SearchCell cell;
        cell.rootExponent = static_cast<int>(std::round(std::log2(base.rootScale)));
        cell.weightExponents = {ep, ev, ea};
        cell.config = base;
        cell.config.weights = {std::ldexp(1.0, ep), std::ldexp(1.0, ev),
                               withAcc ? std::ldexp(1.0, ea) : ComponentWeights{}.acceleration};
        const auto& w = cell.config.weights;
        cell.scores.reserve(parts.size());
        for (const auto& p : parts) {
          // Same association order as combinedCe.
          double s = w.position * p[0] + w.velocity * p[1];
          if (withAcc) {
            s += w.acceleration * p[2];
          }
          cell.scores.push_back(s);
        }
        cell.correlations = correlateScores(dataset, cell.scores);
        result.cells.push_back(std::move(cell));
      }
    }
  }
  result.best = pickBest(result.cells);
  return result;
}

void writeSearchCsv(std::ostream& out, const SearchResult& result) {
  out << "root_exponent,root_scale,w_position,w_velocity,w_acceleration,rating,level,n,"
         "pearson_r,p_value\n";
  out << std::setprecision(17);
  for (const auto& cell : result.cells) {
    for (auto rating : {RatingKind::Naturalness, RatingKind::Faithfulness}) {
      for (auto level : {Level::Sample, Level::Model}) {
        const auto& c = cell.correlations[correlationSlot(rating, level)];
        out << cell.rootExponent << ',' << cell.config.rootScale << ','
            << cell.config.weights.position << ',' << cell.config.weights.velocity << ','
            << cell.config.weights.acceleration << ',' << toString(rating) << ','
            << toString(level) << ',';
        if (c) {
          out << c->n << ',' << c->r << ',' << c->pValue << '\n';
        } else {
          out << "NA,NA,NA\n";
        }
      }
    }
  }
}

} // namespace motioneval
