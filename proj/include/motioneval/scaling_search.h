#pragma once

#include "motioneval/ce_metrics.h"
#include "motioneval/correlation.h"

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace motioneval {

inline constexpr int kRootScaleMinExponent = -15;
inline constexpr int kRootScaleMaxExponent = 14;
inline constexpr int kComponentMinExponent = 0;
inline constexpr int kComponentMaxExponent = 9;

struct RatedPair {
  MotionSequence reference;
  MotionSequence generated;
  std::string model;
  double naturalness = 0.0;
  double faithfulness = 0.0;
};

// Index into SearchCell::correlations.
constexpr size_t correlationSlot(RatingKind rating, Level level) {
  return static_cast<size_t>(rating) * 2 + static_cast<size_t>(level);
}

// One grid point of a search. Correlations are nullopt where undefined
// (constant scores, or fewer than 3 points at that level).
struct SearchCell {
  int rootExponent = 0;
  std::array<int, 3> weightExponents = {0, 0, 0};
  CeConfig config;
  std::vector<double> scores; // per sample
  std::array<std::optional<Correlation>, 4> correlations;
};

struct SearchResult {
  std::vector<SearchCell> cells;
  // Per (rating, level) slot: index of the cell with the largest |r|, ties
  // going to the earlier cell. nullopt if every cell is undefined there.
  std::array<std::optional<size_t>, 4> best;
};

// Returns the correlations of one score vector against both ratings at both levels.
std::array<std::optional<Correlation>, 4> correlateScores(const std::vector<RatedPair>& dataset,
                                                          const std::vector<double>& scores);

// Evaluates cfg at rootScale = 2^e for e in [-15, 14] (30 cells).
// Throws DataError for fewer than 3 samples.
SearchResult rootScalingSearch(const std::vector<RatedPair>& dataset, const CeConfig& base);

// Full Cartesian grid of component weights 2^0..2^9: 100 cells for PV,
// 1000 for PVA. The base config's grouping, kind and root scale are kept.
SearchResult componentScalingSearch(const std::vector<RatedPair>& dataset, const CeConfig& base);

// Columns: root_exponent,root_scale,w_position,w_velocity,w_acceleration,
// rating,level,n,pearson_r,p_value (NA where undefined).
void writeSearchCsv(std::ostream& out, const SearchResult& result);

} // namespace motioneval
