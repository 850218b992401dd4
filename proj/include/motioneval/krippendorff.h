#pragma once

#include <optional>
#include <vector>

namespace motioneval {

// raters x items; nullopt marks a missing rating.
using RatingMatrix = std::vector<std::vector<std::optional<double>>>;

// Interval-metric Krippendorff's alpha, 1 - D_o / D_e with squared-difference
// distance. Items with fewer than two ratings are not pairable and are
// skipped. Returns 1.0 when all pairable values are identical. Throws
// DataError when fewer than two items are pairable.
double krippendorffAlphaInterval(const RatingMatrix& ratings);

} // namespace motioneval
