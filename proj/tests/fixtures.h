#pragma once

#include "motioneval/ratings.h"
#include "motioneval/scaling_search.h"

#include "test_util.h"

#include <algorithm>

namespace motioneval::testing {

// Random reference/generated pairs spread over the five rated models, with
// ratings that loosely track the generated motion's deviation.
inline std::vector<RatedPair> ratedDataset(uint64_t seed, int perModel, size_t frames = 12) {
  Rng rng(seed);
  std::vector<RatedPair> out;
  for (int i = 0; i < perModel; ++i) {
    for (const auto model : kModelNames) {
      const MotionSequence ref = randomMotion(rng, frames, 0.5);
      std::vector<Pose> gen = ref.frames();
      const double noise = rng.uniform(0.01, 0.4);
      for (auto& p : gen) {
        for (int j = 0; j < kNumJoints; ++j) {
          for (int a = 0; a < 3; ++a) {
            p(j, a) += rng.normal(0.0, noise);
          }
        }
      }
      RatedPair pair{ref, MotionSequence(gen), std::string(model), 0.0, 0.0};
      pair.naturalness = std::clamp(4.0 - 8.0 * noise + rng.normal(0.0, 0.5), 0.0, 4.0);
      pair.faithfulness = std::clamp(3.5 - 6.0 * noise + rng.normal(0.0, 0.5), 0.0, 4.0);
      out.push_back(std::move(pair));
    }
  }
  return out;
}

} // namespace motioneval::testing
