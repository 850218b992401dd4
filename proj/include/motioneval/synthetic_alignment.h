#pragma once

#include "motioneval/bpe.h"
#include "motioneval/mobert_model.h"
#include "motioneval/mobert_train.h"
#include "motioneval/synthetic.h"

#include <cstdint>
#include <optional>

namespace motioneval {

inline constexpr double kSyntheticAccuracyGate = 0.9;
inline constexpr double kSyntheticGapGate = 0.3;

struct SyntheticAlignmentOptions {
  int trainPerClass = 24;
  int heldOutPerClass = 8;
  uint64_t seed = 7;
  MoBertConfig config = MoBertConfig::reduced();
  TrainingOptions training = defaultTraining();
  synthetic::WalkOptions walk;

  static TrainingOptions defaultTraining();
};

struct SyntheticAlignmentResult {
  MoBertModel model;
  BpeVocab vocab;
  TrainingResult training;
  double accuracy = 0.0;      // held-out, over matched and mismatched pairs
  double matchedMean = 0.0;   // mean alignment probability of matched pairs
  double mismatchedMean = 0.0;

  [[nodiscard]] double gap() const { return matchedMean - mismatchedMean; }
  [[nodiscard]] bool passes() const {
    return accuracy >= kSyntheticAccuracyGate && gap() >= kSyntheticGapGate;
  }
};

// Trains MoBERT on the 8-direction walking task and scores held-out clips
// against their own caption and against a caption of a different direction.
SyntheticAlignmentResult runSyntheticAlignment(const SyntheticAlignmentOptions& options = {});

} // namespace motioneval
