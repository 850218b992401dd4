#pragma once

#include "motioneval/bpe.h"
#include "motioneval/mobert_model.h"
#include "motioneval/regression.h"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace motioneval {

enum class ScoreMode { Alignment, Svr, Ridge };

ScoreMode parseScoreMode(const std::string& s);
std::string toString(ScoreMode m);

// [CLS ; per-dim max over text outputs ; per-dim max over chunk outputs],
// 3 * d_model wide. The text slice is zero when there is no text.
Eigen::VectorXd regressionFeatures(const PairResult& result);
Eigen::VectorXd extractRegressionFeatures(const MoBertModel& model, const MotionFeatures& motion,
                                          const std::vector<int>& text);

// Encodes and right-clips a description for a motion of `frames` frames.
std::vector<int> prepareText(const MoBertModel& model, const BpeVocab& vocab,
                             const std::string& text, int frames);

// Alignment mode returns sigmoid(logit); regression modes the head's
// prediction over extractRegressionFeatures(). No text means text-free.
// Throws ConfigError when a regression mode has no head or the head kind
// does not match.
double score(const MoBertModel& model, const RegressionHead* head, ScoreMode mode,
             const MotionFeatures& motion, const std::optional<std::vector<int>>& text);

} // namespace motioneval
