#include "motioneval/mobert_score.h"

#include "motioneval/errors.h"

namespace motioneval {

ScoreMode parseScoreMode(const std::string& s) {
  if (s == "alignment") return ScoreMode::Alignment;
  if (s == "svr") return ScoreMode::Svr;
  if (s == "ridge") return ScoreMode::Ridge;
  throw ConfigError("unknown score mode '" + s + "' (expected alignment, svr or ridge)");
}

std::string toString(ScoreMode m) {
  switch (m) {
    case ScoreMode::Alignment: return "alignment";
    case ScoreMode::Svr: return "svr";
    case ScoreMode::Ridge: return "ridge";
  }
  return "?";
}

Eigen::VectorXd regressionFeatures(const PairResult& result) {
  const auto& s = result.states;
  const auto& lay = result.layout;
  const Eigen::Index d = s.cols();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(3 * d);
  f.head(d) = s.row(SequenceLayout::kCls).transpose();
  if (lay.textCount > 0) {
    f.segment(d, d) = s.middleRows(SequenceLayout::kTextBegin, lay.textCount).colwise().maxCoeff().transpose();
  }
  f.tail(d) = s.middleRows(lay.chunkBegin(), lay.chunkCount).colwise().maxCoeff().transpose();
  return f;
}

Eigen::VectorXd extractRegressionFeatures(const MoBertModel& model, const MotionFeatures& motion,
                                          const std::vector<int>& text) {
  return regressionFeatures(forwardEval(model, motion, text));
}

std::vector<int> prepareText(const MoBertModel& model, const BpeVocab& vocab,
                             const std::string& text, int frames) {
  return model.clipText(vocab.encode(text), MoBertModel::chunkCountFor(model.config(), frames));
}

double score(const MoBertModel& model, const RegressionHead* head, ScoreMode mode,
             const MotionFeatures& motion, const std::optional<std::vector<int>>& text) {
  static const std::vector<int> kNoText;
  const std::vector<int>& ids = text ? *text : kNoText;
  if (mode == ScoreMode::Alignment) {
    return forwardEval(model, motion, ids).probability;
  }
  if (head == nullptr) {
    throw ConfigError("regression score mode '" + toString(mode) + "' needs a fitted head");
  }
  const RegressionKind want = mode == ScoreMode::Svr ? RegressionKind::RbfSvr : RegressionKind::LinearRidge;
  if (head->kind() != want) {
    throw ConfigError("score mode '" + toString(mode) + "' does not match a " +
                      toString(head->kind()) + " head");
  }
  return head->predict(extractRegressionFeatures(model, motion, ids));
}

} // namespace motioneval
