#include "motioneval/mobert_train.h"

#include "motioneval/errors.h"
#include "motioneval/mobert_loss.h"

#include <cmath>
#include <numeric>

namespace motioneval {

LossKind parseLossKind(const std::string& s) {
  if (s == "weighted") return LossKind::Weighted;
  if (s == "balanced") return LossKind::Balanced;
  throw ConfigError("unknown loss '" + s + "' (expected weighted or balanced)");
}

std::string toString(LossKind k) {
  return k == LossKind::Weighted ? "weighted" : "balanced";
}

BatchLoss batchLoss(const MoBertModel& model, const std::vector<const MotionFeatures*>& motions,
                    const TrainingBatch& batch, LossKind loss, bool training, Rng* rng,
                    std::vector<Eigen::MatrixXd>* gradients) {
  const size_t n = batch.motions.size();
  if (n == 0 || batch.validTexts.size() != n || batch.contrastiveTexts.size() != n ||
      batch.alpha.size() != n) {
    throw ShapeError("training batch fields must be non-empty and equally long");
  }
  std::vector<double> weights(n);
  for (size_t i = 0; i < n; ++i) {
    if (!(batch.alpha[i] >= 0.0 && batch.alpha[i] <= 1.0)) {
      throw DataError("similarity alpha must lie in [0, 1]");
    }
    weights[i] = contrastiveWeight(batch.alpha[i]);
  }

  ForwardContext ctx(training, rng);
  std::vector<ag::Var> valid;
  std::vector<ag::Var> contrast;
  for (size_t i = 0; i < n; ++i) {
    const auto* motion = motions.at(static_cast<size_t>(batch.motions[i]));
    const ag::Var chunks = model.encodeMotion(ctx, *motion);
    valid.push_back(model.run(ctx, batch.validTexts[i], chunks).logit);
    contrast.push_back(model.run(ctx, batch.contrastiveTexts[i], chunks).logit);
  }
  const ag::Var validLogits = ag::concatRows(valid);
  const ag::Var contrastLogits = ag::concatRows(contrast);
  const std::vector<double> ones(n, 1.0);
  const std::vector<double> zeros(n, 0.0);
  const ag::Var hv = ag::bceWithLogits(validLogits, ones);
  const ag::Var hr = loss == LossKind::Weighted ? ag::bceWithLogits(contrastLogits, zeros, weights)
                                                : ag::bceWithLogits(contrastLogits, zeros);
  const ag::Var total = ag::hypot2(hv, hr);

  BatchLoss out;
  out.valid = hv.value()(0, 0);
  out.weightedContrastive = hr.value()(0, 0);
  out.total = total.value()(0, 0);
  for (size_t i = 0; i < n; ++i) {
    out.validLogits.push_back(validLogits.value()(static_cast<Eigen::Index>(i), 0));
    out.contrastiveLogits.push_back(contrastLogits.value()(static_cast<Eigen::Index>(i), 0));
  }
  out.contrastive = bceGroup(out.contrastiveLogits, zeros);

  if (gradients != nullptr) {
    ctx.tape().backward(total);
    const auto& params = model.parameters();
    gradients->assign(params.size(), Eigen::MatrixXd());
    for (size_t k = 0; k < params.size(); ++k) {
      if (const auto* g = ctx.tape().gradient(static_cast<int>(k))) {
        (*gradients)[k] = *g;
      }
    }
  }
  return out;
}

Adam::Adam(const std::vector<Parameter>& params, AdamOptions options) : options_(options) {
  for (const auto& p : params) {
    m_.push_back(Eigen::MatrixXd::Zero(p.value.rows(), p.value.cols()));
    v_.push_back(Eigen::MatrixXd::Zero(p.value.rows(), p.value.cols()));
  }
}

void Adam::step(std::vector<Parameter>& params, std::vector<Eigen::MatrixXd>& gradients) {
  if (gradients.size() != params.size()) {
    throw ShapeError("Adam: one gradient slot per parameter required");
  }
  double sq = 0.0;
  for (const auto& g : gradients) {
    if (g.size() != 0) sq += g.squaredNorm();
  }
  const double norm = std::sqrt(sq);
  if (!std::isfinite(norm)) {
    throw NumericalError("non-finite gradient");
  }
  const double clip = options_.gradClip > 0 && norm > options_.gradClip ? options_.gradClip / norm : 1.0;
  ++t_;
  const double c1 = 1.0 - std::pow(options_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(options_.beta2, static_cast<double>(t_));
  for (size_t k = 0; k < params.size(); ++k) {
    auto& m = m_[k];
    auto& v = v_[k];
    if (gradients[k].size() == 0) {
      m *= options_.beta1;
      v *= options_.beta2;
    } else {
      const Eigen::MatrixXd g = gradients[k] * clip;
      m = options_.beta1 * m + (1.0 - options_.beta1) * g;
      v = options_.beta2 * v + (1.0 - options_.beta2) * g.cwiseProduct(g);
    }
    params[k].value.array() -=
        options_.learningRate * (m.array() / c1) / ((v.array() / c2).sqrt() + options_.eps);
  }
}

int pickContrastive(int self, const std::vector<std::string>& texts, Rng& rng) {
  const auto n = static_cast<int>(texts.size());
  if (n < 2) {
    throw DataError("contrastive sampling needs at least two samples");
  }
  int pick = 0;
  for (int attempt = 0; attempt < 16; ++attempt) {
    pick = static_cast<int>(rng.index(static_cast<uint64_t>(n - 1)));
    if (pick >= self) ++pick;
    if (texts[static_cast<size_t>(pick)] != texts[static_cast<size_t>(self)]) break;
  }
  return pick;
}

TrainingResult train(MoBertModel& model, const BpeVocab& vocab,
                     const std::vector<TrainingSample>& corpus,
                     const SimilarityProvider& similarity, const TrainingOptions& options,
                     const std::function<void(int, const EpochStats&)>& onEpoch) {
  if (corpus.size() < 2) {
    throw DataError("training needs at least two samples");
  }
  if (vocab.size() > model.config().vocab) {
    throw ConfigError("vocabulary of " + std::to_string(vocab.size()) +
                      " tokens exceeds the model's embedding table of " +
                      std::to_string(model.config().vocab));
  }
  if (options.epochs < 1 || options.batchSize < 1) {
    throw ConfigError("epochs and batch size must be positive");
  }

  std::vector<const MotionFeatures*> motions;
  std::vector<std::string> texts;
  std::vector<std::vector<int>> encoded;
  for (const auto& s : corpus) {
    motions.push_back(&s.features);
    texts.push_back(normalizeText(s.text));
    const int chunks = MoBertModel::chunkCountFor(model.config(), static_cast<int>(s.features.frameCount()));
    encoded.push_back(model.clipText(vocab.encode(s.text), chunks));
  }
  if (options.fitNormalization) {
    std::vector<MotionFeatures> all;
    all.reserve(corpus.size());
    for (const auto& s : corpus) all.push_back(s.features);
    model.fitFeatureNormalization(all);
  }

  Rng rng(options.seed);
  Adam adam(model.parameters(), options.adam);
  TrainingResult result;
  std::vector<int> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  double initial = 0.0;
  int overCount = 0;
  std::vector<Eigen::MatrixXd> grads;

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    rng.shuffle(order);
    EpochStats stats;
    for (size_t start = 0; start < order.size(); start += static_cast<size_t>(options.batchSize)) {
      const size_t end = std::min(order.size(), start + static_cast<size_t>(options.batchSize));
      TrainingBatch batch;
      for (size_t k = start; k < end; ++k) {
        const int i = order[k];
        const int j = pickContrastive(i, texts, rng);
        batch.motions.push_back(i);
        batch.validTexts.push_back(encoded[static_cast<size_t>(i)]);
        const int chunks = MoBertModel::chunkCountFor(
            model.config(), static_cast<int>(motions[static_cast<size_t>(i)]->frameCount()));
        batch.contrastiveTexts.push_back(model.clipText(encoded[static_cast<size_t>(j)], chunks));
        batch.alpha.push_back(similarity.similarity(texts[static_cast<size_t>(i)], texts[static_cast<size_t>(j)]));
      }
      BatchLoss bl;
      try {
        bl = batchLoss(model, motions, batch, options.loss, options.dropout, &rng, &grads);
      } catch (const DegenerateBatchError&) {
        ++stats.skippedBatches;
        continue;
      }
      if (!std::isfinite(bl.total)) {
        throw TrainingError("loss became non-finite in epoch " + std::to_string(epoch));
      }
      adam.step(model.parameters(), grads);
      stats.validLoss += bl.valid;
      stats.contrastiveLoss += bl.contrastive;
      stats.weightedContrastiveLoss += bl.weightedContrastive;
      stats.totalLoss += bl.total;
      ++stats.batches;
    }
    if (stats.batches > 0) {
      const double b = stats.batches;
      stats.validLoss /= b;
      stats.contrastiveLoss /= b;
      stats.weightedContrastiveLoss /= b;
      stats.totalLoss /= b;
    }
    result.skippedBatches += stats.skippedBatches;
    result.history.push_back(stats);
    if (onEpoch) onEpoch(epoch, stats);

    if (stats.batches == 0) continue;
    if (initial == 0.0) {
      initial = stats.totalLoss;
    } else if (stats.totalLoss > options.divergenceFactor * initial) {
      if (++overCount >= options.divergencePatience) {
        throw TrainingError("training diverged: loss " + std::to_string(stats.totalLoss) +
                            " exceeded " + std::to_string(options.divergenceFactor) +
                            "x the initial loss for " + std::to_string(overCount) + " epochs");
      }
    } else {
      overCount = 0;
    }
  }
  model.roundToFloat32();
  model.checkFinite();
  return result;
}

} // namespace motioneval
