#pragma once

#include "motioneval/bpe.h"
#include "motioneval/features.h"
#include "motioneval/mobert_model.h"
#include "motioneval/rng.h"
#include "motioneval/similarity.h"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace motioneval {

enum class LossKind {
  Weighted, // L_f: contrastive BCE as a (1 - alpha)-weighted mean
  Balanced, // L2: plain means
};

LossKind parseLossKind(const std::string& s);
std::string toString(LossKind k);

struct TrainingSample {
  MotionFeatures features;
  std::string text;
};

// Indices into the training corpus with one contrastive text per motion.
struct TrainingBatch {
  std::vector<int> motions;
  std::vector<std::vector<int>> validTexts;
  std::vector<std::vector<int>> contrastiveTexts;
  std::vector<double> alpha;
};

struct BatchLoss {
  double valid = 0.0;              // H(V)
  double contrastive = 0.0;        // H(R), plain mean
  double weightedContrastive = 0.0; // H_w(R); equals `contrastive` for Balanced
  double total = 0.0;              // L_f or L2
  std::vector<double> validLogits;
  std::vector<double> contrastiveLogits;
};

// Loss of one batch, both pairings per motion sharing a single motion
// encoding. With `gradients`, also runs the backward pass; the result is
// indexed like model.parameters() (empty matrix for untouched parameters).
// Throws DegenerateBatchError for Weighted loss when every alpha is 1.
BatchLoss batchLoss(const MoBertModel& model, const std::vector<const MotionFeatures*>& motions,
                    const TrainingBatch& batch, LossKind loss, bool training, Rng* rng,
                    std::vector<Eigen::MatrixXd>* gradients = nullptr);

struct AdamOptions {
  double learningRate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double gradClip = 1.0; // global L2 norm; <= 0 disables
};

class Adam {
 public:
  Adam(const std::vector<Parameter>& params, AdamOptions options);
  // Missing (empty) gradients count as zero.
  void step(std::vector<Parameter>& params, std::vector<Eigen::MatrixXd>& gradients);

 private:
  AdamOptions options_;
  std::vector<Eigen::MatrixXd> m_;
  std::vector<Eigen::MatrixXd> v_;
  int64_t t_ = 0;
};

struct TrainingOptions {
  int epochs = 20;
  int batchSize = 32;
  AdamOptions adam;
  uint64_t seed = 0;
  LossKind loss = LossKind::Weighted;
  bool dropout = true;
  bool fitNormalization = true;
  double divergenceFactor = 10.0;
  int divergencePatience = 3;
};

struct EpochStats {
  double validLoss = 0.0;
  double contrastiveLoss = 0.0;
  double weightedContrastiveLoss = 0.0;
  double totalLoss = 0.0;
  int batches = 0;
  int skippedBatches = 0;
};

struct TrainingResult {
  std::vector<EpochStats> history;
  int skippedBatches = 0;
};

// Random other sample's text, preferring one whose string differs.
int pickContrastive(int self, const std::vector<std::string>& texts, Rng& rng);

// Minimizes L_f (or L2) with Adam. Per-epoch means are over non-skipped
// batches. Parameters are rounded to float32 at the end so checkpoints
// reload exactly. Throws TrainingError when the loss exceeds
// divergenceFactor x the first epoch for divergencePatience epochs in a row,
// and ConfigError when the vocabulary is larger than the model's table.
TrainingResult train(MoBertModel& model, const BpeVocab& vocab,
                     const std::vector<TrainingSample>& corpus,
                     const SimilarityProvider& similarity, const TrainingOptions& options,
                     const std::function<void(int, const EpochStats&)>& onEpoch = {});

} // namespace motioneval
