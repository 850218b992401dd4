#pragma once

#include "motioneval/autograd.h"
#include "motioneval/chunking.h"
#include "motioneval/features.h"
#include "motioneval/rng.h"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace motioneval {

struct MoBertConfig {
  int dModel = 256;
  int vocab = 2000;
  int maxContext = 64;
  int nLayers = 3;
  int ffDim = 1024;
  int nHeads = 4;
  int frameDim = feature_layout::kDim;
  int frameHidden = 384;
  int chunkLen = kDefaultChunkLen;
  int chunkOverlap = kDefaultChunkOverlap;
  // [frameHidden * chunkLen, hidden..., dModel]
  std::vector<int> chunkMlpDims = {5376, 5376, 1792, 1024, 256};
  // One GroupNorm after each chunk MLP layer.
  std::vector<int> chunkGroups = {14, 8, 8, 8};
  int frameGroups = 8;
  // [dModel, hidden..., 1]; GroupNorm after every hidden layer.
  std::vector<int> headDims = {256, 128, 128, 1};
  int headGroups = 8;
  double dropoutEncoder = 0.2;
  double dropoutTransformer = 0.1;
  double normEps = 1e-5;

  static MoBertConfig fullSize() { return {}; }
  // d_model 32, two layers; small enough for finite-difference checks and
  // the bundled synthetic task.
  static MoBertConfig reduced();

  // Throws ConfigError on inconsistent widths or group counts.
  void validate() const;

  [[nodiscard]] std::string toJson() const;
  static MoBertConfig fromJson(const std::string& json);
};

struct Parameter {
  std::string name;
  std::vector<int64_t> shape; // 1-D tensors are stored as a 1 x n row
  Eigen::MatrixXd value;

  [[nodiscard]] int64_t numel() const { return value.size(); }
};

struct InitOptions {
  uint64_t seed = 0;
  // Zeroes the last alignment-head layer so every pair scores 0.5.
  bool zeroHeadOutput = false;
};

// Where each part of an assembled sequence sits.
struct SequenceLayout {
  static constexpr int kCls = 0;
  static constexpr int kTextStart = 1;
  static constexpr int kTextBegin = 2;
  int textCount = 0;
  int chunkCount = 0;
  int maxContext = 0;

  [[nodiscard]] int motionStart() const { return kTextBegin + textCount; }
  [[nodiscard]] int chunkBegin() const { return motionStart() + 1; }
  [[nodiscard]] int length() const { return chunkBegin() + chunkCount; }
  [[nodiscard]] int padCount() const { return maxContext - length(); }

  [[nodiscard]] std::vector<int> tokenIds(const std::vector<int>& text) const; // chunk slots hold PAD
  [[nodiscard]] std::vector<int> segmentIds() const;
  [[nodiscard]] std::vector<bool> keyMask() const; // false on PAD
};

// Tape plus mode for one forward computation. Parameters are bound lazily by
// index so a tape only tracks what the graph touches.
class ForwardContext {
 public:
  ForwardContext(bool training, Rng* rng) : training_(training), rng_(rng) {}

  [[nodiscard]] bool training() const { return training_; }
  ag::Tape& tape() { return tape_; }
  Rng& rng();

 private:
  ag::Tape tape_;
  bool training_;
  Rng* rng_;
};

struct SequenceOutput {
  ag::Var states; // maxContext x dModel
  ag::Var logit;  // 1 x 1
  SequenceLayout layout;
};

class MoBertModel {
 public:
  explicit MoBertModel(MoBertConfig config, const InitOptions& init = {});
  // Parameters filled by the caller (checkpoint loading).
  static MoBertModel uninitialized(MoBertConfig config);

  [[nodiscard]] const MoBertConfig& config() const { return config_; }
  [[nodiscard]] const std::vector<Parameter>& parameters() const { return params_; }
  std::vector<Parameter>& parameters() { return params_; }
  [[nodiscard]] int parameterIndex(const std::string& name) const; // -1 if absent
  [[nodiscard]] int64_t parameterCount() const;

  // Non-learned per-feature normalization applied before the frame encoder.
  Eigen::RowVectorXd featureMean;
  Eigen::RowVectorXd featureStd;
  void fitFeatureNormalization(const std::vector<MotionFeatures>& motions);

  // Rounds every parameter and buffer to float32 so a saved checkpoint
  // reloads bit-exactly.
  void roundToFloat32();

  // Throws NumericalError if any parameter is non-finite.
  void checkFinite() const;

  // chunks x dModel. Throws ShapeError if the feature width is not frameDim.
  ag::Var encodeMotion(ForwardContext& ctx, const MotionFeatures& features) const;

  // maxContext x dModel input states. Throws LengthError on overflow.
  ag::Var assemble(ForwardContext& ctx, const std::vector<int>& text, const ag::Var& chunks,
                   SequenceLayout& layout) const;

  // Transformer stack and alignment head over an assembled sequence.
  SequenceOutput run(ForwardContext& ctx, const std::vector<int>& text, const ag::Var& chunks) const;

  [[nodiscard]] static int chunkCountFor(const MoBertConfig& config, int frames);
  // Longest text that still fits beside `chunks` motion chunks.
  [[nodiscard]] int textBudget(int chunks) const;
  // Truncates from the right to the budget.
  [[nodiscard]] std::vector<int> clipText(const std::vector<int>& text, int chunks) const;

 private:
  enum class InitKind { Embedding, LinearWeight, LinearBias, Xavier, Zero, One };

  MoBertModel() = default;
  void registerParameters();
  void initialize(const InitOptions& init);
  ag::Var param(ForwardContext& ctx, int index) const;
  ag::Var param(ForwardContext& ctx, const std::string& name) const;
  ag::Var linearLayer(ForwardContext& ctx, const ag::Var& x, const std::string& prefix) const;
  ag::Var normLayer(ForwardContext& ctx, const ag::Var& x, const std::string& prefix,
                    int groups) const;
  ag::Var dropoutIf(ForwardContext& ctx, const ag::Var& x, double p) const;
  ag::Var transformerLayer(ForwardContext& ctx, const ag::Var& x, int layer,
                           const std::vector<bool>& keyMask) const;
  void checkActivation(const ag::Var& v, const std::string& where) const;

  MoBertConfig config_;
  std::vector<Parameter> params_;
  std::unordered_map<std::string, int> index_;
  std::vector<InitKind> initKinds_;
};

// Eval-mode pairing result.
struct PairResult {
  double logit = 0.0;
  double probability = 0.5;
  Eigen::MatrixXd states; // output embeddings, maxContext x dModel
  SequenceLayout layout;
};

struct PairInput {
  const MotionFeatures* motion = nullptr;
  std::vector<int> text; // empty in text-free mode
};

// Eval-mode forward over a batch; sequences are independent so results do
// not depend on batch order.
std::vector<PairResult> forwardEval(const MoBertModel& model, const std::vector<PairInput>& batch);
PairResult forwardEval(const MoBertModel& model, const MotionFeatures& motion,
                       const std::vector<int>& text);

} // namespace motioneval
