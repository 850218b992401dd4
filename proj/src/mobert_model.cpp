#include "motioneval/mobert_model.h"

#include "motioneval/bpe.h"
#include "motioneval/errors.h"
#include "motioneval/mobert_loss.h"

#include "json.hpp"

#include <cmath>
#include <numeric>

namespace motioneval {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) {
    throw ConfigError("MoBERT config: " + what);
  }
}

std::string layerName(const std::string& module, int index) {
  return module + "." + std::to_string(index);
}

} // namespace

MoBertConfig MoBertConfig::reduced() {
  MoBertConfig c;
  c.dModel = 32;
  c.vocab = 128;
  c.nLayers = 2;
  c.ffDim = 64;
  c.nHeads = 4;
  c.frameHidden = 16;
  c.frameGroups = 4;
  c.chunkMlpDims = {224, 224, 112, 64, 32};
  c.chunkGroups = {14, 8, 8, 8};
  c.headDims = {32, 16, 16, 1};
  c.headGroups = 4;
  return c;
}

void MoBertConfig::validate() const {
  require(dModel > 0 && nHeads > 0 && dModel % nHeads == 0, "d_model must be a multiple of n_heads");
  require(vocab > BpeVocab::kNumSpecials, "vocab must exceed the special tokens");
  require(maxContext >= 4, "max_context must hold the three specials and one chunk");
  require(nLayers >= 1 && ffDim >= 1, "need at least one layer and a positive ff width");
  require(frameDim > 0 && frameHidden > 0, "frame widths must be positive");
  require(frameGroups > 0 && frameHidden % frameGroups == 0,
          "frame GroupNorm groups must divide frame_hidden");
  require(chunkLen > chunkOverlap && chunkOverlap >= 0, "need chunk_len > overlap >= 0");
  require(chunkMlpDims.size() >= 2, "chunk MLP needs input and output widths");
  require(chunkMlpDims.front() == frameHidden * chunkLen,
          "chunk MLP input must equal frame_hidden x chunk_len (" +
              std::to_string(frameHidden * chunkLen) + ")");
  require(chunkMlpDims.back() == dModel, "chunk MLP output must equal d_model");
  require(chunkGroups.size() + 1 == chunkMlpDims.size(), "one GroupNorm per chunk MLP layer");
  for (size_t i = 0; i < chunkGroups.size(); ++i) {
    require(chunkGroups[i] > 0 && chunkMlpDims[i + 1] % chunkGroups[i] == 0,
            "chunk GroupNorm " + std::to_string(i) + " groups must divide width " +
                std::to_string(chunkMlpDims[i + 1]));
  }
  require(headDims.size() >= 2 && headDims.front() == dModel && headDims.back() == 1,
          "alignment head must map d_model to one logit");
  for (size_t i = 1; i + 1 < headDims.size(); ++i) {
    require(headGroups > 0 && headDims[i] % headGroups == 0,
            "head GroupNorm groups must divide width " + std::to_string(headDims[i]));
  }
  require(dropoutEncoder >= 0 && dropoutEncoder < 1 && dropoutTransformer >= 0 &&
              dropoutTransformer < 1,
          "dropout must be in [0, 1)");
  require(normEps > 0, "norm eps must be positive");
}

std::string MoBertConfig::toJson() const {
  nlohmann::json j = {
      {"d_model", dModel},
      {"vocab", vocab},
      {"max_context", maxContext},
      {"n_layers", nLayers},
      {"ff_dim", ffDim},
      {"n_heads", nHeads},
      {"frame_dim", frameDim},
      {"frame_hidden", frameHidden},
      {"chunk_len", chunkLen},
      {"chunk_overlap", chunkOverlap},
      {"chunk_mlp_dims", chunkMlpDims},
      {"chunk_groups", chunkGroups},
      {"frame_groups", frameGroups},
      {"head_dims", headDims},
      {"head_groups", headGroups},
      {"dropout_encoder", dropoutEncoder},
      {"dropout_transformer", dropoutTransformer},
      {"norm_eps", normEps},
  };
  return j.dump();
}

MoBertConfig MoBertConfig::fromJson(const std::string& json) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("MoBERT config is not valid JSON: ") + e.what());
  }
  MoBertConfig c;
  try {
    c.dModel = j.value("d_model", c.dModel);
    c.vocab = j.value("vocab", c.vocab);
    c.maxContext = j.value("max_context", c.maxContext);
    c.nLayers = j.value("n_layers", c.nLayers);
    c.ffDim = j.value("ff_dim", c.ffDim);
    c.nHeads = j.value("n_heads", c.nHeads);
    c.frameDim = j.value("frame_dim", c.frameDim);
    c.frameHidden = j.value("frame_hidden", c.frameHidden);
    c.chunkLen = j.value("chunk_len", c.chunkLen);
    c.chunkOverlap = j.value("chunk_overlap", c.chunkOverlap);
    c.chunkMlpDims = j.value("chunk_mlp_dims", c.chunkMlpDims);
    c.chunkGroups = j.value("chunk_groups", c.chunkGroups);
    c.frameGroups = j.value("frame_groups", c.frameGroups);
    c.headDims = j.value("head_dims", c.headDims);
    c.headGroups = j.value("head_groups", c.headGroups);
    c.dropoutEncoder = j.value("dropout_encoder", c.dropoutEncoder);
    c.dropoutTransformer = j.value("dropout_transformer", c.dropoutTransformer);
    c.normEps = j.value("norm_eps", c.normEps);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("MoBERT config field has the wrong type: ") + e.what());
  }
  c.validate();
  return c;
}

std::vector<int> SequenceLayout::tokenIds(const std::vector<int>& text) const {
  std::vector<int> ids(static_cast<size_t>(maxContext), BpeVocab::kPad);
  ids[kCls] = BpeVocab::kCls;
  ids[kTextStart] = BpeVocab::kTextStart;
  for (int i = 0; i < textCount; ++i) {
    ids[static_cast<size_t>(kTextBegin + i)] = text[static_cast<size_t>(i)];
  }
  ids[static_cast<size_t>(motionStart())] = BpeVocab::kMotionStart;
  return ids;
}

std::vector<int> SequenceLayout::segmentIds() const {
  std::vector<int> seg(static_cast<size_t>(maxContext), 1);
  for (int i = 0; i < motionStart(); ++i) {
    seg[static_cast<size_t>(i)] = 0;
  }
  return seg;
}

std::vector<bool> SequenceLayout::keyMask() const {
  std::vector<bool> mask(static_cast<size_t>(maxContext), false);
  for (int i = 0; i < length(); ++i) {
    mask[static_cast<size_t>(i)] = true;
  }
  return mask;
}

Rng& ForwardContext::rng() {
  if (rng_ == nullptr) {
    throw ConfigError("training-mode forward needs a random generator");
  }
  return *rng_;
}

MoBertModel::MoBertModel(MoBertConfig config, const InitOptions& init) : config_(std::move(config)) {
  config_.validate();
  registerParameters();
  initialize(init);
}

MoBertModel MoBertModel::uninitialized(MoBertConfig config) {
  config.validate();
  MoBertModel m;
  m.config_ = std::move(config);
  m.registerParameters();
  return m;
}

void MoBertModel::registerParameters() {
  const auto& c = config_;
  auto add = [this](std::string name, std::vector<int64_t> shape, InitKind kind) {
    Parameter p;
    p.name = std::move(name);
    const int64_t rows = shape.size() == 1 ? 1 : shape[0];
    const int64_t cols = shape.size() == 1 ? shape[0] : shape[1];
    p.shape = std::move(shape);
    p.value = Eigen::MatrixXd::Zero(rows, cols);
    index_[p.name] = static_cast<int>(params_.size());
    params_.push_back(std::move(p));
    initKinds_.push_back(kind);
  };
  auto addLinear = [&](const std::string& prefix, int in, int out) {
    add(prefix + ".weight", {out, in}, InitKind::LinearWeight);
    add(prefix + ".bias", {out}, InitKind::LinearBias);
  };
  auto addNorm = [&](const std::string& prefix, int width) {
    add(prefix + ".weight", {width}, InitKind::One);
    add(prefix + ".bias", {width}, InitKind::Zero);
  };

  add("word_embs.weight", {c.vocab, c.dModel}, InitKind::Embedding);
  add("pos_embs.weight", {c.maxContext, c.dModel}, InitKind::Embedding);
  add("seq_embs.weight", {2, c.dModel}, InitKind::Embedding);

  addLinear("frame_encoder.0", c.frameDim, c.frameHidden);
  addNorm("frame_encoder.1", c.frameHidden);
  addLinear("frame_encoder.4", c.frameHidden, c.frameHidden);
  addNorm("frame_encoder.5", c.frameHidden);

  for (size_t k = 0; k + 1 < c.chunkMlpDims.size(); ++k) {
    const int base = static_cast<int>(4 * k);
    addLinear(layerName("chunk_encoder", base), c.chunkMlpDims[k], c.chunkMlpDims[k + 1]);
    addNorm(layerName("chunk_encoder", base + 1), c.chunkMlpDims[k + 1]);
  }

  for (int l = 0; l < c.nLayers; ++l) {
    const std::string p = "transformer_encoder.layers." + std::to_string(l);
    add(p + ".self_attn.in_proj_weight", {3 * c.dModel, c.dModel}, InitKind::Xavier);
    add(p + ".self_attn.in_proj_bias", {3 * c.dModel}, InitKind::Zero);
    add(p + ".self_attn.out_proj.weight", {c.dModel, c.dModel}, InitKind::LinearWeight);
    add(p + ".self_attn.out_proj.bias", {c.dModel}, InitKind::Zero);
    addLinear(p + ".linear1", c.dModel, c.ffDim);
    addLinear(p + ".linear2", c.ffDim, c.dModel);
    addNorm(p + ".norm1", c.dModel);
    addNorm(p + ".norm2", c.dModel);
  }

  for (size_t k = 0; k + 1 < c.headDims.size(); ++k) {
    const int base = static_cast<int>(4 * k);
    addLinear(layerName("alignment_pred_head", base), c.headDims[k], c.headDims[k + 1]);
    if (k + 2 < c.headDims.size()) {
      addNorm(layerName("alignment_pred_head", base + 1), c.headDims[k + 1]);
    }
  }

  featureMean = Eigen::RowVectorXd::Zero(c.frameDim);
  featureStd = Eigen::RowVectorXd::Ones(c.frameDim);
}

void MoBertModel::initialize(const InitOptions& init) {
  Rng rng(init.seed);
  // PyTorch default initializers: N(0, 1) embeddings, U(+-1/sqrt(fan_in)) for
  // linear layers, xavier-uniform attention input projection with zero bias.
  double fanIn = 1.0;
  for (size_t i = 0; i < params_.size(); ++i) {
    auto& v = params_[i].value;
    auto fillUniform = [&](double bound) {
      for (Eigen::Index k = 0; k < v.size(); ++k) v.data()[k] = rng.uniform(-bound, bound);
    };
    switch (initKinds_[i]) {
      case InitKind::Embedding:
        for (Eigen::Index k = 0; k < v.size(); ++k) v.data()[k] = rng.normal();
        break;
      case InitKind::LinearWeight:
        fanIn = static_cast<double>(v.cols());
        fillUniform(1.0 / std::sqrt(fanIn));
        break;
      case InitKind::LinearBias: // follows its weight
        fillUniform(1.0 / std::sqrt(fanIn));
        break;
      case InitKind::Xavier:
        fillUniform(std::sqrt(6.0 / static_cast<double>(v.rows() + v.cols())));
        break;
      case InitKind::Zero:
        v.setZero();
        break;
      case InitKind::One:
        v.setOnes();
        break;
    }
  }
  if (init.zeroHeadOutput) {
    const int last = static_cast<int>(4 * (config_.headDims.size() - 2));
    params_[static_cast<size_t>(parameterIndex(layerName("alignment_pred_head", last) + ".weight"))]
        .value.setZero();
    params_[static_cast<size_t>(parameterIndex(layerName("alignment_pred_head", last) + ".bias"))]
        .value.setZero();
  }
  roundToFloat32();
}

int MoBertModel::parameterIndex(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

int64_t MoBertModel::parameterCount() const {
  return std::accumulate(params_.begin(), params_.end(), int64_t{0},
                         [](int64_t a, const Parameter& p) { return a + p.numel(); });
}

void MoBertModel::fitFeatureNormalization(const std::vector<MotionFeatures>& motions) {
  Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(config_.frameDim);
  Eigen::RowVectorXd sq = Eigen::RowVectorXd::Zero(config_.frameDim);
  double n = 0;
  for (const auto& m : motions) {
    if (m.dim() != config_.frameDim) {
      throw ShapeError("feature width " + std::to_string(m.dim()) + " != " +
                       std::to_string(config_.frameDim));
    }
    sum += m.values.colwise().sum();
    n += static_cast<double>(m.frameCount());
  }
  if (n == 0) {
    throw DataError("no frames to fit feature normalization");
  }
  featureMean = sum / n;
  for (const auto& m : motions) {
    sq += (m.values.rowwise() - featureMean).array().square().matrix().colwise().sum();
  }
  featureStd = (sq / n).cwiseSqrt();
  for (Eigen::Index i = 0; i < featureStd.size(); ++i) {
    if (featureStd[i] < 1e-8) featureStd[i] = 1.0;
  }
  roundToFloat32();
}

void MoBertModel::roundToFloat32() {
  auto round = [](double x) { return static_cast<double>(static_cast<float>(x)); };
  for (auto& p : params_) {
    p.value = p.value.unaryExpr(round);
  }
  featureMean = featureMean.unaryExpr(round);
  featureStd = featureStd.unaryExpr(round);
}

void MoBertModel::checkFinite() const {
  for (const auto& p : params_) {
    if (!p.value.allFinite()) {
      throw NumericalError("parameter " + p.name + " is not finite");
    }
  }
}

ag::Var MoBertModel::param(ForwardContext& ctx, int index) const {
  return ctx.tape().parameter(params_[static_cast<size_t>(index)].value, index);
}

ag::Var MoBertModel::param(ForwardContext& ctx, const std::string& name) const {
  const int i = parameterIndex(name);
  if (i < 0) {
    throw ConfigError("unknown parameter " + name);
  }
  return param(ctx, i);
}

ag::Var MoBertModel::linearLayer(ForwardContext& ctx, const ag::Var& x,
                                 const std::string& prefix) const {
  return ag::linear(x, param(ctx, prefix + ".weight"), param(ctx, prefix + ".bias"));
}

ag::Var MoBertModel::normLayer(ForwardContext& ctx, const ag::Var& x, const std::string& prefix,
                               int groups) const {
  return ag::groupNorm(x, groups, param(ctx, prefix + ".weight"), param(ctx, prefix + ".bias"),
                       config_.normEps);
}

ag::Var MoBertModel::dropoutIf(ForwardContext& ctx, const ag::Var& x, double p) const {
  if (!ctx.training() || p <= 0.0) {
    return x;
  }
  return ag::dropout(x, p, ctx.rng());
}

void MoBertModel::checkActivation(const ag::Var& v, const std::string& where) const {
  if (!v.value().allFinite()) {
    throw NumericalError("non-finite activation after " + where);
  }
}

int MoBertModel::chunkCountFor(const MoBertConfig& config, int frames) {
  return chunkCount(frames, config.chunkLen, config.chunkOverlap);
}

int MoBertModel::textBudget(int chunks) const {
  return config_.maxContext - 3 - chunks;
}

std::vector<int> MoBertModel::clipText(const std::vector<int>& text, int chunks) const {
  const int budget = textBudget(chunks);
  if (budget < 0) {
    throw LengthError(std::to_string(chunks) + " motion chunks exceed the context of " +
                      std::to_string(config_.maxContext));
  }
  if (static_cast<int>(text.size()) <= budget) {
    return text;
  }
  return {text.begin(), text.begin() + budget};
}

ag::Var MoBertModel::encodeMotion(ForwardContext& ctx, const MotionFeatures& features) const {
  if (features.dim() != config_.frameDim) {
    throw ShapeError("motion features have width " + std::to_string(features.dim()) +
                     ", expected " + std::to_string(config_.frameDim));
  }
  if (features.frameCount() < 1) {
    throw DataError("motion has no frames");
  }
  Eigen::MatrixXd normalized =
      (features.values.rowwise() - featureMean).array().rowwise() / featureStd.array();
  ag::Var x = ctx.tape().constant(std::move(normalized));

  x = linearLayer(ctx, x, "frame_encoder.0");
  x = ag::selu(normLayer(ctx, x, "frame_encoder.1", config_.frameGroups));
  x = dropoutIf(ctx, x, config_.dropoutEncoder);
  x = linearLayer(ctx, x, "frame_encoder.4");
  x = ag::selu(normLayer(ctx, x, "frame_encoder.5", config_.frameGroups));
  x = dropoutIf(ctx, x, config_.dropoutEncoder);
  checkActivation(x, "frame_encoder");

  const auto windows =
      chunkWindows(static_cast<int>(features.frameCount()), config_.chunkLen, config_.chunkOverlap);
  x = ag::gatherFlatten(x, windows.frameIndices);
  if (x.cols() != config_.chunkMlpDims.front()) {
    throw ShapeError("flattened chunk width " + std::to_string(x.cols()) + " != " +
                     std::to_string(config_.chunkMlpDims.front()));
  }
  for (size_t k = 0; k + 1 < config_.chunkMlpDims.size(); ++k) {
    const int base = static_cast<int>(4 * k);
    x = linearLayer(ctx, x, layerName("chunk_encoder", base));
    x = ag::selu(normLayer(ctx, x, layerName("chunk_encoder", base + 1), config_.chunkGroups[k]));
    x = dropoutIf(ctx, x, config_.dropoutEncoder);
  }
  checkActivation(x, "chunk_encoder");
  return x;
}

ag::Var MoBertModel::assemble(ForwardContext& ctx, const std::vector<int>& text,
                              const ag::Var& chunks, SequenceLayout& layout) const {
  layout.textCount = static_cast<int>(text.size());
  layout.chunkCount = static_cast<int>(chunks.rows());
  layout.maxContext = config_.maxContext;
  if (layout.length() > config_.maxContext) {
    throw LengthError("sequence of " + std::to_string(layout.length()) +
                      " positions exceeds max context " + std::to_string(config_.maxContext) +
                      "; clip the text first");
  }
  if (chunks.cols() != config_.dModel) {
    throw ShapeError("chunk embeddings must have d_model columns");
  }
  for (int id : text) {
    if (id < 0 || id >= config_.vocab) {
      throw DataError("token id " + std::to_string(id) + " outside the vocabulary");
    }
  }
  const std::vector<int> ids = layout.tokenIds(text);
  const ag::Var words = param(ctx, "word_embs.weight");
  std::vector<ag::Var> parts;
  parts.push_back(ag::gatherRows(words, std::span(ids).first(static_cast<size_t>(layout.chunkBegin()))));
  parts.push_back(chunks);
  if (layout.padCount() > 0) {
    parts.push_back(ag::gatherRows(words, std::span(ids).subspan(static_cast<size_t>(layout.length()))));
  }
  ag::Var x = ag::concatRows(parts);

  std::vector<int> positions(static_cast<size_t>(config_.maxContext));
  std::iota(positions.begin(), positions.end(), 0);
  x = ag::add(x, ag::gatherRows(param(ctx, "pos_embs.weight"), positions));
  const std::vector<int> segments = layout.segmentIds();
  x = ag::add(x, ag::gatherRows(param(ctx, "seq_embs.weight"), segments));
  return x;
}

ag::Var MoBertModel::transformerLayer(ForwardContext& ctx, const ag::Var& x, int layer,
                                      const std::vector<bool>& keyMask) const {
  const std::string p = "transformer_encoder.layers." + std::to_string(layer);
  const int d = config_.dModel;
  const int dh = d / config_.nHeads;
  const ag::Var qkv = ag::linear(x, param(ctx, p + ".self_attn.in_proj_weight"),
                                 param(ctx, p + ".self_attn.in_proj_bias"));
  const double scaleFactor = 1.0 / std::sqrt(static_cast<double>(dh));
  std::vector<ag::Var> heads;
  for (int h = 0; h < config_.nHeads; ++h) {
    const ag::Var q = ag::sliceCols(qkv, h * dh, dh);
    const ag::Var k = ag::sliceCols(qkv, d + h * dh, dh);
    const ag::Var v = ag::sliceCols(qkv, 2 * d + h * dh, dh);
    ag::Var weights = ag::maskedSoftmaxRows(ag::scale(ag::matmulTransB(q, k), scaleFactor), keyMask);
    weights = dropoutIf(ctx, weights, config_.dropoutTransformer);
    heads.push_back(ag::matmul(weights, v));
  }
  const ag::Var attn = linearLayer(ctx, ag::concatCols(heads), p + ".self_attn.out_proj");
  ag::Var y = ag::add(x, dropoutIf(ctx, attn, config_.dropoutTransformer));
  y = normLayer(ctx, y, p + ".norm1", 1);

  ag::Var ff = ag::relu(linearLayer(ctx, y, p + ".linear1"));
  ff = linearLayer(ctx, dropoutIf(ctx, ff, config_.dropoutTransformer), p + ".linear2");
  y = ag::add(y, dropoutIf(ctx, ff, config_.dropoutTransformer));
  return normLayer(ctx, y, p + ".norm2", 1);
}

SequenceOutput MoBertModel::run(ForwardContext& ctx, const std::vector<int>& text,
                                const ag::Var& chunks) const {
  SequenceOutput out;
  ag::Var x = assemble(ctx, text, chunks, out.layout);
  const auto mask = out.layout.keyMask();
  for (int l = 0; l < config_.nLayers; ++l) {
    x = transformerLayer(ctx, x, l, mask);
    checkActivation(x, "transformer layer " + std::to_string(l));
  }
  out.states = x;

  ag::Var h = ag::row(x, SequenceLayout::kCls);
  for (size_t k = 0; k + 1 < config_.headDims.size(); ++k) {
    const int base = static_cast<int>(4 * k);
    h = linearLayer(ctx, h, layerName("alignment_pred_head", base));
    if (k + 2 < config_.headDims.size()) {
      h = ag::selu(normLayer(ctx, h, layerName("alignment_pred_head", base + 1), config_.headGroups));
      h = dropoutIf(ctx, h, config_.dropoutEncoder);
    }
  }
  checkActivation(h, "alignment_pred_head");
  out.logit = h;
  return out;
}

std::vector<PairResult> forwardEval(const MoBertModel& model, const std::vector<PairInput>& batch) {
  std::vector<PairResult> results;
  results.reserve(batch.size());
  for (const auto& in : batch) {
    if (in.motion == nullptr) {
      throw DataError("pair without a motion");
    }
    results.push_back(forwardEval(model, *in.motion, in.text));
  }
  return results;
}

PairResult forwardEval(const MoBertModel& model, const MotionFeatures& motion,
                       const std::vector<int>& text) {
  ForwardContext ctx(false, nullptr);
  const ag::Var chunks = model.encodeMotion(ctx, motion);
  const SequenceOutput out = model.run(ctx, text, chunks);
  PairResult r;
  r.logit = out.logit.value()(0, 0);
  r.probability = sigmoid(r.logit);
  r.states = out.states.value();
  r.layout = out.layout;
  return r;
}

} // namespace motioneval
