#include "motioneval/toy_coembedding.h"

#include "motioneval/errors.h"
#include "motioneval/rng.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

namespace motioneval {

std::vector<std::string> splitWords(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string w;
  while (in >> w) {
    std::transform(w.begin(), w.end(), w.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    out.push_back(w);
  }
  return out;
}

Eigen::VectorXd ToyCoEmbedding::pooledMotion(const MotionFeatures& features) const {
  if (features.dim() != featureMean_.size()) {
    throw ShapeError("toy co-embedding: unexpected motion feature dimension");
  }
  const Eigen::VectorXd mean = features.values.colwise().mean().transpose();
  return (mean - featureMean_).cwiseQuotient(featureScale_);
}

Eigen::VectorXd ToyCoEmbedding::bagOfWords(const std::string& text) const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(vocabulary_.size()));
  const auto words = splitWords(text);
  for (const auto& w : words) {
    if (auto it = vocabulary_.find(w); it != vocabulary_.end()) {
      x[it->second] += 1.0;
    }
  }
  if (!words.empty()) {
    x /= static_cast<double>(words.size());
  }
  return x;
}

Eigen::VectorXd ToyCoEmbedding::embedMotion(const MotionFeatures& features) const {
  return motionProjection_ * pooledMotion(features);
}

Eigen::VectorXd ToyCoEmbedding::embedText(const std::string& text) const {
  return textProjection_ * bagOfWords(text);
}

namespace {

struct Adam {
  Eigen::MatrixXd m, v;
  int step = 0;
  void apply(Eigen::MatrixXd& w, const Eigen::MatrixXd& g, double lr) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    if (m.size() == 0) {
      m = Eigen::MatrixXd::Zero(w.rows(), w.cols());
      v = m;
    }
    ++step;
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g.cwiseProduct(g);
    const double c1 = 1 - std::pow(b1, step);
    const double c2 = 1 - std::pow(b2, step);
    w.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  }
};

} // namespace

ToyCoEmbedding trainToyCoEmbedding(const std::vector<CoEmbeddingPair>& corpus,
                                   const ToyCoEmbeddingOptions& options) {
  if (corpus.size() < 64) {
    throw DataError("toy co-embedding needs at least 64 pairs, got " +
                    std::to_string(corpus.size()));
  }
  Rng rng(options.seed);
  std::vector<size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  const auto heldCount = std::max<size_t>(
      2, static_cast<size_t>(std::round(options.heldOutFraction * corpus.size())));
  const std::vector<size_t> held(order.begin(), order.begin() + heldCount);
  const std::vector<size_t> train(order.begin() + heldCount, order.end());

  ToyCoEmbedding model;
  const Eigen::Index fdim = corpus.front().features.dim();
  Eigen::MatrixXd pooled(static_cast<Eigen::Index>(corpus.size()), fdim);
  for (size_t i = 0; i < corpus.size(); ++i) {
    if (corpus[i].features.dim() != fdim) {
      throw ShapeError("toy co-embedding: motion feature dimensions differ");
    }
    pooled.row(static_cast<Eigen::Index>(i)) = corpus[i].features.values.colwise().mean();
  }
  model.featureMean_ = Eigen::VectorXd::Zero(fdim);
  for (size_t i : train) {
    model.featureMean_ += pooled.row(static_cast<Eigen::Index>(i)).transpose();
  }
  model.featureMean_ /= static_cast<double>(train.size());
  model.featureScale_ = Eigen::VectorXd::Zero(fdim);
  for (size_t i : train) {
    const Eigen::VectorXd d = pooled.row(static_cast<Eigen::Index>(i)).transpose() -
                              model.featureMean_;
    model.featureScale_ += d.cwiseProduct(d);
  }
  model.featureScale_ = (model.featureScale_ / static_cast<double>(train.size())).cwiseSqrt();
  for (Eigen::Index c = 0; c < fdim; ++c) {
    if (model.featureScale_[c] < 1e-8) {
      model.featureScale_[c] = 1.0;
    }
  }
  for (size_t i : train) {
    for (const auto& w : splitWords(corpus[i].text)) {
      model.vocabulary_.emplace(w, 0);
    }
  }
  int next = 0;
  for (auto& [w, id] : model.vocabulary_) {
    id = next++;
  }

  const Eigen::Index d = options.dim;
  const auto v = static_cast<Eigen::Index>(model.vocabulary_.size());
  model.motionProjection_.resize(d, fdim);
  model.textProjection_.resize(d, v);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < fdim; ++c) {
      model.motionProjection_(r, c) = rng.normal(0.0, 0.1);
    }
    for (Eigen::Index c = 0; c < v; ++c) {
      model.textProjection_(r, c) = rng.normal(0.0, 0.1);
    }
  }

  std::vector<Eigen::VectorXd> z(corpus.size());
  std::vector<Eigen::VectorXd> x(corpus.size());
  for (size_t i = 0; i < corpus.size(); ++i) {
    z[i] = model.pooledMotion(corpus[i].features);
    x[i] = model.bagOfWords(corpus[i].text);
  }

  Adam adamMotion;
  Adam adamText;
  std::vector<size_t> epochOrder = train;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    rng.shuffle(epochOrder);
    for (size_t start = 0; start < epochOrder.size(); start += options.batchSize) {
      const size_t end = std::min(epochOrder.size(), start + options.batchSize);
      const auto b = static_cast<Eigen::Index>(end - start);
      if (b < 2) {
        continue;
      }
      Eigen::MatrixXd m(d, b);
      Eigen::MatrixXd t(d, b);
      for (Eigen::Index k = 0; k < b; ++k) {
        m.col(k) = model.motionProjection_ * z[epochOrder[start + k]];
        t.col(k) = model.textProjection_ * x[epochOrder[start + k]];
      }
      // Softmax over negative squared distances; texts identical to the
      // true one are excluded from the negatives.
      Eigen::MatrixXd g = Eigen::MatrixXd::Zero(b, b);
      for (Eigen::Index i = 0; i < b; ++i) {
        const auto& ti = corpus[epochOrder[start + i]].text;
        Eigen::VectorXd s(b);
        double best = -1e300;
        for (Eigen::Index j = 0; j < b; ++j) {
          const bool allowed = j == i || corpus[epochOrder[start + j]].text != ti;
          s[j] = allowed ? -(m.col(i) - t.col(j)).squaredNorm() : -1e300;
          best = std::max(best, s[j]);
        }
        double z0 = 0.0;
        for (Eigen::Index j = 0; j < b; ++j) {
          s[j] = s[j] <= -1e299 ? 0.0 : std::exp(s[j] - best);
          z0 += s[j];
        }
        for (Eigen::Index j = 0; j < b; ++j) {
          g(i, j) = (s[j] / z0 - (i == j ? 1.0 : 0.0)) / static_cast<double>(b);
        }
      }
      Eigen::MatrixXd gm = Eigen::MatrixXd::Zero(d, b);
      Eigen::MatrixXd gt = Eigen::MatrixXd::Zero(d, b);
      for (Eigen::Index i = 0; i < b; ++i) {
        for (Eigen::Index j = 0; j < b; ++j) {
          if (g(i, j) == 0.0) {
            continue;
          }
          const Eigen::VectorXd diff = m.col(i) - t.col(j);
          gm.col(i) += -2.0 * g(i, j) * diff;
          gt.col(j) += 2.0 * g(i, j) * diff;
        }
      }
      Eigen::MatrixXd dWm = Eigen::MatrixXd::Zero(d, fdim);
      Eigen::MatrixXd dWt = Eigen::MatrixXd::Zero(d, v);
      for (Eigen::Index k = 0; k < b; ++k) {
        dWm += gm.col(k) * z[epochOrder[start + k]].transpose();
        dWt += gt.col(k) * x[epochOrder[start + k]].transpose();
      }
      adamMotion.apply(model.motionProjection_, dWm, options.learningRate);
      adamText.apply(model.textProjection_, dWt, options.learningRate);
    }
  }

  size_t closer = 0;
  size_t judged = 0;
  for (size_t i : held) {
    size_t j = i;
    for (int attempt = 0; attempt < 64 && (j == i || corpus[j].text == corpus[i].text);
         ++attempt) {
      j = held[rng.index(held.size())];
    }
    if (corpus[j].text == corpus[i].text) {
      continue;
    }
    const Eigen::VectorXd m = model.motionProjection_ * z[i];
    const double matched = (m - model.textProjection_ * x[i]).norm();
    const double mismatched = (m - model.textProjection_ * x[j]).norm();
    ++judged;
    if (matched < mismatched) {
      ++closer;
    }
  }
  model.heldOutSeparation_ = judged == 0 ? 0.0 : static_cast<double>(closer) / judged;
  if (model.heldOutSeparation_ < options.criterion) {
    throw TrainingError("toy co-embedding reached held-out separation " +
                        std::to_string(model.heldOutSeparation_) + " over " +
                        std::to_string(judged) + " pairs after " +
                        std::to_string(options.epochs) + " epochs; need " +
                        std::to_string(options.criterion));
  }
  return model;
}

} // namespace motioneval
