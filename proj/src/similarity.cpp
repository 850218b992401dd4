#include "motioneval/similarity.h"

#include "motioneval/errors.h"
#include "motioneval/toy_coembedding.h"

#include <algorithm>
#include <cmath>
#include <map>

namespace motioneval {

double BagOfWordsCosine::similarity(const std::string& a, const std::string& b) const {
  std::map<std::string, double> ca;
  std::map<std::string, double> cb;
  for (const auto& w : splitWords(a)) ca[w] += 1.0;
  for (const auto& w : splitWords(b)) cb[w] += 1.0;
  if (ca.empty() || cb.empty()) {
    return 0.0;
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (const auto& [w, c] : ca) {
    na += c * c;
    if (auto it = cb.find(w); it != cb.end()) dot += c * it->second;
  }
  for (const auto& [w, c] : cb) nb += c * c;
  return std::clamp(dot / std::sqrt(na * nb), 0.0, 1.0);
}

ConstantSimilarity::ConstantSimilarity(double alpha) : alpha_(alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("constant similarity must be in [0, 1]");
  }
}

} // namespace motioneval
