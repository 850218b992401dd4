#include "motioneval/chunking.h"

#include "motioneval/errors.h"

#include <algorithm>
#include <string>

namespace motioneval {

namespace {

void checkConfig(int chunkLen, int overlap) {
  if (overlap < 0 || chunkLen <= overlap) {
    throw ConfigError("chunk length (" + std::to_string(chunkLen) +
                      ") must exceed overlap (" + std::to_string(overlap) + ") >= 0");
  }
}

} // namespace

int chunkCount(int frames, int chunkLen, int overlap) {
  checkConfig(chunkLen, overlap);
  const int stride = chunkLen - overlap;
  const int excess = std::max(frames - chunkLen, 0);
  return (excess + stride - 1) / stride + 1;
}

ChunkedMotion chunkWindows(int frames, int chunkLen, int overlap) {
  if (frames < 1) {
    throw DataError("cannot chunk an empty feature sequence");
  }
  ChunkedMotion out;
  out.chunkLen = chunkLen;
  out.overlap = overlap;
  out.sourceFrames = frames;
  const int n = chunkCount(frames, chunkLen, overlap);
  out.frameIndices.resize(static_cast<size_t>(n));
  for (int c = 0; c < n; ++c) {
    auto& idx = out.frameIndices[static_cast<size_t>(c)];
    idx.resize(static_cast<size_t>(chunkLen));
    for (int k = 0; k < chunkLen; ++k) {
      idx[static_cast<size_t>(k)] = std::min(c * out.stride() + k, frames - 1);
    }
  }
  return out;
}

ChunkedMotion chunk(const MotionFeatures& features, int chunkLen, int overlap) {
  return chunkWindows(static_cast<int>(features.frameCount()), chunkLen, overlap);
}

Eigen::MatrixXd ChunkedMotion::flattened(const MotionFeatures& features) const {
  if (features.frameCount() != sourceFrames) {
    throw ShapeError("feature sequence length does not match chunk windows");
  }
  const Eigen::Index d = features.dim();
  Eigen::MatrixXd out(chunkCount(), chunkLen * d);
  for (int c = 0; c < chunkCount(); ++c) {
    for (int k = 0; k < chunkLen; ++k) {
      out.block(c, k * d, 1, d) = features.values.row(frameIndices[c][k]);
    }
  }
  return out;
}

} // namespace motioneval
