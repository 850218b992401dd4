#pragma once

#include "motioneval/features.h"

#include <Eigen/Core>

#include <vector>

namespace motioneval {

inline constexpr int kDefaultChunkLen = 14;
inline constexpr int kDefaultChunkOverlap = 4;

// Fixed-length windows over a feature sequence. Chunk c covers source frames
// [c * stride, c * stride + chunkLen); indices past the end repeat the last frame.
struct ChunkedMotion {
  int chunkLen = kDefaultChunkLen;
  int overlap = kDefaultChunkOverlap;
  int sourceFrames = 0;
  std::vector<std::vector<int>> frameIndices; // chunks x chunkLen

  [[nodiscard]] int stride() const { return chunkLen - overlap; }
  [[nodiscard]] int chunkCount() const { return static_cast<int>(frameIndices.size()); }

  // chunks x (chunkLen * feature dim), frames of each window laid end to end.
  [[nodiscard]] Eigen::MatrixXd flattened(const MotionFeatures& features) const;
};

// ceil(max(T - chunkLen, 0) / stride) + 1
int chunkCount(int frames, int chunkLen, int overlap);

// Throws ConfigError unless chunkLen > overlap >= 0.
ChunkedMotion chunkWindows(int frames, int chunkLen = kDefaultChunkLen,
                           int overlap = kDefaultChunkOverlap);
ChunkedMotion chunk(const MotionFeatures& features, int chunkLen = kDefaultChunkLen,
                    int overlap = kDefaultChunkOverlap);

} // namespace motioneval
