#pragma once

#include "motioneval/features.h"

#include <Eigen/Core>

#include <filesystem>
#include <string>

namespace motioneval {

// Motion / text co-embedding. Both modalities map into the same dimension and
// identical inputs give identical vectors.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  [[nodiscard]] virtual int dim() const = 0;
  [[nodiscard]] virtual Eigen::VectorXd embedMotion(const MotionFeatures& features) const = 0;
  [[nodiscard]] virtual Eigen::VectorXd embedText(const std::string& text) const = 0;
};

enum class Modality { Motion, Text };

// Precomputed (n, d) embedding rows, e.g. exported from an external encoder.
struct EmbeddingTable {
  Modality modality = Modality::Motion;
  Eigen::MatrixXd rows;
};

// Reads either `<name>.csv` (comma separated rows) or raw little-endian
// float32 `<name>.f32`. Both need a sidecar `<name>.json` manifest
// {"dim": d, "count": n, "modality": "motion" | "text"}. Mismatches throw
// FormatError.
EmbeddingTable loadEmbeddings(const std::filesystem::path& path);

// Writes raw float32 rows plus the sidecar manifest.
void saveEmbeddings(const std::filesystem::path& path, const EmbeddingTable& table);

} // namespace motioneval
