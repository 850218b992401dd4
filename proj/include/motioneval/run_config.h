#pragma once

#include "motioneval/ce_metrics.h"
#include "motioneval/correlation.h"
#include "motioneval/gaussian_stats.h"
#include "motioneval/mobert_score.h"
#include "motioneval/mobert_train.h"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace motioneval {

inline constexpr std::string_view kToolVersion = "0.1.0";

struct RunPaths {
  std::filesystem::path ratingsCsv;
  std::filesystem::path motionsDir;
  // Directory with `motion` and `text` embedding tables (rows in ratings order).
  std::filesystem::path embeddings;
  // Directory holding mobert.ckpt, vocab.json and regression heads.
  std::filesystem::path checkpoints;
  std::filesystem::path outputDir = "out";
  // Tab-separated (motion file, description) lines for training.
  std::filesystem::path trainingCorpus;
};

struct MoBertRunSettings {
  ScoreMode mode = ScoreMode::Alignment;
  bool textFree = false;
  RatingKind target = RatingKind::Naturalness; // regression target
  int folds = 10;
  int vocabSize = 2000;
  MoBertConfig model;
  TrainingOptions training;
};

struct RunConfig {
  uint64_t seed = 0;
  RunPaths paths;
  std::vector<std::string> metrics;
  double rootScale = 1.0;
  ComponentWeights weights;
  std::vector<int> allowance = {1, 2, 3};
  MeanDistance fidMeanDistance = MeanDistance::Squared;
  MoBertRunSettings mobert;

  // Unknown keys throw ConfigError so typos do not pass silently.
  static RunConfig fromJson(const std::string& json);
  static RunConfig load(const std::filesystem::path& path);
  [[nodiscard]] std::string toJson() const;
  // FNV-1a of toJson(), 16 hex digits.
  [[nodiscard]] std::string hash() const;
};

// "# motioneval <version> config=<hash> seed=<seed>"
std::string outputHeader(const RunConfig& config);

// Writes <output_dir>/manifest.json with the command and resolved config.
void writeManifest(const RunConfig& config, const std::string& command);

} // namespace motioneval
