#pragma once

#include "motioneval/ratings.h"
#include "motioneval/run_config.h"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace motioneval {

struct IngestSummary {
  std::vector<RatingRecord> records;
  std::vector<std::pair<std::string, int>> perModel; // sorted by model name
  std::vector<std::string> missingMotions;           // file names, record order
  std::vector<bool> present;                         // per record
};

// Every command writes its outputs under config.paths.outputDir together with
// manifest.json, and a one-paragraph summary to `log`.
IngestSummary cmdIngest(const RunConfig& config, std::ostream& log);

// Per-sample (and model-level FID) scores: scores.csv with columns
// level,model_name,original_index,metric,score.
void cmdEval(const RunConfig& config, std::ostream& log);

// Correlation table (correlations.csv) for a scores CSV against the ratings,
// plus root / component scaling curves for CE metrics when requested.
void cmdCorrelate(const RunConfig& config, const std::filesystem::path& scoresCsv,
                  bool rootScaleSearch, bool componentSearch, std::ostream& log);

// Trains MoBERT on paths.training_corpus, or on the bundled synthetic task,
// and writes mobert.ckpt, vocab.json and training_history.csv. The synthetic
// run also checks its accuracy gate and throws TrainingError if missed.
void cmdTrain(const RunConfig& config, bool synthetic, std::ostream& log);

// 10-fold out-of-fold predictions (oof_predictions.csv) and a head fitted on
// all samples (head_<kind>.json).
void cmdFitRegression(const RunConfig& config, std::ostream& log);

// Scores one motion file; text empty means text-free. Prints and writes score.txt.
double cmdScore(const RunConfig& config, const std::filesystem::path& motion,
                const std::optional<std::string>& text, std::ostream& log);

// Metric names accepted by eval: CE names such as "Root_AE_Position",
// "FID" (model level; "FID:sample" is rejected), "R-Precision",
// "MultimodalDistance" and "MoBERT".
void validateMetricNames(const std::vector<std::string>& metrics);

} // namespace motioneval
