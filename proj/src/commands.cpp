#include "motioneval/commands.h"

#include "motioneval/checkpoint.h"
#include "motioneval/embedding.h"
#include "motioneval/errors.h"
#include "motioneval/features.h"
#include "motioneval/kfold.h"
#include "motioneval/npy.h"
#include "motioneval/retrieval.h"
#include "motioneval/scaling_search.h"
#include "motioneval/synthetic_alignment.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace motioneval {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kFid = "FID";
constexpr std::string_view kRPrecision = "R-Precision";
constexpr std::string_view kMultimodal = "MultimodalDistance";
constexpr std::string_view kMoBert = "MoBERT";

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Sorted, one entry per model.
std::vector<std::string> distinctModels(const std::vector<RatingRecord>& records) {
  std::vector<std::string> out = modelNames(records);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void requirePath(const fs::path& p, const char* what) {
  if (p.empty()) {
    throw ConfigError(std::string("missing path: ") + what);
  }
}

std::ofstream openOutput(const RunConfig& config, const std::string& name) {
  fs::create_directories(config.paths.outputDir);
  std::ofstream out(config.paths.outputDir / name);
  if (!out) {
    throw DataError("cannot write " + (config.paths.outputDir / name).string());
  }
  out << outputHeader(config) << '\n';
  return out;
}

std::optional<CeConfig> parseCeName(const std::string& name, const RunConfig& config) {
  std::vector<std::string> parts;
  std::stringstream ss(name);
  std::string p;
  while (std::getline(ss, p, '_')) parts.push_back(p);
  if (parts.size() != 3) return std::nullopt;
  CeConfig c;
  c.grouping = parseJointGrouping(parts[0]);
  c.kind = parseCeKind(parts[1]);
  c.component = parseCeComponent(parts[2]);
  c.rootScale = config.rootScale;
  c.weights = config.weights;
  if (c.component == CeComponent::PV) c.weights.acceleration = 1.0;
  return c;
}

bool isCeName(const std::string& name) {
  return std::count(name.begin(), name.end(), '_') == 2;
}

struct Dataset {
  std::vector<RatingRecord> records;
  std::vector<std::optional<MotionSequence>> motions; // empty when not loaded / missing
};

Dataset loadDataset(const RunConfig& config, bool withMotions, std::ostream& log) {
  requirePath(config.paths.ratingsCsv, "paths.ratings_csv");
  Dataset d;
  d.records = readRatingsCsv(config.paths.ratingsCsv);
  d.motions.resize(d.records.size());
  if (!withMotions) return d;
  requirePath(config.paths.motionsDir, "paths.motions_dir");
  int missing = 0;
  for (size_t i = 0; i < d.records.size(); ++i) {
    const auto file = config.paths.motionsDir /
                      motionFileName(d.records[i].modelName, d.records[i].originalIndex);
    if (!fs::exists(file)) {
      ++missing;
      continue;
    }
    d.motions[i] = loadNpy(file);
  }
  if (missing > 0) {
    log << "warning: " << missing << " motion files missing; those samples are excluded\n";
  }
  return d;
}

// Index of the HumanML3D record with the same original index, per record.
std::vector<std::optional<size_t>> referenceIndex(const std::vector<RatingRecord>& records) {
  std::map<int, size_t> refs;
  for (size_t i = 0; i < records.size(); ++i) {
    if (records[i].modelName == kReferenceModel) refs.emplace(records[i].originalIndex, i);
  }
  std::vector<std::optional<size_t>> out(records.size());
  for (size_t i = 0; i < records.size(); ++i) {
    if (auto it = refs.find(records[i].originalIndex); it != refs.end()) out[i] = it->second;
  }
  return out;
}

struct LoadedMoBert {
  MoBertModel model;
  BpeVocab vocab;
  std::optional<RegressionHead> head;
};

LoadedMoBert loadMoBert(const RunConfig& config) {
  requirePath(config.paths.checkpoints, "paths.checkpoints");
  const fs::path dir = config.paths.checkpoints;
  LoadedMoBert m{loadCheckpoint(dir / "mobert.ckpt"), BpeVocab::load(dir / "vocab.json"), std::nullopt};
  if (config.mobert.mode != ScoreMode::Alignment) {
    const std::string kind = config.mobert.mode == ScoreMode::Svr ? "svr" : "ridge";
    const fs::path headPath = dir / ("head_" + kind + ".json");
    if (!fs::exists(headPath)) {
      throw ConfigError("score mode '" + toString(config.mobert.mode) + "' needs " + headPath.string() +
                        " (run fit-regression first)");
    }
    m.head = RegressionHead::load(headPath);
  }
  return m;
}

std::optional<std::vector<int>> mobertText(const LoadedMoBert& m, bool textFree,
                                           const std::string& text, int frames) {
  if (textFree) return std::nullopt;
  return prepareText(m.model, m.vocab, text, frames);
}

std::string mobertMetricName(const RunConfig& config) {
  return std::string(kMoBert) + "_" + toString(config.mobert.mode) +
         (config.mobert.textFree ? "_textfree" : "");
}

struct ScoreRow {
  std::string level;
  std::string model;
  std::optional<int> index;
  std::string metric;
  double score = 0.0;
};

std::vector<ScoreRow> readScores(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open scores " + path.string());
  }
  std::vector<ScoreRow> rows;
  std::string line;
  int lineNo = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line.rfind("level,", 0) != 0) {
        throw FormatError(path.string() + ":" + std::to_string(lineNo) + ": expected header row");
      }
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 5) {
      throw FormatError(path.string() + ":" + std::to_string(lineNo) + ": expected 5 fields");
    }
    ScoreRow r;
    r.level = f[0];
    r.model = f[1];
    try {
      if (f[2] != "NA") r.index = std::stoi(f[2]);
      r.score = std::stod(f[4]);
    } catch (const std::exception&) {
      throw FormatError(path.string() + ":" + std::to_string(lineNo) + ": bad number");
    }
    r.metric = f[3];
    if (r.level != "sample" && r.level != "model") {
      throw FormatError(path.string() + ":" + std::to_string(lineNo) + ": level must be sample or model");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string corrCells(const std::optional<Correlation>& c) {
  return c ? num(c->r) + "," + num(c->pValue) : "NA,NA";
}

} // namespace

void validateMetricNames(const std::vector<std::string>& metrics) {
  if (metrics.empty()) {
    throw ConfigError("no metrics selected (--metrics or config 'metrics')");
  }
  for (const auto& m : metrics) {
    if (m == "FID:sample") {
      throw ConfigError(
          "FID is a distribution-level metric and is reported at the model level only; "
          "use 'FID'");
    }
    if (m == kFid || m == "FID:model" || m == kRPrecision || m == kMultimodal || m == kMoBert) {
      continue;
    }
    if (isCeName(m)) {
      RunConfig dummy;
      parseCeName(m, dummy);
      continue;
    }
    throw ConfigError("unknown metric '" + m + "'");
  }
}

IngestSummary cmdIngest(const RunConfig& config, std::ostream& log) {
  Dataset d = loadDataset(config, false, log);
  IngestSummary s;
  std::map<std::string, int> counts;
  for (const auto& r : d.records) ++counts[r.modelName];
  s.perModel.assign(counts.begin(), counts.end());
  s.present.assign(d.records.size(), true);
  if (!config.paths.motionsDir.empty()) {
    for (size_t i = 0; i < d.records.size(); ++i) {
      const auto name = motionFileName(d.records[i].modelName, d.records[i].originalIndex);
      if (!fs::exists(config.paths.motionsDir / name)) {
        s.present[i] = false;
        s.missingMotions.push_back(name);
      }
    }
  }
  s.records = std::move(d.records);

  writeManifest(config, "ingest");
  auto out = openOutput(config, "ingest_summary.csv");
  out << "model_name,samples,missing_motions\n";
  std::map<std::string, int> missing;
  for (size_t i = 0; i < s.records.size(); ++i) {
    if (!s.present[i]) ++missing[s.records[i].modelName];
  }
  log << s.records.size() << " rated samples\n";
  for (const auto& [m, n] : s.perModel) {
    out << m << ',' << n << ',' << missing[m] << '\n';
    log << "  " << m << ": " << n << " samples";
    if (missing[m] > 0) log << " (" << missing[m] << " motions missing, excluded)";
    log << '\n';
  }
  for (const auto& f : s.missingMotions) log << "missing: " << f << '\n';
  return s;
}

void cmdEval(const RunConfig& config, std::ostream& log) {
  validateMetricNames(config.metrics);
  bool needMotions = false;
  bool needEmbeddings = false;
  bool needMoBert = false;
  for (const auto& m : config.metrics) {
    if (isCeName(m) || m == kMoBert) needMotions = true;
    if (m == kFid || m == "FID:model" || m == kRPrecision || m == kMultimodal) needEmbeddings = true;
    if (m == kMoBert) needMoBert = true;
  }
  Dataset d = loadDataset(config, needMotions, log);
  const auto& recs = d.records;
  const auto refs = referenceIndex(recs);

  std::optional<EmbeddingTable> motionEmb;
  std::optional<EmbeddingTable> textEmb;
  if (needEmbeddings) {
    requirePath(config.paths.embeddings, "paths.embeddings");
    auto find = [&](const char* stem) {
      for (const char* ext : {".csv", ".f32"}) {
        const auto p = config.paths.embeddings / (std::string(stem) + ext);
        if (fs::exists(p)) return p;
      }
      throw ConfigError("no " + std::string(stem) + ".csv or " + stem + ".f32 in " +
                        config.paths.embeddings.string());
    };
    motionEmb = loadEmbeddings(find("motion"));
    textEmb = loadEmbeddings(find("text"));
    if (motionEmb->rows.rows() != static_cast<Eigen::Index>(recs.size()) ||
        textEmb->rows.rows() != static_cast<Eigen::Index>(recs.size())) {
      throw ShapeError("embedding tables need one row per rated sample (" +
                       std::to_string(recs.size()) + ")");
    }
    if (motionEmb->rows.cols() != textEmb->rows.cols()) {
      throw ShapeError("motion and text embeddings differ in dimension");
    }
  }
  std::optional<LoadedMoBert> mobert;
  if (needMoBert) mobert = loadMoBert(config);

  const std::vector<std::string> modelOrder = distinctModels(recs);

  writeManifest(config, "eval");
  auto out = openOutput(config, "scores.csv");
  out << "level,model_name,original_index,metric,score\n";
  auto sampleRow = [&](size_t i, const std::string& metric, double v) {
    out << "sample," << recs[i].modelName << ',' << recs[i].originalIndex << ',' << metric << ','
        << num(v) << '\n';
  };
  size_t sampleRows = 0;
  size_t modelRows = 0;

  for (const auto& metric : config.metrics) {
    if (isCeName(metric)) {
      const CeConfig ce = *parseCeName(metric, config);
      for (size_t i = 0; i < recs.size(); ++i) {
        if (!d.motions[i] || !refs[i] || !d.motions[*refs[i]]) continue;
        sampleRow(i, metric, ceScore(*d.motions[*refs[i]], *d.motions[i], ce));
        ++sampleRows;
      }
    } else if (metric == kFid || metric == "FID:model") {
      std::vector<Eigen::Index> refRows;
      for (size_t i = 0; i < recs.size(); ++i) {
        if (recs[i].modelName == kReferenceModel) refRows.push_back(static_cast<Eigen::Index>(i));
      }
      if (refRows.size() < 2) {
        throw DataError("FID needs at least two " + std::string(kReferenceModel) + " embeddings");
      }
      const GaussianStats ref = gaussianStats(Eigen::MatrixXd(motionEmb->rows(refRows, Eigen::all)));
      for (const auto& model : modelOrder) {
        std::vector<Eigen::Index> rows;
        for (size_t i = 0; i < recs.size(); ++i) {
          if (recs[i].modelName == model) rows.push_back(static_cast<Eigen::Index>(i));
        }
        const GaussianStats g = gaussianStats(Eigen::MatrixXd(motionEmb->rows(rows, Eigen::all)));
        out << "model," << model << ",NA," << kFid << ',' << num(fid(ref, g, config.fidMeanDistance))
            << '\n';
        ++modelRows;
      }
    } else if (metric == kRPrecision) {
      for (int k : config.allowance) {
        if (k < 1 || k > kRPrecisionBatchSize - 1) {
          throw ConfigError("R-Precision allowance must be in [1, " +
                            std::to_string(kRPrecisionBatchSize - 1) + "]");
        }
      }
      // Distractors come from the same model's samples; one rank serves every allowance.
      Rng rng(config.seed);
      std::vector<int> ranks(recs.size(), 0);
      for (const auto& model : modelOrder) {
        std::vector<Eigen::Index> rows;
        for (size_t i = 0; i < recs.size(); ++i) {
          if (recs[i].modelName == model) rows.push_back(static_cast<Eigen::Index>(i));
        }
        if (static_cast<int>(rows.size()) < kRPrecisionBatchSize) {
          throw DataError("R-Precision needs at least " + std::to_string(kRPrecisionBatchSize) +
                          " samples for model " + model);
        }
        const Eigen::MatrixXd mm = motionEmb->rows(rows, Eigen::all);
        const Eigen::MatrixXd tt = textEmb->rows(rows, Eigen::all);
        for (size_t k = 0; k < rows.size(); ++k) {
          ranks[static_cast<size_t>(rows[k])] = sampleRetrievalRank(mm, tt, static_cast<int>(k), rng);
        }
      }
      for (int k : config.allowance) {
        const std::string name = std::string(kRPrecision) + "@" + std::to_string(k);
        for (size_t i = 0; i < recs.size(); ++i) {
          sampleRow(i, name, ranks[i] < k ? 1.0 : 0.0);
          ++sampleRows;
        }
      }
    } else if (metric == kMultimodal) {
      for (size_t i = 0; i < recs.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        sampleRow(i, metric,
                  multimodalDistance(motionEmb->rows.row(r).transpose(), textEmb->rows.row(r).transpose()));
        ++sampleRows;
      }
    } else if (metric == kMoBert) {
      const std::string name = mobertMetricName(config);
      for (size_t i = 0; i < recs.size(); ++i) {
        if (!d.motions[i]) continue;
        const MotionFeatures f = extractFeatures(*d.motions[i]);
        const auto text = mobertText(*mobert, config.mobert.textFree, recs[i].prompt,
                                     static_cast<int>(f.frameCount()));
        sampleRow(i, name,
                  score(mobert->model, mobert->head ? &*mobert->head : nullptr, config.mobert.mode, f, text));
        ++sampleRows;
      }
    }
  }
  log << "wrote " << sampleRows << " sample-level and " << modelRows << " model-level rows to "
      << (config.paths.outputDir / "scores.csv").string() << '\n';
}

void cmdCorrelate(const RunConfig& config, const fs::path& scoresCsv, bool rootScaleSearch,
                  bool componentSearch, std::ostream& log) {
  Dataset d = loadDataset(config, rootScaleSearch || componentSearch, log);
  const auto& recs = d.records;
  std::map<std::pair<std::string, int>, size_t> byKey;
  std::map<std::string, std::vector<size_t>> byModel;
  for (size_t i = 0; i < recs.size(); ++i) {
    byKey.emplace(std::make_pair(recs[i].modelName, recs[i].originalIndex), i);
    byModel[recs[i].modelName].push_back(i);
  }
  auto meanRating = [&](const std::string& model, RatingKind kind) {
    double s = 0.0;
    for (size_t i : byModel.at(model)) s += recs[i].rating(kind);
    return s / static_cast<double>(byModel.at(model).size());
  };

  writeManifest(config, "correlate");
  std::vector<std::string> metricOrder;
  std::map<std::string, std::vector<ScoreRow>> rowsByMetric;
  if (!scoresCsv.empty()) {
    for (auto& r : readScores(scoresCsv)) {
      if (!rowsByMetric.count(r.metric)) metricOrder.push_back(r.metric);
      rowsByMetric[r.metric].push_back(std::move(r));
    }
  }

  auto out = openOutput(config, "correlations.csv");
  out << "metric,model_faithfulness_r,model_faithfulness_p,model_naturalness_r,model_naturalness_p,"
         "sample_faithfulness_r,sample_faithfulness_p,sample_naturalness_r,sample_naturalness_p,"
         "n_model,n_sample\n";
  for (const auto& metric : metricOrder) {
    std::vector<std::string> models;
    std::vector<double> scores;
    std::vector<double> nat;
    std::vector<double> faith;
    std::vector<std::string> levelModels;
    std::vector<double> levelScores;
    int misses = 0;
    for (const auto& r : rowsByMetric[metric]) {
      if (r.level == "sample") {
        auto it = r.index ? byKey.find({r.model, *r.index}) : byKey.end();
        if (it == byKey.end()) {
          ++misses;
          continue;
        }
        models.push_back(r.model);
        scores.push_back(r.score);
        nat.push_back(recs[it->second].naturalness);
        faith.push_back(recs[it->second].faithfulness);
      } else {
        if (!byModel.count(r.model)) {
          ++misses;
          continue;
        }
        levelModels.push_back(r.model);
        levelScores.push_back(r.score);
      }
    }
    if (misses > 0) {
      log << "warning: " << metric << ": " << misses << " rows did not join the ratings and were excluded\n";
    }
    std::optional<Correlation> cells[4];
    size_t nModel = 0;
    auto attempt = [](std::span<const double> a, std::span<const double> b) -> std::optional<Correlation> {
      if (a.size() < 3) return std::nullopt;
      return tryPearson(a, b);
    };
    if (!levelModels.empty()) {
      std::vector<double> mf;
      std::vector<double> mn;
      for (const auto& m : levelModels) {
        mf.push_back(meanRating(m, RatingKind::Faithfulness));
        mn.push_back(meanRating(m, RatingKind::Naturalness));
      }
      cells[0] = attempt(levelScores, mf);
      cells[1] = attempt(levelScores, mn);
      nModel = levelModels.size();
    } else if (!scores.empty()) {
      const auto f = aggregate(models, scores, faith, Level::Model);
      const auto n = aggregate(models, scores, nat, Level::Model);
      cells[0] = attempt(f.scores, f.ratings);
      cells[1] = attempt(n.scores, n.ratings);
      nModel = f.scores.size();
    }
    cells[2] = attempt(scores, faith);
    cells[3] = attempt(scores, nat);
    out << metric;
    for (const auto& c : cells) out << ',' << corrCells(c);
    out << ',' << nModel << ',' << scores.size() << '\n';
    log << metric << ": sample r(faith)=" << (cells[2] ? num(cells[2]->r) : "NA")
        << " r(nat)=" << (cells[3] ? num(cells[3]->r) : "NA") << "; model r(faith)="
        << (cells[0] ? num(cells[0]->r) : "NA") << " r(nat)=" << (cells[1] ? num(cells[1]->r) : "NA")
        << '\n';
  }

  if (!rootScaleSearch && !componentSearch) return;
  std::vector<std::string> ceMetrics;
  for (const auto& m : config.metrics.empty() ? metricOrder : config.metrics) {
    if (isCeName(m)) ceMetrics.push_back(m);
  }
  if (ceMetrics.empty()) {
    throw ConfigError("scaling searches need CE metrics in --metrics");
  }
  const auto refs = referenceIndex(recs);
  std::vector<RatedPair> pairs;
  for (size_t i = 0; i < recs.size(); ++i) {
    if (!d.motions[i] || !refs[i] || !d.motions[*refs[i]]) continue;
    pairs.push_back({*d.motions[*refs[i]], *d.motions[i], recs[i].modelName, recs[i].naturalness,
                     recs[i].faithfulness});
  }
  auto report = [&](const std::string& file, const SearchResult& result) {
    auto curve = openOutput(config, file);
    writeSearchCsv(curve, result);
    for (RatingKind rk : {RatingKind::Faithfulness, RatingKind::Naturalness}) {
      for (Level lv : {Level::Sample, Level::Model}) {
        const auto& best = result.best[correlationSlot(rk, lv)];
        if (!best) continue;
        const auto& cell = result.cells[*best];
        log << "  best " << toString(rk) << "/" << toString(lv) << ": root 2^" << cell.rootExponent
            << " weights 2^" << cell.weightExponents[0] << ",2^" << cell.weightExponents[1] << ",2^"
            << cell.weightExponents[2] << " r=" << num(cell.correlations[correlationSlot(rk, lv)]->r)
            << '\n';
      }
    }
  };
  for (const auto& m : ceMetrics) {
    const CeConfig ce = *parseCeName(m, config);
    if (rootScaleSearch) {
      log << m << " root-scale search (" << pairs.size() << " pairs)\n";
      report("root_scale_" + m + ".csv", rootScalingSearch(pairs, ce));
    }
    if (componentSearch && (ce.component == CeComponent::PV || ce.component == CeComponent::PVA)) {
      log << m << " component search (" << pairs.size() << " pairs)\n";
      report("component_" + m + ".csv", componentScalingSearch(pairs, ce));
    }
  }
}

namespace {

void writeHistory(const RunConfig& config, const TrainingResult& r) {
  auto out = openOutput(config, "training_history.csv");
  out << "epoch,valid_loss,contrastive_loss,weighted_contrastive_loss,total_loss,batches,skipped\n";
  for (size_t e = 0; e < r.history.size(); ++e) {
    const auto& h = r.history[e];
    out << e << ',' << num(h.validLoss) << ',' << num(h.contrastiveLoss) << ','
        << num(h.weightedContrastiveLoss) << ',' << num(h.totalLoss) << ',' << h.batches << ','
        << h.skippedBatches << '\n';
  }
}

std::vector<std::pair<std::string, std::string>> readCorpus(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open training corpus " + path.string());
  }
  std::vector<std::pair<std::string, std::string>> rows;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
      throw FormatError(path.string() + ":" + std::to_string(lineNo) +
                        ": expected '<motion file>\\t<description>'");
    }
    rows.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  if (rows.size() < 2) {
    throw DataError("training corpus needs at least two lines");
  }
  return rows;
}

} // namespace

void cmdTrain(const RunConfig& config, bool synthetic, std::ostream& log) {
  writeManifest(config, synthetic ? "train --synthetic" : "train");
  auto onEpoch = [&log](int e, const EpochStats& s) {
    log << "epoch " << e << ": H(V)=" << num(s.validLoss) << " H(R)=" << num(s.contrastiveLoss)
        << " loss=" << num(s.totalLoss) << (s.skippedBatches ? " skipped=" + std::to_string(s.skippedBatches) : "")
        << '\n';
  };
  if (synthetic) {
    SyntheticAlignmentOptions o;
    // The task is a fixed-seed benchmark; --seed shifts it rather than replacing it.
    o.seed += config.seed;
    const auto r = runSyntheticAlignment(o);
    saveCheckpoint(config.paths.outputDir / "mobert.ckpt", r.model);
    r.vocab.save(config.paths.outputDir / "vocab.json");
    writeHistory(config, r.training);
    auto out = openOutput(config, "synthetic_eval.csv");
    out << "accuracy,matched_mean,mismatched_mean,gap,accuracy_gate,gap_gate,passed\n"
        << num(r.accuracy) << ',' << num(r.matchedMean) << ',' << num(r.mismatchedMean) << ','
        << num(r.gap()) << ',' << kSyntheticAccuracyGate << ',' << kSyntheticGapGate << ','
        << (r.passes() ? "yes" : "no") << '\n';
    log << "synthetic task: held-out accuracy " << num(r.accuracy) << ", score gap " << num(r.gap())
        << '\n';
    if (!r.passes()) {
      throw TrainingError("synthetic task missed its gate (accuracy >= 0.9, gap >= 0.3)");
    }
    return;
  }

  requirePath(config.paths.trainingCorpus, "paths.training_corpus");
  requirePath(config.paths.motionsDir, "paths.motions_dir");
  const auto rows = readCorpus(config.paths.trainingCorpus);
  std::vector<TrainingSample> corpus;
  std::vector<std::string> texts;
  for (const auto& [file, text] : rows) {
    corpus.push_back({extractFeatures(loadNpy(config.paths.motionsDir / file)), text});
    texts.push_back(text);
  }
  const BpeVocab vocab =
      BpeVocab::train(texts, std::min(config.mobert.vocabSize, config.mobert.model.vocab));
  MoBertModel model(config.mobert.model, InitOptions{config.seed, false});
  TrainingOptions t = config.mobert.training;
  t.seed = config.seed;
  const BagOfWordsCosine similarity;
  const auto result = train(model, vocab, corpus, similarity, t, onEpoch);
  saveCheckpoint(config.paths.outputDir / "mobert.ckpt", model);
  vocab.save(config.paths.outputDir / "vocab.json");
  writeHistory(config, result);
  log << "trained on " << corpus.size() << " pairs; " << result.skippedBatches
      << " degenerate batches skipped\n";
}

void cmdFitRegression(const RunConfig& config, std::ostream& log) {
  if (config.mobert.mode == ScoreMode::Alignment) {
    throw ConfigError("fit-regression needs --mode svr or --mode ridge");
  }
  const RegressionKind kind =
      config.mobert.mode == ScoreMode::Svr ? RegressionKind::RbfSvr : RegressionKind::LinearRidge;
  RunConfig alignment = config;
  alignment.mobert.mode = ScoreMode::Alignment;
  const LoadedMoBert m = loadMoBert(alignment);
  const Dataset d = loadDataset(config, true, log);

  std::vector<size_t> used;
  std::vector<Eigen::VectorXd> feats;
  const std::vector<std::string> sortedModels = distinctModels(d.records);
  std::vector<uint64_t> keys;
  for (size_t i = 0; i < d.records.size(); ++i) {
    if (!d.motions[i]) continue;
    const MotionFeatures f = extractFeatures(*d.motions[i]);
    const auto text = mobertText(m, config.mobert.textFree, d.records[i].prompt,
                                 static_cast<int>(f.frameCount()));
    feats.push_back(extractRegressionFeatures(m.model, f, text.value_or(std::vector<int>{})));
    used.push_back(i);
    const auto modelPos = static_cast<uint64_t>(
        std::find(sortedModels.begin(), sortedModels.end(), d.records[i].modelName) - sortedModels.begin());
    keys.push_back(modelPos << 32 | static_cast<uint32_t>(d.records[i].originalIndex));
  }
  if (static_cast<int>(used.size()) < std::max(kMinRegressionSamples, config.mobert.folds)) {
    throw DataError("fit-regression needs at least " +
                    std::to_string(std::max(kMinRegressionSamples, config.mobert.folds)) + " samples");
  }
  Eigen::MatrixXd x(static_cast<Eigen::Index>(used.size()), feats.front().size());
  Eigen::VectorXd y(x.rows());
  for (size_t k = 0; k < used.size(); ++k) {
    x.row(static_cast<Eigen::Index>(k)) = feats[k].transpose();
    y[static_cast<Eigen::Index>(k)] = d.records[used[k]].rating(config.mobert.target);
  }

  const FoldAssignment folds = kfoldPartition(keys, config.mobert.folds, config.seed);
  const auto oof = kfoldPredictions(
      folds,
      [&](const std::vector<size_t>& train) {
        Eigen::MatrixXd xt(static_cast<Eigen::Index>(train.size()), x.cols());
        Eigen::VectorXd yt(xt.rows());
        for (size_t k = 0; k < train.size(); ++k) {
          xt.row(static_cast<Eigen::Index>(k)) = x.row(static_cast<Eigen::Index>(train[k]));
          yt[static_cast<Eigen::Index>(k)] = y[static_cast<Eigen::Index>(train[k])];
        }
        return RegressionHead::fit(kind, xt, yt);
      },
      [&](const RegressionHead& head, size_t i) {
        return head.predict(Eigen::VectorXd(x.row(static_cast<Eigen::Index>(i)).transpose()));
      });

  writeManifest(config, "fit-regression");
  auto out = openOutput(config, "oof_predictions.csv");
  out << "model_name,original_index,fold,rating,prediction\n";
  for (size_t k = 0; k < used.size(); ++k) {
    const auto& r = d.records[used[k]];
    out << r.modelName << ',' << r.originalIndex << ',' << folds.foldOf[k] << ','
        << num(y[static_cast<Eigen::Index>(k)]) << ',' << num(oof[k]) << '\n';
  }
  const RegressionHead head = RegressionHead::fit(kind, x, y);
  head.save(config.paths.outputDir / ("head_" + toString(kind) + ".json"));
  const auto c = tryPearson(oof, std::vector<double>(y.data(), y.data() + y.size()));
  log << used.size() << " samples, " << config.mobert.folds << "-fold out-of-fold Pearson r vs "
      << toString(config.mobert.target) << ": " << (c ? num(c->r) : "NA") << '\n';
}

double cmdScore(const RunConfig& config, const fs::path& motion, const std::optional<std::string>& text,
                std::ostream& log) {
  const LoadedMoBert m = loadMoBert(config);
  const MotionFeatures f = extractFeatures(loadNpy(motion));
  const bool textFree = config.mobert.textFree || !text;
  const auto ids = mobertText(m, textFree, text.value_or(""), static_cast<int>(f.frameCount()));
  const double v = score(m.model, m.head ? &*m.head : nullptr, config.mobert.mode, f, ids);
  writeManifest(config, "score");
  auto out = openOutput(config, "score.txt");
  out << num(v) << '\n';
  log << num(v) << '\n';
  return v;
}

} // namespace motioneval
