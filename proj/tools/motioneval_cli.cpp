// motioneval: command-line front end.
//
//   motioneval ingest  --config run.json
//   motioneval eval    --config run.json --metrics Root_AE_Position,FID,R-Precision --allowance 1,2,3
//   motioneval correlate --config run.json --scores out/scores.csv --root-scale-search
//   motioneval train   --synthetic --out out/synth
//   motioneval fit-regression --config run.json --mode svr
//   motioneval score   --config run.json --motion a.npy --text "a person walks forward"
//
// Exit codes: 0 ok, 2 configuration, 3 data, 4 numerical / training.

#include "motioneval/commands.h"
#include "motioneval/errors.h"

#include "CLI11.hpp"

#include <iostream>

using namespace motioneval;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<uint64_t> seed;
  std::vector<std::string> metrics;
  std::vector<int> allowance;
  std::string mode;
  bool textFree = false;
  std::string out;
  std::string ratings;
  std::string motions;
  std::string embeddings;
  std::string checkpoints;
};

void addCommon(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "Random seed (overrides config)");
  cmd->add_option("--out", f.out, "Output directory (overrides config)");
  cmd->add_option("--ratings", f.ratings, "ratings_and_captions.csv");
  cmd->add_option("--motions", f.motions, "Directory of AMASS_motion_*.npy files");
  cmd->add_option("--embeddings", f.embeddings, "Directory with motion/text embedding tables");
  cmd->add_option("--checkpoints", f.checkpoints, "Directory with mobert.ckpt, vocab.json, heads");
}

void addMetricFlags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--metrics", f.metrics, "Comma-separated metric names")->delimiter(',');
  cmd->add_option("--allowance", f.allowance, "R-Precision allowances")->delimiter(',');
}

void addMoBertFlags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--mode", f.mode, "MoBERT score mode")
      ->check(CLI::IsMember({"alignment", "svr", "ridge"}));
  cmd->add_flag("--text-free", f.textFree, "Score motions without their text");
}

RunConfig resolve(const CommonFlags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : RunConfig::load(f.config);
  if (f.seed) c.seed = *f.seed;
  if (!f.metrics.empty()) c.metrics = f.metrics;
  if (!f.allowance.empty()) c.allowance = f.allowance;
  if (!f.mode.empty()) c.mobert.mode = parseScoreMode(f.mode);
  if (f.textFree) c.mobert.textFree = true;
  if (!f.out.empty()) c.paths.outputDir = f.out;
  if (!f.ratings.empty()) c.paths.ratingsCsv = f.ratings;
  if (!f.motions.empty()) c.paths.motionsDir = f.motions;
  if (!f.embeddings.empty()) c.paths.embeddings = f.embeddings;
  if (!f.checkpoints.empty()) c.paths.checkpoints = f.checkpoints;
  return c;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Text-to-motion evaluation metrics and the MoBERT evaluator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  CommonFlags f;
  std::string scores;
  std::string motion;
  std::optional<std::string> text;
  std::string corpus;
  bool rootSearch = false;
  bool componentSearch = false;
  bool synthetic = false;

  auto* ingest = app.add_subcommand("ingest", "Validate ratings CSV and motion files");
  addCommon(ingest, f);

  auto* eval = app.add_subcommand("eval", "Per-sample metric scores");
  addCommon(eval, f);
  addMetricFlags(eval, f);
  addMoBertFlags(eval, f);

  auto* correlate = app.add_subcommand("correlate", "Correlate scores with human ratings");
  addCommon(correlate, f);
  addMetricFlags(correlate, f);
  correlate->add_option("--scores", scores, "scores.csv from eval")->check(CLI::ExistingFile);
  correlate->add_flag("--root-scale-search", rootSearch, "Root scaling curves for CE metrics");
  correlate->add_flag("--component-search", componentSearch, "Component weight grid for PV/PVA metrics");

  auto* trainCmd = app.add_subcommand("train", "Train MoBERT");
  addCommon(trainCmd, f);
  trainCmd->add_flag("--synthetic", synthetic, "Use the bundled 8-direction walking task");
  trainCmd->add_option("--corpus", corpus, "Tab-separated motion file / description lines");

  auto* fit = app.add_subcommand("fit-regression", "Fit an SVR or ridge head with 10-fold CV");
  addCommon(fit, f);
  addMoBertFlags(fit, f);

  auto* scoreCmd = app.add_subcommand("score", "Score one motion");
  addCommon(scoreCmd, f);
  addMoBertFlags(scoreCmd, f);
  scoreCmd->add_option("--motion", motion, "Motion npy file")->required()->check(CLI::ExistingFile);
  scoreCmd->add_option("--text", text, "Description (omit for text-free)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig config = resolve(f);
    if (!corpus.empty()) config.paths.trainingCorpus = corpus;
    if (*ingest) {
      cmdIngest(config, std::cout);
    } else if (*eval) {
      cmdEval(config, std::cout);
    } else if (*correlate) {
      if (scores.empty() && !rootSearch && !componentSearch) {
        throw ConfigError("correlate needs --scores or a scaling search flag");
      }
      cmdCorrelate(config, scores, rootSearch, componentSearch, std::cout);
    } else if (*trainCmd) {
      cmdTrain(config, synthetic, std::cout);
    } else if (*fit) {
      cmdFitRegression(config, std::cout);
    } else if (*scoreCmd) {
      cmdScore(config, motion, text, std::cout);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 4;
  } catch (const TrainingError& e) {
    std::cerr << "training error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
