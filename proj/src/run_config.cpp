#include "motioneval/run_config.h"

#include "motioneval/errors.h"

#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace motioneval {

namespace {

using nlohmann::json;

void rejectUnknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) {
      throw ConfigError("unknown key '" + k + "' in " + where);
    }
  }
}

template <class T>
void read(const json& j, const char* key, T& into) {
  if (j.contains(key)) {
    into = j.at(key).get<T>();
  }
}

void readPath(const json& j, const char* key, std::filesystem::path& into) {
  if (j.contains(key)) {
    into = j.at(key).get<std::string>();
  }
}

std::string toString(MeanDistance d) {
  return d == MeanDistance::Squared ? "squared" : "euclidean";
}

MeanDistance parseMeanDistance(const std::string& s) {
  if (s == "squared") return MeanDistance::Squared;
  if (s == "euclidean") return MeanDistance::Euclidean;
  throw ConfigError("fid_mean_distance must be squared or euclidean");
}

RatingKind parseRating(const std::string& s) {
  if (s == "naturalness") return RatingKind::Naturalness;
  if (s == "faithfulness") return RatingKind::Faithfulness;
  throw ConfigError("rating must be naturalness or faithfulness");
}

} // namespace

RunConfig RunConfig::fromJson(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  try {
    rejectUnknown(j, {"seed", "paths", "metrics", "root_scale", "weights", "allowance",
                      "fid_mean_distance", "mobert"},
                  "config");
    read(j, "seed", c.seed);
    if (j.contains("paths")) {
      const auto& p = j["paths"];
      rejectUnknown(p, {"ratings_csv", "motions_dir", "embeddings", "checkpoints", "output_dir",
                        "training_corpus"},
                    "paths");
      readPath(p, "ratings_csv", c.paths.ratingsCsv);
      readPath(p, "motions_dir", c.paths.motionsDir);
      readPath(p, "embeddings", c.paths.embeddings);
      readPath(p, "checkpoints", c.paths.checkpoints);
      readPath(p, "output_dir", c.paths.outputDir);
      readPath(p, "training_corpus", c.paths.trainingCorpus);
    }
    read(j, "metrics", c.metrics);
    read(j, "root_scale", c.rootScale);
    if (j.contains("weights")) {
      const auto& w = j["weights"];
      rejectUnknown(w, {"position", "velocity", "acceleration"}, "weights");
      read(w, "position", c.weights.position);
      read(w, "velocity", c.weights.velocity);
      read(w, "acceleration", c.weights.acceleration);
    }
    read(j, "allowance", c.allowance);
    if (j.contains("fid_mean_distance")) {
      c.fidMeanDistance = parseMeanDistance(j["fid_mean_distance"].get<std::string>());
    }
    if (j.contains("mobert")) {
      const auto& m = j["mobert"];
      rejectUnknown(m, {"mode", "text_free", "target", "folds", "vocab_size", "model", "reduced",
                        "training"},
                    "mobert");
      if (m.contains("mode")) c.mobert.mode = parseScoreMode(m["mode"].get<std::string>());
      read(m, "text_free", c.mobert.textFree);
      if (m.contains("target")) c.mobert.target = parseRating(m["target"].get<std::string>());
      read(m, "folds", c.mobert.folds);
      read(m, "vocab_size", c.mobert.vocabSize);
      if (m.value("reduced", false)) c.mobert.model = MoBertConfig::reduced();
      if (m.contains("model")) {
        json merged = json::parse(c.mobert.model.toJson());
        merged.update(m["model"]);
        c.mobert.model = MoBertConfig::fromJson(merged.dump());
      }
      if (m.contains("training")) {
        const auto& t = m["training"];
        rejectUnknown(t, {"epochs", "batch_size", "learning_rate", "grad_clip", "loss", "dropout"},
                      "mobert.training");
        auto& o = c.mobert.training;
        read(t, "epochs", o.epochs);
        read(t, "batch_size", o.batchSize);
        read(t, "learning_rate", o.adam.learningRate);
        read(t, "grad_clip", o.adam.gradClip);
        read(t, "dropout", o.dropout);
        if (t.contains("loss")) o.loss = parseLossKind(t["loss"].get<std::string>());
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field has the wrong type: ") + e.what());
  }
  c.mobert.model.validate();
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return fromJson(ss.str());
}

std::string RunConfig::toJson() const {
  const auto& t = mobert.training;
  json j = {
      {"seed", seed},
      {"paths",
       {{"ratings_csv", paths.ratingsCsv.string()},
        {"motions_dir", paths.motionsDir.string()},
        {"embeddings", paths.embeddings.string()},
        {"checkpoints", paths.checkpoints.string()},
        {"output_dir", paths.outputDir.string()},
        {"training_corpus", paths.trainingCorpus.string()}}},
      {"metrics", metrics},
      {"root_scale", rootScale},
      {"weights",
       {{"position", weights.position},
        {"velocity", weights.velocity},
        {"acceleration", weights.acceleration}}},
      {"allowance", allowance},
      {"fid_mean_distance", toString(fidMeanDistance)},
      {"mobert",
       {{"mode", toString(mobert.mode)},
        {"text_free", mobert.textFree},
        {"target", std::string(toString(mobert.target))},
        {"folds", mobert.folds},
        {"vocab_size", mobert.vocabSize},
        {"model", json::parse(mobert.model.toJson())},
        {"training",
         {{"epochs", t.epochs},
          {"batch_size", t.batchSize},
          {"learning_rate", t.adam.learningRate},
          {"grad_clip", t.adam.gradClip},
          {"loss", toString(t.loss)},
          {"dropout", t.dropout}}}}},
  };
  return j.dump(2);
}

std::string RunConfig::hash() const {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : toJson()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string outputHeader(const RunConfig& config) {
  return "# motioneval " + std::string(kToolVersion) + " config=" + config.hash() +
         " seed=" + std::to_string(config.seed);
}

void writeManifest(const RunConfig& config, const std::string& command) {
  std::filesystem::create_directories(config.paths.outputDir);
  json m = {
      {"tool", "motioneval"},
      {"version", std::string(kToolVersion)},
      {"command", command},
      {"seed", config.seed},
      {"config_hash", config.hash()},
      {"config", json::parse(config.toJson())},
  };
  std::ofstream out(config.paths.outputDir / "manifest.json");
  if (!out) {
    throw DataError("cannot write manifest in " + config.paths.outputDir.string());
  }
  out << m.dump(2) << '\n';
}

} // namespace motioneval
