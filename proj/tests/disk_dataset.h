#pragma once

// A small rated dataset written to disk in the published layout: ratings CSV,
// one npy motion per rated sample, motion/text embedding tables and a
// training corpus file. Shared by the command and CLI tests.

#include "motioneval/embedding.h"
#include "motioneval/npy.h"
#include "motioneval/ratings.h"
#include "motioneval/synthetic.h"

#include <algorithm>
#include <fstream>

namespace motioneval::testing {

struct DiskDataset {
  std::filesystem::path root;
  std::filesystem::path ratings;
  std::filesystem::path motions;
  std::filesystem::path embeddings;
  std::filesystem::path corpus;
  int perModel = 0;
  [[nodiscard]] int samples() const { return perModel * static_cast<int>(kModelNames.size()); }
};

inline DiskDataset writeDiskDataset(const std::filesystem::path& root, int perModel, uint64_t seed) {
  namespace fs = std::filesystem;
  DiskDataset d{root, root / "ratings_and_captions.csv", root / "motions", root / "embeddings",
                root / "corpus.tsv", perModel};
  fs::create_directories(d.motions);
  fs::create_directories(d.embeddings);
  Rng rng(seed);
  synthetic::WalkOptions base;
  base.frames = 40;

  std::ofstream csv(d.ratings);
  std::ofstream corpus(d.corpus);
  csv << "restricted_index,model_name,original_index,naturalness,faithfulness,prompt\n";
  const int n = d.samples();
  const int dim = 8;
  EmbeddingTable motionEmb{Modality::Motion, Eigen::MatrixXd(n, dim)};
  EmbeddingTable textEmb{Modality::Text, Eigen::MatrixXd(n, dim)};
  std::vector<Eigen::VectorXd> promptEmb(static_cast<size_t>(perModel));
  for (auto& e : promptEmb) {
    e = Eigen::VectorXd(dim);
    for (int k = 0; k < dim; ++k) e[k] = rng.normal();
  }
  int row = 0;
  for (size_t m = 0; m < kModelNames.size(); ++m) {
    const double quality = 0.05 + 0.1 * static_cast<double>(m); // HumanML3D is cleanest
    for (int i = 0; i < perModel; ++i, ++row) {
      const int cls = i % 8;
      const double angle = 2.0 * 3.14159265358979 * cls / 8.0;
      synthetic::WalkOptions w = base;
      w.noise = m == 0 ? 0.003 : 0.003 + quality * rng.uniform(0.0, 0.1);
      Rng motionRng(seed * 1000 + static_cast<uint64_t>(i) * 7 + (m == 0 ? 0 : m));
      const auto motion = synthetic::walk(angle + (m == 0 ? 0.0 : rng.normal(0.0, quality)),
                                          rng.uniform(0.0, 6.28), w, motionRng);
      const auto name = motionFileName(kModelNames[m], 100 + i);
      saveNpy(d.motions / name, motion);

      const double deviation = w.noise * 10 + rng.uniform(0.0, quality);
      const double nat = std::clamp(3.8 - 3.0 * deviation + rng.normal(0.0, 0.3), 0.0, 4.0);
      const double faith = std::clamp(0.6 * nat + 1.0 + rng.normal(0.0, 0.4), 0.0, 4.0);
      const std::string prompt = std::string("a person walks ") + synthetic::kDirectionNames[cls];
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.2f,%.2f", nat, faith);
      csv << row << ',' << kModelNames[m] << ',' << 100 + i << ',' << buf << ",\"" << prompt
          << "\"\n";
      corpus << name << '\t' << prompt << '\n';

      for (int k = 0; k < dim; ++k) {
        textEmb.rows(row, k) = promptEmb[static_cast<size_t>(i)][k];
        motionEmb.rows(row, k) = promptEmb[static_cast<size_t>(i)][k] + rng.normal(0.0, 0.5 + 2.0 * quality);
      }
    }
  }
  saveEmbeddings(d.embeddings / "motion.f32", motionEmb);
  saveEmbeddings(d.embeddings / "text.f32", textEmb);
  return d;
}

} // namespace motioneval::testing
