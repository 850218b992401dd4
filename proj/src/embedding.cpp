#include "motioneval/embedding.h"

#include "motioneval/errors.h"

#include "json.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

namespace motioneval {

namespace {

std::filesystem::path manifestPath(const std::filesystem::path& path) {
  auto p = path;
  return p.replace_extension(".json");
}

std::string modalityName(Modality m) {
  return m == Modality::Motion ? "motion" : "text";
}

} // namespace

EmbeddingTable loadEmbeddings(const std::filesystem::path& path) {
  std::ifstream mf(manifestPath(path));
  if (!mf) {
    throw DataError("missing embedding manifest " + manifestPath(path).string());
  }
  nlohmann::json manifest;
  try {
    mf >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("embedding manifest is not valid JSON: " + std::string(e.what()));
  }
  if (!manifest.contains("dim") || !manifest.contains("count") || !manifest.contains("modality")) {
    throw FormatError("embedding manifest needs dim, count and modality");
  }
  const auto dim = manifest["dim"].get<Eigen::Index>();
  const auto count = manifest["count"].get<Eigen::Index>();
  const auto modality = manifest["modality"].get<std::string>();

  EmbeddingTable table;
  if (modality == "motion") {
    table.modality = Modality::Motion;
  } else if (modality == "text") {
    table.modality = Modality::Text;
  } else {
    throw FormatError("embedding modality must be 'motion' or 'text', got '" + modality + "'");
  }
  table.rows.resize(count, dim);

  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open embeddings " + path.string());
  }
  if (path.extension() == ".csv") {
    std::string line;
    Eigen::Index r = 0;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') {
        continue;
      }
      if (r >= count) {
        throw FormatError("embedding CSV has more rows than the manifest count");
      }
      std::stringstream ss(line);
      std::string cell;
      Eigen::Index c = 0;
      while (std::getline(ss, cell, ',')) {
        if (c >= dim) {
          throw FormatError("embedding CSV row " + std::to_string(r) + " is wider than dim");
        }
        try {
          table.rows(r, c++) = std::stod(cell);
        } catch (const std::exception&) {
          throw FormatError("embedding CSV row " + std::to_string(r) + ": bad number '" + cell +
                            "'");
        }
      }
      if (c != dim) {
        throw FormatError("embedding CSV row " + std::to_string(r) + " has " + std::to_string(c) +
                          " values, expected " + std::to_string(dim));
      }
      ++r;
    }
    if (r != count) {
      throw FormatError("embedding CSV has " + std::to_string(r) + " rows, manifest says " +
                        std::to_string(count));
    }
  } else {
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string bytes = ss.str();
    if (bytes.size() != static_cast<size_t>(count * dim) * 4) {
      throw FormatError("embedding binary has " + std::to_string(bytes.size()) +
                        " bytes, expected " + std::to_string(count * dim * 4));
    }
    for (Eigen::Index r = 0; r < count; ++r) {
      for (Eigen::Index c = 0; c < dim; ++c) {
        float v;
        std::memcpy(&v, bytes.data() + (r * dim + c) * 4, 4);
        table.rows(r, c) = v;
      }
    }
  }
  if (!table.rows.allFinite()) {
    throw DataError("embeddings contain non-finite values");
  }
  return table;
}

void saveEmbeddings(const std::filesystem::path& path, const EmbeddingTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write " + path.string());
  }
  for (Eigen::Index r = 0; r < table.rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < table.rows.cols(); ++c) {
      const auto v = static_cast<float>(table.rows(r, c));
      out.write(reinterpret_cast<const char*>(&v), 4);
    }
  }
  nlohmann::json manifest = {{"dim", table.rows.cols()},
                             {"count", table.rows.rows()},
                             {"modality", modalityName(table.modality)}};
  std::ofstream mf(manifestPath(path));
  mf << manifest.dump(2) << '\n';
}

} // namespace motioneval
