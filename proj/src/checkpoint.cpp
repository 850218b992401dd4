#include "motioneval/checkpoint.h"

#include "motioneval/errors.h"

#include "json.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace motioneval {

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian");

constexpr size_t kMagicLen = sizeof(kCheckpointMagic) - 1;

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in, const char* what) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw FormatError(std::string("checkpoint truncated reading ") + what);
  }
  return v;
}

std::vector<float> toFloats(const Eigen::RowVectorXd& v) {
  std::vector<float> out(static_cast<size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<size_t>(i)] = static_cast<float>(v[i]);
  return out;
}

Eigen::RowVectorXd fromFloats(const std::vector<float>& v) {
  Eigen::RowVectorXd out(static_cast<Eigen::Index>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

} // namespace

void writeCheckpoint(std::ostream& out, const MoBertModel& model) {
  nlohmann::json header = nlohmann::json::parse(model.config().toJson());
  header["feature_mean"] = toFloats(model.featureMean);
  header["feature_std"] = toFloats(model.featureStd);
  const std::string json = header.dump();

  out.write(kCheckpointMagic, kMagicLen);
  put<uint64_t>(out, json.size());
  out.write(json.data(), static_cast<std::streamsize>(json.size()));
  const auto& params = model.parameters();
  put<uint32_t>(out, static_cast<uint32_t>(params.size()));
  std::vector<float> buf;
  for (const auto& p : params) {
    put<uint32_t>(out, static_cast<uint32_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    put<uint32_t>(out, static_cast<uint32_t>(p.shape.size()));
    for (int64_t d : p.shape) put<int64_t>(out, d);
    buf.resize(static_cast<size_t>(p.value.size()));
    for (Eigen::Index r = 0, k = 0; r < p.value.rows(); ++r) {
      for (Eigen::Index c = 0; c < p.value.cols(); ++c) {
        buf[static_cast<size_t>(k++)] = static_cast<float>(p.value(r, c));
      }
    }
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
  }
  if (!out) {
    throw DataError("failed writing checkpoint");
  }
}

MoBertModel readCheckpoint(std::istream& in) {
  char magic[kMagicLen];
  if (!in.read(magic, kMagicLen) || std::memcmp(magic, kCheckpointMagic, kMagicLen) != 0) {
    throw FormatError("not a MoBERT checkpoint (bad magic)");
  }
  const auto jsonLen = get<uint64_t>(in, "config length");
  if (jsonLen > (1u << 24)) {
    throw FormatError("checkpoint config block is implausibly large");
  }
  std::string json(jsonLen, '\0');
  if (!in.read(json.data(), static_cast<std::streamsize>(jsonLen))) {
    throw FormatError("checkpoint truncated in config block");
  }
  MoBertModel model = MoBertModel::uninitialized(MoBertConfig::fromJson(json));
  const auto header = nlohmann::json::parse(json);
  if (header.contains("feature_mean")) {
    model.featureMean = fromFloats(header["feature_mean"].get<std::vector<float>>());
    model.featureStd = fromFloats(header["feature_std"].get<std::vector<float>>());
    if (model.featureMean.size() != model.config().frameDim ||
        model.featureStd.size() != model.config().frameDim) {
      throw FormatError("checkpoint feature normalization has the wrong width");
    }
  }

  auto& params = model.parameters();
  const auto count = get<uint32_t>(in, "tensor count");
  if (count != params.size()) {
    throw FormatError("checkpoint holds " + std::to_string(count) + " tensors, config needs " +
                      std::to_string(params.size()));
  }
  std::vector<bool> seen(params.size(), false);
  std::vector<float> buf;
  for (uint32_t t = 0; t < count; ++t) {
    const auto nameLen = get<uint32_t>(in, "tensor name length");
    std::string name(nameLen, '\0');
    if (!in.read(name.data(), nameLen)) {
      throw FormatError("checkpoint truncated in tensor name");
    }
    const int idx = model.parameterIndex(name);
    if (idx < 0 || seen[static_cast<size_t>(idx)]) {
      throw FormatError("unexpected or duplicate tensor " + name);
    }
    seen[static_cast<size_t>(idx)] = true;
    auto& p = params[static_cast<size_t>(idx)];
    const auto ndim = get<uint32_t>(in, "tensor rank");
    std::vector<int64_t> shape(ndim);
    for (auto& d : shape) d = get<int64_t>(in, "tensor dims");
    if (shape != p.shape) {
      throw FormatError("tensor " + name + " has the wrong shape");
    }
    buf.resize(static_cast<size_t>(p.value.size()));
    if (!in.read(reinterpret_cast<char*>(buf.data()),
                 static_cast<std::streamsize>(buf.size() * sizeof(float)))) {
      throw FormatError("checkpoint truncated in tensor " + name);
    }
    for (Eigen::Index r = 0, k = 0; r < p.value.rows(); ++r) {
      for (Eigen::Index c = 0; c < p.value.cols(); ++c) {
        p.value(r, c) = buf[static_cast<size_t>(k++)];
      }
    }
  }
  model.checkFinite();
  return model;
}

void saveCheckpoint(const std::filesystem::path& path, const MoBertModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write " + path.string());
  }
  writeCheckpoint(out, model);
}

MoBertModel loadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open checkpoint " + path.string());
  }
  return readCheckpoint(in);
}

} // namespace motioneval
