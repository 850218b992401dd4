#include "motioneval/npy.h"

#include "motioneval/errors.h"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <regex>
#include <sstream>

namespace motioneval {

static_assert(std::endian::native == std::endian::little, "npy I/O assumes a little-endian host");

namespace {

constexpr char kMagic[] = "\x93NUMPY";
constexpr size_t kMagicLen = 6;
constexpr size_t kPreludeLen = kMagicLen + 2 + 2;

std::string readFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Pulls the value of a key out of the python-literal header dict.
std::string headerValue(const std::string& header, const std::string& key) {
  const std::regex re("['\"]" + key + "['\"]\\s*:\\s*(\\([^)]*\\)|'[^']*'|\"[^\"]*\"|\\w+)");
  std::smatch m;
  if (!std::regex_search(header, m, re)) {
    throw FormatError("npy header missing key '" + key + "'");
  }
  return m[1].str();
}

std::vector<size_t> parseShape(const std::string& text) {
  std::vector<size_t> shape;
  const std::regex num("\\d+");
  for (auto it = std::sregex_iterator(text.begin(), text.end(), num); it != std::sregex_iterator();
       ++it) {
    shape.push_back(static_cast<size_t>(std::stoull(it->str())));
  }
  return shape;
}

} // namespace

size_t NpyArray::size() const {
  size_t n = 1;
  for (size_t d : shape) {
    n *= d;
  }
  return n;
}

NpyArray parseNpy(const std::string& bytes) {
  if (bytes.size() < kPreludeLen || std::memcmp(bytes.data(), kMagic, kMagicLen) != 0) {
    throw FormatError("not an npy file (bad magic)");
  }
  const auto major = static_cast<uint8_t>(bytes[6]);
  const auto minor = static_cast<uint8_t>(bytes[7]);
  if (major != 1 || minor != 0) {
    throw FormatError("unsupported npy version " + std::to_string(major) + "." +
                      std::to_string(minor) + " (only 1.0)");
  }
  const size_t headerLen =
      static_cast<uint8_t>(bytes[8]) | (static_cast<size_t>(static_cast<uint8_t>(bytes[9])) << 8);
  if (bytes.size() < kPreludeLen + headerLen) {
    throw FormatError("truncated npy header");
  }
  const std::string header = bytes.substr(kPreludeLen, headerLen);

  NpyArray out;
  const std::string descr = headerValue(header, "descr");
  if (descr == "'<f4'" || descr == "\"<f4\"") {
    out.dtype = NpyDtype::Float32;
  } else if (descr == "'<f8'" || descr == "\"<f8\"") {
    out.dtype = NpyDtype::Float64;
  } else {
    throw FormatError("unsupported npy dtype " + descr + " (need <f4 or <f8)");
  }
  if (headerValue(header, "fortran_order") != "False") {
    throw FormatError("fortran-order npy arrays are not supported");
  }
  out.shape = parseShape(headerValue(header, "shape"));

  const size_t count = out.size();
  const size_t width = out.dtype == NpyDtype::Float32 ? 4 : 8;
  const size_t offset = kPreludeLen + headerLen;
  if (bytes.size() - offset != count * width) {
    throw FormatError("npy payload has " + std::to_string(bytes.size() - offset) +
                      " bytes, expected " + std::to_string(count * width));
  }
  out.data.resize(count);
  const char* p = bytes.data() + offset;
  for (size_t i = 0; i < count; ++i) {
    if (out.dtype == NpyDtype::Float32) {
      float v;
      std::memcpy(&v, p + i * 4, 4);
      out.data[i] = v;
    } else {
      double v;
      std::memcpy(&v, p + i * 8, 8);
      out.data[i] = v;
    }
  }
  return out;
}

NpyArray readNpy(const std::filesystem::path& path) {
  try {
    return parseNpy(readFile(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string serializeNpy(const NpyArray& array) {
  if (array.data.size() != array.size()) {
    throw ShapeError("npy array data does not match its shape");
  }
  std::string shape = "(";
  for (size_t i = 0; i < array.shape.size(); ++i) {
    shape += std::to_string(array.shape[i]);
    if (array.shape.size() == 1 || i + 1 < array.shape.size()) {
      shape += ",";
    }
    if (i + 1 < array.shape.size()) {
      shape += " ";
    }
  }
  shape += ")";
  std::string header = std::string("{'descr': '") +
                       (array.dtype == NpyDtype::Float32 ? "<f4" : "<f8") +
                       "', 'fortran_order': False, 'shape': " + shape + ", }";
  // Pad so the payload starts on a 64-byte boundary; header ends with '\n'.
  const size_t total = kPreludeLen + header.size() + 1;
  header.append((64 - total % 64) % 64, ' ');
  header.push_back('\n');

  std::string out(kMagic, kMagicLen);
  out.push_back('\x01');
  out.push_back('\x00');
  out.push_back(static_cast<char>(header.size() & 0xff));
  out.push_back(static_cast<char>((header.size() >> 8) & 0xff));
  out += header;
  for (double v : array.data) {
    if (array.dtype == NpyDtype::Float32) {
      const auto f = static_cast<float>(v);
      out.append(reinterpret_cast<const char*>(&f), 4);
    } else {
      out.append(reinterpret_cast<const char*>(&v), 8);
    }
  }
  return out;
}

void writeNpy(const std::filesystem::path& path, const NpyArray& array) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write " + path.string());
  }
  const std::string bytes = serializeNpy(array);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

MotionSequence motionFromNpy(const NpyArray& array) {
  if (array.shape.size() != 3 || array.shape[2] != 3 || array.shape[1] < kNumJoints) {
    std::string s;
    for (size_t d : array.shape) {
      s += std::to_string(d) + ",";
    }
    throw FormatError("motion array must have shape (T, K>=22, 3), got (" + s + ")");
  }
  const size_t frames = array.shape[0];
  const size_t joints = array.shape[1];
  if (frames < 2) {
    throw DataError("motion needs at least 2 frames, got " + std::to_string(frames));
  }
  std::vector<Pose> poses(frames);
  for (size_t t = 0; t < frames; ++t) {
    for (int j = 0; j < kNumJoints; ++j) {
      for (int a = 0; a < 3; ++a) {
        const double v = array.data[(t * joints + j) * 3 + a];
        if (!std::isfinite(v)) {
          throw DataError("non-finite coordinate at frame " + std::to_string(t) + ", joint " +
                          std::to_string(j));
        }
        poses[t](j, a) = v;
      }
    }
  }
  return MotionSequence(std::move(poses));
}

MotionSequence loadNpy(const std::filesystem::path& path) {
  try {
    return motionFromNpy(readNpy(path));
  } catch (const FormatError&) {
    throw;
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

NpyArray motionToNpy(const MotionSequence& motion, NpyDtype dtype) {
  NpyArray a;
  a.shape = {motion.frameCount(), static_cast<size_t>(kNumJoints), 3};
  a.data = motion.flat();
  a.dtype = dtype;
  return a;
}

void saveNpy(const std::filesystem::path& path, const MotionSequence& motion, NpyDtype dtype) {
  writeNpy(path, motionToNpy(motion, dtype));
}

} // namespace motioneval
