#pragma once

#include "motioneval/motion.h"

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace motioneval {

enum class NpyDtype { Float32, Float64 };

// A dense C-order array read from / written to the npy v1.0 container.
// Values are held as double regardless of the on-disk dtype.
struct NpyArray {
  std::vector<size_t> shape;
  std::vector<double> data;
  NpyDtype dtype = NpyDtype::Float32;

  [[nodiscard]] size_t size() const;
};

// Only v1.0 headers, little-endian '<f4' / '<f8', fortran_order False.
// Anything else throws FormatError.
NpyArray readNpy(const std::filesystem::path& path);
NpyArray parseNpy(const std::string& bytes);

void writeNpy(const std::filesystem::path& path, const NpyArray& array);
std::string serializeNpy(const NpyArray& array);

// Loads an AMASS-style (T, K, 3) joint array, K >= 22, keeping the first 22
// joints. Non-finite values and T < 2 throw DataError.
MotionSequence loadNpy(const std::filesystem::path& path);
MotionSequence motionFromNpy(const NpyArray& array);

void saveNpy(const std::filesystem::path& path, const MotionSequence& motion,
             NpyDtype dtype = NpyDtype::Float32);
NpyArray motionToNpy(const MotionSequence& motion, NpyDtype dtype = NpyDtype::Float32);

} // namespace motioneval
