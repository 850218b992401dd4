#pragma once

#include "motioneval/mobert_model.h"

#include <filesystem>
#include <iosfwd>

namespace motioneval {

// Layout: "MOBERTv1", uint64 length + config JSON (with feature normalization),
// uint32 tensor count, then per tensor: uint32 name length, name, uint32 ndim,
// int64 dims, float32 data in row-major order. All integers little-endian.
inline constexpr char kCheckpointMagic[] = "MOBERTv1";

void writeCheckpoint(std::ostream& out, const MoBertModel& model);
MoBertModel readCheckpoint(std::istream& in);

void saveCheckpoint(const std::filesystem::path& path, const MoBertModel& model);
MoBertModel loadCheckpoint(const std::filesystem::path& path);

} // namespace motioneval
