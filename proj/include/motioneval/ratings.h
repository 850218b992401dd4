#pragma once

#include "motioneval/correlation.h"

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace motioneval {

inline constexpr std::array<std::string_view, 5> kModelNames = {
    "HumanML3D", "MotionDiffuse", "text2motion", "TM2T", "MDM"};
inline constexpr std::string_view kReferenceModel = "HumanML3D";
inline constexpr double kRatingMin = 0.0;
inline constexpr double kRatingMax = 4.0;

// One row of ratings_and_captions.csv, fields in file order.
struct RatingRecord {
  int restrictedIndex = 0;
  std::string modelName;
  int originalIndex = 0;
  double naturalness = 0.0;
  double faithfulness = 0.0;
  std::string prompt;

  [[nodiscard]] double rating(RatingKind kind) const {
    return kind == RatingKind::Naturalness ? naturalness : faithfulness;
  }
};

// Motion file name for a record: AMASS_motion_{ModelName}_{SampleIndex}.npy,
// SampleIndex being the original sample index.
std::string motionFileName(std::string_view modelName, int originalIndex);

// Parses the CSV. A leading header row (non-numeric first field) is skipped.
// A prompt containing commas may be quoted or left as the unquoted tail.
// Schema violations throw FormatError naming the line; no rows throw DataError.
std::vector<RatingRecord> parseRatingsCsv(const std::string& text);
std::vector<RatingRecord> readRatingsCsv(const std::filesystem::path& path);

std::vector<std::string> modelNames(const std::vector<RatingRecord>& records);
std::vector<double> ratingValues(const std::vector<RatingRecord>& records, RatingKind kind);

} // namespace motioneval
