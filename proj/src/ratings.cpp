#include "motioneval/ratings.h"

#include "motioneval/errors.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace motioneval {

namespace {

std::vector<std::string> splitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string trim(std::string s) {
  const auto notSpace = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), notSpace));
  s.erase(std::find_if(s.rbegin(), s.rend(), notSpace).base(), s.end());
  return s;
}

template <class T>
bool parseNumber(const std::string& s, T& out) {
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

[[noreturn]] void fail(size_t lineNo, const std::string& what) {
  throw FormatError("ratings CSV line " + std::to_string(lineNo) + ": " + what);
}

} // namespace

std::string motionFileName(std::string_view modelName, int originalIndex) {
  return "AMASS_motion_" + std::string(modelName) + "_" + std::to_string(originalIndex) + ".npy";
}

std::vector<RatingRecord> parseRatingsCsv(const std::string& text) {
  std::vector<RatingRecord> out;
  std::istringstream in(text);
  std::string line;
  size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (trim(line).empty()) {
      continue;
    }
    auto fields = splitCsvLine(line);
    int probe = 0;
    if (out.empty() && lineNo == 1 && !parseNumber(trim(fields[0]), probe)) {
      continue; // header row
    }
    if (fields.size() < 6) {
      fail(lineNo, "expected 6 fields, got " + std::to_string(fields.size()));
    }
    // An unquoted prompt containing commas spills into extra fields.
    std::string prompt = fields[5];
    for (size_t i = 6; i < fields.size(); ++i) {
      prompt += "," + fields[i];
    }

    RatingRecord r;
    if (!parseNumber(trim(fields[0]), r.restrictedIndex)) {
      fail(lineNo, "restricted sample index '" + fields[0] + "' is not an integer");
    }
    r.modelName = trim(fields[1]);
    if (std::find(kModelNames.begin(), kModelNames.end(), r.modelName) == kModelNames.end()) {
      fail(lineNo, "unknown model name '" + r.modelName + "'");
    }
    if (!parseNumber(trim(fields[2]), r.originalIndex)) {
      fail(lineNo, "original sample index '" + fields[2] + "' is not an integer");
    }
    if (!parseNumber(trim(fields[3]), r.naturalness)) {
      fail(lineNo, "naturalness '" + fields[3] + "' is not a number");
    }
    if (!parseNumber(trim(fields[4]), r.faithfulness)) {
      fail(lineNo, "faithfulness '" + fields[4] + "' is not a number");
    }
    for (const double v : {r.naturalness, r.faithfulness}) {
      if (!(v >= kRatingMin && v <= kRatingMax)) {
        fail(lineNo, "rating " + trim(v == r.naturalness ? fields[3] : fields[4]) +
                         " outside the [0,4] Likert range");
      }
    }
    r.prompt = trim(prompt);
    out.push_back(std::move(r));
  }
  if (out.empty()) {
    throw DataError("ratings CSV contains no records");
  }
  return out;
}

std::vector<RatingRecord> readRatingsCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open ratings CSV " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parseRatingsCsv(ss.str());
}

std::vector<std::string> modelNames(const std::vector<RatingRecord>& records) {
  std::vector<std::string> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    out.push_back(r.modelName);
  }
  return out;
}

std::vector<double> ratingValues(const std::vector<RatingRecord>& records, RatingKind kind) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    out.push_back(r.rating(kind));
  }
  return out;
}

} // namespace motioneval
