#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace motioneval {

// Byte-pair-encoding vocabulary over lowercased, whitespace-split text. Word
// ends are marked on the final symbol ("</w>") so decoding restores spaces.
// Ids 0..4 are the reserved specials; the rest are dense.
class BpeVocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kCls = 1;
  static constexpr int kTextStart = 2;
  static constexpr int kMotionStart = 3;
  static constexpr int kUnk = 4;
  static constexpr int kNumSpecials = 5;
  static constexpr std::string_view kEndOfWord = "</w>";

  // Greedy most-frequent-pair merges (ties to the lexicographically smallest
  // pair) until the vocabulary reaches targetSize or no pair occurs twice.
  // Throws DataError for an empty corpus and ConfigError when the base
  // alphabet alone exceeds targetSize.
  static BpeVocab train(const std::vector<std::string>& corpus, int targetSize = 2000);

  [[nodiscard]] std::vector<int> encode(std::string_view text) const;
  [[nodiscard]] std::string decode(const std::vector<int>& ids) const;

  [[nodiscard]] int size() const { return static_cast<int>(tokens_.size()); }
  [[nodiscard]] const std::vector<std::pair<std::string, std::string>>& merges() const {
    return merges_;
  }
  [[nodiscard]] const std::string& token(int id) const { return tokens_.at(static_cast<size_t>(id)); }
  // -1 if unknown.
  [[nodiscard]] int id(const std::string& token) const;

  // {"merges": [["a", "b"], ...], "tokens": {"<pad>": 0, ...}}
  [[nodiscard]] std::string toJson() const;
  static BpeVocab fromJson(const std::string& json);
  void save(const std::filesystem::path& path) const;
  static BpeVocab load(const std::filesystem::path& path);

 private:
  [[nodiscard]] std::vector<std::string> segmentWord(const std::string& word) const;
  void rebuildIndex();

  std::vector<std::pair<std::string, std::string>> merges_;
  std::vector<std::string> tokens_;
  std::map<std::string, int> tokenIds_;
  std::map<std::pair<std::string, std::string>, int> mergeRank_;
};

// Lowercases and collapses whitespace.
std::string normalizeText(std::string_view text);

} // namespace motioneval
