#include "motioneval/bpe.h"

#include "motioneval/errors.h"

#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace motioneval {

namespace {

const std::vector<std::string> kSpecialNames = {"<pad>", "<cls>", "<text>", "<motion>", "<unk>"};

std::vector<std::string> words(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in(normalizeText(text));
  std::string w;
  while (in >> w) {
    out.push_back(w);
  }
  return out;
}

std::vector<std::string> initialSymbols(const std::string& word) {
  std::vector<std::string> s;
  for (char c : word) {
    s.emplace_back(1, c);
  }
  s.back() += BpeVocab::kEndOfWord;
  return s;
}

void applyMerge(std::vector<std::string>& symbols, const std::string& left,
                const std::string& right) {
  std::vector<std::string> out;
  out.reserve(symbols.size());
  for (size_t i = 0; i < symbols.size(); ++i) {
    if (i + 1 < symbols.size() && symbols[i] == left && symbols[i + 1] == right) {
      out.push_back(left + right);
      ++i;
    } else {
      out.push_back(symbols[i]);
    }
  }
  symbols = std::move(out);
}

} // namespace

std::string normalizeText(std::string_view text) {
  std::string out;
  bool space = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      space = !out.empty();
      continue;
    }
    if (space) {
      out.push_back(' ');
      space = false;
    }
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

BpeVocab BpeVocab::train(const std::vector<std::string>& corpus, int targetSize) {
  std::map<std::string, int> wordFreq;
  for (const auto& line : corpus) {
    for (auto& w : words(line)) {
      ++wordFreq[w];
    }
  }
  if (wordFreq.empty()) {
    throw DataError("BPE training corpus is empty");
  }

  std::vector<std::pair<std::vector<std::string>, int>> segmented;
  std::set<std::string> alphabet;
  for (const auto& [w, f] : wordFreq) {
    auto s = initialSymbols(w);
    alphabet.insert(s.begin(), s.end());
    segmented.emplace_back(std::move(s), f);
  }

  BpeVocab vocab;
  vocab.tokens_ = kSpecialNames;
  vocab.tokens_.insert(vocab.tokens_.end(), alphabet.begin(), alphabet.end());
  if (vocab.size() > targetSize) {
    throw ConfigError("BPE base alphabet (" + std::to_string(vocab.size()) +
                      " symbols incl. specials) exceeds target size " + std::to_string(targetSize));
  }

  while (vocab.size() < targetSize) {
    std::map<std::pair<std::string, std::string>, long> counts;
    for (const auto& [s, f] : segmented) {
      for (size_t i = 0; i + 1 < s.size(); ++i) {
        counts[{s[i], s[i + 1]}] += f;
      }
    }
    // std::map iterates pairs in lexicographic order, so '>' keeps the smallest on ties.
    const std::pair<std::string, std::string>* best = nullptr;
    long bestCount = 0;
    for (const auto& [pair, c] : counts) {
      if (c > bestCount) {
        bestCount = c;
        best = &pair;
      }
    }
    if (best == nullptr || bestCount < 2) {
      break;
    }
    const auto merge = *best;
    for (auto& [s, f] : segmented) {
      applyMerge(s, merge.first, merge.second);
    }
    vocab.merges_.push_back(merge);
    const std::string merged = merge.first + merge.second;
    if (std::find(vocab.tokens_.begin(), vocab.tokens_.end(), merged) == vocab.tokens_.end()) {
      vocab.tokens_.push_back(merged);
    }
  }
  vocab.rebuildIndex();
  return vocab;
}

void BpeVocab::rebuildIndex() {
  tokenIds_.clear();
  for (size_t i = 0; i < tokens_.size(); ++i) {
    tokenIds_[tokens_[i]] = static_cast<int>(i);
  }
  mergeRank_.clear();
  for (size_t i = 0; i < merges_.size(); ++i) {
    mergeRank_.emplace(merges_[i], static_cast<int>(i));
  }
}

int BpeVocab::id(const std::string& token) const {
  auto it = tokenIds_.find(token);
  return it == tokenIds_.end() ? -1 : it->second;
}

std::vector<std::string> BpeVocab::segmentWord(const std::string& word) const {
  auto symbols = initialSymbols(word);
  while (symbols.size() > 1) {
    int bestRank = -1;
    size_t bestAt = 0;
    for (size_t i = 0; i + 1 < symbols.size(); ++i) {
      auto it = mergeRank_.find({symbols[i], symbols[i + 1]});
      if (it != mergeRank_.end() && (bestRank < 0 || it->second < bestRank)) {
        bestRank = it->second;
        bestAt = i;
      }
    }
    if (bestRank < 0) {
      break;
    }
    const auto left = symbols[bestAt];
    const auto right = symbols[bestAt + 1];
    applyMerge(symbols, left, right);
  }
  return symbols;
}

std::vector<int> BpeVocab::encode(std::string_view text) const {
  std::vector<int> ids;
  for (const auto& w : words(text)) {
    for (const auto& s : segmentWord(w)) {
      const int i = id(s);
      ids.push_back(i < 0 ? kUnk : i);
    }
  }
  return ids;
}

std::string BpeVocab::decode(const std::vector<int>& ids) const {
  std::string out;
  for (int i : ids) {
    if (i < kNumSpecials || i >= size()) {
      continue;
    }
    out += token(i);
  }
  std::string result;
  size_t pos = 0;
  while (true) {
    const size_t at = out.find(kEndOfWord, pos);
    if (at == std::string::npos) {
      result += out.substr(pos);
      break;
    }
    result += out.substr(pos, at - pos);
    result += ' ';
    pos = at + kEndOfWord.size();
  }
  while (!result.empty() && result.back() == ' ') {
    result.pop_back();
  }
  return result;
}

std::string BpeVocab::toJson() const {
  nlohmann::json j;
  j["merges"] = nlohmann::json::array();
  for (const auto& [a, b] : merges_) {
    j["merges"].push_back({a, b});
  }
  j["tokens"] = nlohmann::json::object();
  for (size_t i = 0; i < tokens_.size(); ++i) {
    j["tokens"][tokens_[i]] = i;
  }
  return j.dump(1);
}

BpeVocab BpeVocab::fromJson(const std::string& json) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("vocab is not valid JSON: ") + e.what());
  }
  if (!j.contains("merges") || !j.contains("tokens")) {
    throw FormatError("vocab JSON needs 'merges' and 'tokens'");
  }
  BpeVocab v;
  for (const auto& m : j["merges"]) {
    v.merges_.emplace_back(m.at(0).get<std::string>(), m.at(1).get<std::string>());
  }
  v.tokens_.assign(j["tokens"].size(), "");
  for (const auto& [tok, id] : j["tokens"].items()) {
    const auto i = id.get<size_t>();
    if (i >= v.tokens_.size() || !v.tokens_[i].empty()) {
      throw FormatError("vocab token ids are not dense");
    }
    v.tokens_[i] = tok;
  }
  for (size_t i = 0; i < kSpecialNames.size(); ++i) {
    if (i >= v.tokens_.size() || v.tokens_[i] != kSpecialNames[i]) {
      throw FormatError("vocab special tokens are not at their reserved ids");
    }
  }
  v.rebuildIndex();
  return v;
}

void BpeVocab::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) {
    throw DataError("cannot write " + path.string());
  }
  out << toJson() << '\n';
}

BpeVocab BpeVocab::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open vocab " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return fromJson(ss.str());
}

} // namespace motioneval
