// declex/vocabulary.cc

// Copyright 2026  The Declex Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "declex/vocabulary.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace declex {

Vocabulary::Vocabulary(std::vector<std::string> words, WordId bos, WordId eos,
                       WordId unk, std::vector<std::int64_t> counts)
    : words_(std::move(words)),
      counts_(std::move(counts)),
      bos_(bos),
      eos_(eos),
      unk_(unk) {
  if (counts_.empty()) counts_.assign(words_.size(), 0);
  if (counts_.size() != words_.size())
    throw std::runtime_error("vocabulary: counts/words size mismatch");
  if (bos_ < 0 || eos_ < 0 || unk_ < 0 ||
      static_cast<std::size_t>(bos_) >= words_.size() ||
      static_cast<std::size_t>(eos_) >= words_.size() ||
      static_cast<std::size_t>(unk_) >= words_.size() || bos_ == eos_ ||
      bos_ == unk_ || eos_ == unk_)
    throw std::runtime_error("vocabulary: invalid special token ids");
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    auto [it, inserted] = index_.emplace(words_[i], static_cast<WordId>(i));
    if (!inserted)
      throw std::runtime_error("vocabulary: duplicate word '" + words_[i] + "'");
  }
}

Vocabulary Vocabulary::build(
    const std::vector<std::vector<std::string>>& sentences,
    std::int64_t min_count) {
  if (min_count < 1) throw std::runtime_error("vocabulary: min_count must be >= 1");
  if (sentences.empty()) throw std::runtime_error("empty corpus");

  std::unordered_map<std::string, std::int64_t> freq;
  std::unordered_map<std::string, std::int64_t> first_seen;
  std::int64_t position = 0;
  for (const auto& sent : sentences) {
    for (const auto& tok : sent) {
      auto [it, inserted] = first_seen.emplace(tok, position);
      (void)it;
      ++freq[tok];
      ++position;
    }
  }
  if (position == 0) throw std::runtime_error("empty corpus");

  struct Cand {
    const std::string* word;
    std::int64_t count;
    std::int64_t first;
  };
  std::vector<Cand> kept;
  kept.reserve(freq.size());
  for (const auto& [word, count] : freq) {
    if (count < min_count) continue;
    if (word == kBosSurface || word == kEosSurface || word == kUnkSurface)
      continue;  // markers never become regular entries
    kept.push_back({&word, count, first_seen[word]});
  }
  std::sort(kept.begin(), kept.end(), [](const Cand& a, const Cand& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.first < b.first;
  });

  std::vector<std::string> words = {kBosSurface, kEosSurface, kUnkSurface};
  std::vector<std::int64_t> counts = {0, 0, 0};
  words.reserve(kept.size() + 3);
  counts.reserve(kept.size() + 3);
  std::int64_t unk_mass = 0;
  for (const auto& c : kept) {
    words.push_back(*c.word);
    counts.push_back(c.count);
  }
  for (const auto& [word, count] : freq) {
    if (count < min_count || word == kBosSurface || word == kEosSurface ||
        word == kUnkSurface)
      unk_mass += count;
  }
  counts[2] = unk_mass;  // below-threshold tokens fold into unk
  return Vocabulary(std::move(words), 0, 1, 2, std::move(counts));
}

WordId Vocabulary::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? kInvalidWord : it->second;
}

WordId Vocabulary::encode(std::string_view word) const {
  // Literal sentence markers in running text would violate the corpus
  // invariant, so they fall through to unk.
  if (word == kBosSurface || word == kEosSurface) return unk_;
  WordId id = find(word);
  return id == kInvalidWord ? unk_ : id;
}

void Vocabulary::write_tsv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  for (std::size_t i = 0; i < words_.size(); ++i)
    out << i << '\t' << words_[i] << '\t' << counts_[i] << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

Vocabulary Vocabulary::read_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::vector<std::string> words;
  std::vector<std::int64_t> counts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string id_str, word, count_str;
    if (!std::getline(ss, id_str, '\t') || !std::getline(ss, word, '\t') ||
        !std::getline(ss, count_str, '\t'))
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": malformed vocabulary row");
    std::size_t id = std::stoul(id_str);
    if (id != words.size())
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": ids must be dense and sorted");
    words.push_back(word);
    counts.push_back(std::stoll(count_str));
  }
  WordId bos = kInvalidWord, eos = kInvalidWord, unk = kInvalidWord;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (words[i] == kBosSurface) bos = static_cast<WordId>(i);
    if (words[i] == kEosSurface) eos = static_cast<WordId>(i);
    if (words[i] == kUnkSurface) unk = static_cast<WordId>(i);
  }
  if (bos == kInvalidWord || eos == kInvalidWord || unk == kInvalidWord)
    throw std::runtime_error(path + ": missing special tokens");
  return Vocabulary(std::move(words), bos, eos, unk, std::move(counts));
}

}  // namespace declex
