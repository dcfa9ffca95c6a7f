// declex/vocabulary.hpp

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

#ifndef DECLEX_VOCABULARY_HPP_
#define DECLEX_VOCABULARY_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "declex/types.hpp"

namespace declex {

/// Dense word <-> id mapping for one language side.  Ids are 0..V-1 and
/// the three special tokens (sentence begin/end, unknown) are present
/// exactly once.  Immutable after construction.
class Vocabulary {
 public:
  static constexpr const char* kBosSurface = "<s>";
  static constexpr const char* kEosSurface = "</s>";
  static constexpr const char* kUnkSurface = "<unk>";

  Vocabulary(std::vector<std::string> words, WordId bos, WordId eos, WordId unk,
             std::vector<std::int64_t> counts = {});

  /// Builds a vocabulary from tokenized text.  Keeps every token with
  /// frequency >= min_count; ids are assigned frequency-descending with
  /// ties broken by first occurrence.  Specials take ids 0..2.
  /// Throws std::runtime_error on an empty corpus.
  static Vocabulary build(const std::vector<std::vector<std::string>>& sentences,
                          std::int64_t min_count);

  std::size_t size() const { return words_.size(); }

  /// Id for a surface form; unseen tokens (and literal begin/end markers,
  /// which may never appear inside a sentence) map to unk.
  WordId encode(std::string_view word) const;
  /// Id or kInvalidWord, without the unk fallback.
  WordId find(std::string_view word) const;

  const std::string& word(WordId id) const { return words_[id]; }
  std::int64_t count(WordId id) const { return counts_[id]; }

  WordId bos() const { return bos_; }
  WordId eos() const { return eos_; }
  WordId unk() const { return unk_; }
  bool is_special(WordId id) const {
    return id == bos_ || id == eos_ || id == unk_;
  }

  /// TSV "id<TAB>word<TAB>count", sorted by id.
  void write_tsv(const std::string& path) const;
  static Vocabulary read_tsv(const std::string& path);

 private:
  std::vector<std::string> words_;
  std::vector<std::int64_t> counts_;
  std::unordered_map<std::string, WordId, std::hash<std::string>,
                     std::equal_to<>>
      index_;
  WordId bos_;
  WordId eos_;
  WordId unk_;
};

}  // namespace declex

#endif  // DECLEX_VOCABULARY_HPP_
