// declex/word_classes.hpp

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

#ifndef DECLEX_WORD_CLASSES_HPP_
#define DECLEX_WORD_CLASSES_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "declex/corpus.hpp"
#include "declex/types.hpp"
#include "declex/vocabulary.hpp"

namespace declex {

/// Word -> class assignment for one language side.  Regular words live in
/// classes 0..num_regular-1; the three special tokens each occupy a
/// singleton class (num_regular..num_regular+2) excluded from exchange.
struct ClassMap {
  std::vector<ClassId> assignment;  // indexed by word id
  int num_classes = 0;              // total, including special classes
  int num_regular = 0;
  ClassId bos_class = -1;
  ClassId eos_class = -1;
  ClassId unk_class = -1;
  Side side = Side::kSource;

  ClassId class_of(WordId w) const;
};

/// Greedy exchange clustering maximizing the class-bigram log-likelihood.
/// Initialization is frequency-rank modulo num_classes; words are swept in
/// frequency order and moved to the best class (ties to the lowest class
/// id) until a sweep makes no move or max_sweeps is reached.  Fully
/// deterministic; the seed is accepted for interface stability but the
/// default initializer draws nothing from it.
ClassMap cluster_exchange(const Corpus& text, const Vocabulary& vocab,
                          int num_classes, int max_sweeps = 10,
                          std::uint64_t seed = 0);

/// Exchange objective: sum_cc' N(c,c') log N(c,c') - 2 sum_c N(c) log N(c)
/// over the class-mapped corpus with sentence-boundary transitions
/// included; 0 log 0 = 0.
double class_bigram_loglik(const Corpus& text, const ClassMap& map);

/// Tokenwise application of the assignment; output ids are class ids.
Corpus map_corpus(const Corpus& text, const ClassMap& map);

/// Vocabulary over class ids: "C<k>" for regular classes, with the special
/// classes doubling as the class vocabulary's special tokens.
Vocabulary class_vocabulary(const ClassMap& map);

/// TSV "word<TAB>class-id", one row per word type in id order.
void write_class_map_tsv(const std::string& path, const ClassMap& map,
                         const Vocabulary& vocab);

/// Reads a class map file; word ids are assigned in file order, so the
/// returned vocabulary is the authoritative id mapping for this side.
std::pair<ClassMap, Vocabulary> read_class_map_tsv(const std::string& path,
                                                   Side side);

}  // namespace declex

#endif  // DECLEX_WORD_CLASSES_HPP_
