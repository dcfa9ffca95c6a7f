// declex/decoder.hpp

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

#ifndef DECLEX_DECODER_HPP_
#define DECLEX_DECODER_HPP_

#include <memory>
#include <span>
#include <vector>

#include "declex/corpus.hpp"
#include "declex/lexicon.hpp"
#include "declex/ngram_lm.hpp"
#include "declex/trellis.hpp"
#include "declex/types.hpp"

namespace declex {

/// Best target sequence for one source sentence: max-product search over
/// the same trellis the trainer uses.  Output length equals input length;
/// with all beams unlimited this is the exact argmax.
std::vector<WordId> viterbi_decode(std::span<const WordId> sentence,
                                   const SparseLexicon& lexicon,
                                   const NGramLM& lm, SearchBeams beams = {});

/// Decodes every sentence (in parallel when workers != 1).
Corpus decode_corpus(const Corpus& input, const SparseLexicon& lexicon,
                     const NGramLM& lm, SearchBeams beams = {}, int workers = 0,
                     std::shared_ptr<LMStateCache> cache = nullptr);

}  // namespace declex

#endif  // DECLEX_DECODER_HPP_
