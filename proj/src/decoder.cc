// declex/decoder.cc

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

#include "declex/decoder.hpp"

#include "declex/parallel.hpp"

namespace declex {

std::vector<WordId> viterbi_decode(std::span<const WordId> sentence,
                                   const SparseLexicon& lexicon,
                                   const NGramLM& lm, SearchBeams beams) {
  TrellisEngine engine(lexicon, lm, beams);
  return engine.viterbi(sentence).words;
}

Corpus decode_corpus(const Corpus& input, const SparseLexicon& lexicon,
                     const NGramLM& lm, SearchBeams beams, int workers,
                     std::shared_ptr<LMStateCache> cache) {
  TrellisEngine engine(lexicon, lm, beams, std::move(cache));
  Corpus out;
  out.side = Side::kTarget;
  out.sentences.resize(input.sentences.size());
  parallel_for(input.sentences.size(), workers, [&](std::size_t s) {
    if (input.sentences[s].empty()) return;  // empty line in, empty line out
    out.sentences[s] = engine.viterbi(input.sentences[s]).words;
  });
  return out;
}

}  // namespace declex
