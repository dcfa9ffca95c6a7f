// declex/corpus.hpp

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

#ifndef DECLEX_CORPUS_HPP_
#define DECLEX_CORPUS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "declex/types.hpp"
#include "declex/vocabulary.hpp"

namespace declex {

enum class Side { kSource, kTarget };

/// Encoded text: one id sequence per sentence.  Sentence begin/end ids are
/// never embedded; scoring adds them implicitly.
struct Corpus {
  std::vector<std::vector<WordId>> sentences;
  Side side = Side::kSource;

  std::size_t num_sentences() const { return sentences.size(); }
  std::size_t num_tokens() const;
};

using TokenizedText = std::vector<std::vector<std::string>>;

/// One alignment link, 0-based positions.
struct AlignmentLink {
  int src = 0;
  int tgt = 0;
  bool operator==(const AlignmentLink&) const = default;
};
using SentenceAlignment = std::vector<AlignmentLink>;

/// The word-substitution task: token-parallel source input and reference,
/// plus a disjoint target half for LM training.
struct MonotoneTask {
  Corpus source_input;  // source side, first corpus part
  Corpus reference;     // target side, token-parallel to source_input
  Corpus lm_text;       // target side, second corpus part
  Vocabulary src_vocab;
  Vocabulary tgt_vocab;
};

// --- text / alignment I/O ---------------------------------------------------

/// One sentence per line, tokens space-separated, UTF-8.
TokenizedText read_tokenized(const std::string& path);
void write_tokenized(const std::string& path, const TokenizedText& text);

Corpus encode_corpus(const TokenizedText& text, const Vocabulary& vocab,
                     Side side);
TokenizedText decode_corpus(const Corpus& corpus, const Vocabulary& vocab);

/// One line per sentence pair of space-separated "i-j" links, 0-based.
std::vector<SentenceAlignment> read_alignments(const std::string& path);

// --- task construction -------------------------------------------------------

/// Rearranges the source words of a parallel corpus to be monotonically
/// aligned with the target words.  Only links whose source and target
/// positions each participate in exactly one link are kept; kept source
/// words are ordered by their target position.  Sentences left empty are
/// dropped.  The first split_fraction of the surviving sentences form the
/// (source_input, reference) pair; the rest contribute their target side
/// as LM text.  Vocabularies are built with min_count (source side from
/// source_input, target side from reference + lm_text).
MonotoneTask build_monotone_task(const TokenizedText& source,
                                 const TokenizedText& target,
                                 const std::vector<SentenceAlignment>& alignments,
                                 double split_fraction,
                                 std::int64_t min_count = 1);

// --- synthetic tasks ---------------------------------------------------------

/// Deterministic substitution analog of the task: source_input is `key`
/// applied tokenwise to the first split_fraction of target_text, the
/// reference is that same part, and lm_text is the remainder.  `key` must
/// be a bijection over 0..V-1 fixing the special ids.  Source surfaces
/// are "c<id>".
MonotoneTask generate_synthetic_cipher(const Corpus& target_text,
                                       const Vocabulary& tgt_vocab,
                                       const std::vector<WordId>& key,
                                       double split_fraction = 0.5);

/// Like generate_synthetic_cipher, but each token is enciphered with
/// `key_alt` instead of `key` with probability ambiguity (seeded), so the
/// true lexicon rows carry more than one entry.
MonotoneTask generate_ambiguous_cipher(const Corpus& target_text,
                                       const Vocabulary& tgt_vocab,
                                       const std::vector<WordId>& key,
                                       const std::vector<WordId>& key_alt,
                                       double ambiguity, std::uint64_t seed,
                                       double split_fraction = 0.5);

/// Random permutation of the non-special ids of a vocabulary of size v.
std::vector<WordId> random_substitution_key(const Vocabulary& vocab,
                                            std::uint64_t seed);

/// Samples sentences from a seeded word-bigram chain with skewed successor
/// distributions.  Used to build decipherable synthetic corpora for tests
/// and the `synth` command.
Corpus sample_synthetic_text(const Vocabulary& vocab, std::size_t num_sentences,
                             int min_len, int max_len, std::uint64_t seed);

/// Vocabulary with `num_words` regular types "w0".."w<n-1>" plus specials.
Vocabulary synthetic_vocabulary(int num_words);

}  // namespace declex

#endif  // DECLEX_CORPUS_HPP_
