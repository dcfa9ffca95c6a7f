// declex/trellis.hpp

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

#ifndef DECLEX_TRELLIS_HPP_
#define DECLEX_TRELLIS_HPP_

#include <memory>
#include <shared_mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "declex/lexicon.hpp"
#include "declex/ngram_lm.hpp"
#include "declex/types.hpp"

namespace declex {

/// Beam settings shared by training and decoding.  kUnlimited disables a
/// beam; preselection is active only when both candidate beams are finite.
struct SearchBeams {
  int histogram = kUnlimited;  // per-position node cap (>= 1 when limited)
  int lex = kUnlimited;        // lexical candidates per source word (0 = none)
  int lm = kUnlimited;         // LM candidates per state (0 = none)
};

/// Posterior distribution over target words for every source position,
/// id-sorted, each summing to one, plus the sentence log-likelihood (a
/// lower bound on the unpruned value while pruning is active).
struct ForwardBackwardResult {
  std::vector<std::vector<std::pair<WordId, double>>> posteriors;
  double loglik = 0.0;
};

struct ViterbiResult {
  std::vector<WordId> words;
  double logscore = 0.0;
};

/// Lexicon-independent per-LM-state data, cached across EM iterations:
/// the top LM continuations with their successor states, and (for small
/// vocabularies) the dense probability vector.  Thread-safe.
class LMStateCache {
 public:
  struct TopArc {
    WordId word;
    double prob;  // linear p(word | state)
    LMState next;
  };
  struct Entry {
    std::vector<TopArc> top_lm;       // by (prob desc, id asc)
    std::vector<double> dense_probs;  // linear, size V; empty if disabled
  };

  LMStateCache(const NGramLM& lm, int lm_beam, bool dense);

  const Entry& get(const LMState& state) const;
  const NGramLM& lm() const { return lm_; }
  int lm_beam() const { return lm_beam_; }
  bool dense() const { return dense_; }

 private:
  const NGramLM& lm_;
  int lm_beam_;
  bool dense_;
  std::vector<WordId> candidate_words_;  // all non-bos/eos ids
  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<LMState, std::unique_ptr<Entry>, LMStateHash>
      cache_;
};

/// One search space over (target word, LM state) nodes per source position,
/// with preselection of candidate target words and per-position histogram
/// pruning.  The same trellis runs in sum mode (forward-backward posteriors)
/// and max mode (Viterbi); both use per-position rescaled probability
/// space.  Implicitly shared read-only across sentence workers.
class TrellisEngine {
 public:
  /// cache may be shared across engines with the same LM and lm beam; pass
  /// nullptr to let the engine own one.
  TrellisEngine(const SparseLexicon& lexicon, const NGramLM& lm,
                SearchBeams beams, std::shared_ptr<LMStateCache> cache = nullptr);

  ForwardBackwardResult forward_backward(std::span<const WordId> sentence) const;
  ViterbiResult viterbi(std::span<const WordId> sentence) const;

  /// Union of the lexical and LM candidate sets for source word f expanded
  /// from `state`, id-sorted.  With any unlimited beam this is every
  /// candidate word.
  std::vector<WordId> preselect(WordId f, const LMState& state) const;

  /// Top lexical candidates for f by smoothed probability (ties to the
  /// lowest target id).
  std::span<const WordId> lex_candidates(WordId f) const;

  bool preselection_active() const { return preselect_; }
  const SparseLexicon& lexicon() const { return lexicon_; }
  const NGramLM& lm() const { return lm_; }

 private:
  struct Workspace;
  void run(std::span<const WordId> sentence, bool max_mode, Workspace* ws) const;

  const SparseLexicon& lexicon_;
  const NGramLM& lm_;
  SearchBeams beams_;
  bool preselect_ = false;
  std::shared_ptr<LMStateCache> cache_;
  std::vector<WordId> all_words_;              // non-bos/eos target ids
  std::vector<std::vector<WordId>> lex_best_;  // per source word
  std::vector<WordId> lex_best_uniform_;       // shared row for implicit init
};

}  // namespace declex

#endif  // DECLEX_TRELLIS_HPP_
