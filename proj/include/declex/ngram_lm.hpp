// declex/ngram_lm.hpp

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

#ifndef DECLEX_NGRAM_LM_HPP_
#define DECLEX_NGRAM_LM_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "declex/corpus.hpp"
#include "declex/types.hpp"
#include "declex/vocabulary.hpp"

namespace declex {

/// Truncated history of at most order-1 words, oldest first.  States with
/// identical histories compare equal, so they can key recombination maps.
class LMState {
 public:
  static constexpr int kMaxHistory = 7;

  LMState() = default;

  int length() const { return len_; }
  WordId at(int i) const { return hist_[i]; }

  /// Appends w, dropping the oldest entry beyond max_len.
  void push(WordId w, int max_len);
  void drop_oldest();
  void clear() { len_ = 0; }

  bool operator==(const LMState& other) const {
    if (len_ != other.len_) return false;
    for (int i = 0; i < len_; ++i)
      if (hist_[i] != other.hist_[i]) return false;
    return true;
  }

  std::size_t hash() const;

 private:
  std::array<WordId, kMaxHistory> hist_{};
  std::int8_t len_ = 0;
};

struct LMStateHash {
  std::size_t operator()(const LMState& s) const { return s.hash(); }
};

/// Interpolated Kneser-Ney backoff n-gram model over one vocabulary.
/// Natural log internally; ARPA I/O converts to/from log10.  Immutable
/// after construction; queries are thread-safe.
class NGramLM {
 public:
  /// Trains an interpolated Kneser-Ney model of the given order (1..8).
  /// discounts: empty = estimate D = n1/(n1+2*n2) per order from
  /// count-of-count statistics; one value = same discount for all orders;
  /// otherwise one value per order, each in [0,1).
  static NGramLM train(const Corpus& text, const Vocabulary& vocab, int order,
                       const std::vector<double>& discounts = {});

  int order() const { return order_; }
  const Vocabulary& vocab() const { return vocab_; }

  /// State conditioned on sentence begin.
  LMState begin_state() const;

  /// Log-probability of w given the state plus the successor state
  /// (history extended by w, truncated to the longest stored suffix).
  std::pair<double, LMState> score(const LMState& state, WordId w) const;

  /// Successor state only.
  LMState next_state(const LMState& state, WordId w) const;

  /// Log-probability only (no successor state).
  double logprob(const LMState& state, WordId w) const;
  double score_eos(const LMState& state) const { return logprob(state, eos_); }

  /// Full-sentence log-probability including the sentence-end event.
  double sentence_logprob(std::span<const WordId> sentence) const;

  /// Writes linear probabilities for the entire vocabulary into out
  /// (size >= vocab size).
  void score_all(const LMState& state, std::span<double> out) const;

  /// Every stored history (lengths 1..order-1).  The empty history is
  /// implicit.  Intended for diagnostics and tests.
  std::vector<LMState> stored_contexts() const;

  std::size_t num_grams(int k) const;  // stored k-grams, k in 1..order

  void write_arpa(const std::string& path) const;
  static NGramLM read_arpa(const std::string& path);

 private:
  NGramLM() = default;

  struct Context {
    double logbow = 0.0;
    std::vector<std::pair<WordId, double>> conts;  // sorted by word id
    const double* find(WordId w) const;
  };

  // History key, length 1..order-1.
  struct HistKey {
    std::array<WordId, LMState::kMaxHistory> w{};
    std::int8_t len = 0;
    bool operator==(const HistKey& o) const {
      if (len != o.len) return false;
      for (int i = 0; i < len; ++i)
        if (w[i] != o.w[i]) return false;
      return true;
    }
  };
  struct HistKeyHash {
    std::size_t operator()(const HistKey& k) const;
  };

  const Context* find_context(const WordId* hist, int len) const;
  static HistKey make_key(const WordId* hist, int len);

  int order_ = 1;
  WordId eos_ = kInvalidWord;
  Vocabulary vocab_{std::vector<std::string>{"<s>", "</s>", "<unk>"}, 0, 1, 2};
  std::vector<double> unigram_logp_;
  std::vector<double> unigram_p_;  // linear, for score_all
  std::unordered_map<HistKey, std::uint32_t, HistKeyHash> ctx_ids_;
  std::vector<Context> contexts_;
  std::vector<std::size_t> gram_counts_;  // per order, for ARPA header

  friend class NGramLMBuilder;
};

}  // namespace declex

#endif  // DECLEX_NGRAM_LM_HPP_
