// declex/lexicon.hpp

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

#ifndef DECLEX_LEXICON_HPP_
#define DECLEX_LEXICON_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "declex/corpus.hpp"
#include "declex/types.hpp"
#include "declex/word_classes.hpp"

namespace declex {

enum class BackoffKind { kUniform, kUnigram, kKneserNeyLower };

const char* backoff_kind_name(BackoffKind kind);
BackoffKind parse_backoff_kind(const std::string& name);

/// Target-independent source distribution, strictly positive over the
/// source vocabulary and summing to one; interpolated into the sparse
/// lexicon at query time so pruned-away entries keep a revival channel.
class BackoffModel {
 public:
  static BackoffModel uniform(int src_vocab_size);
  /// Discounted source unigram (positive everywhere).
  static BackoffModel unigram(const Corpus& source_text, int src_vocab_size);
  /// Continuation unigram: distinct-left-context counts, discounted.
  static BackoffModel kneser_ney_lower(const Corpus& source_text,
                                       int src_vocab_size);
  /// Builds the requested kind; source_text may be empty only for uniform.
  static BackoffModel make(BackoffKind kind, const Corpus& source_text,
                           int src_vocab_size);

  BackoffKind kind() const { return kind_; }
  int vocab_size() const { return vocab_size_; }
  double prob(WordId f) const {
    return dist_.empty() ? 1.0 / vocab_size_ : dist_[f];
  }
  /// Empty for the uniform kind.
  const std::vector<double>& distribution() const { return dist_; }

 private:
  BackoffModel(BackoffKind kind, int vocab_size, std::vector<double> dist)
      : kind_(kind), vocab_size_(vocab_size), dist_(std::move(dist)) {}

  BackoffKind kind_;
  int vocab_size_;
  std::vector<double> dist_;
};

/// One sparse conditional distribution over source words for target `target`.
/// Entries are id-sorted; when `normalized`, weights sum to one and are all
/// positive.
struct LexiconRow {
  WordId target = kInvalidWord;
  std::vector<std::pair<WordId, double>> entries;
  bool normalized = false;
};

/// Normalizes the input weights, drops entries below tau, and renormalizes
/// the survivors.  When nothing survives, keeps the single argmax entry with
/// probability 1 (ties to the lowest source id).  Throws on all-zero input.
LexiconRow threshold_renormalize(const LexiconRow& row, double tau);

/// Sparse translation table: per-target rows of source probabilities with
/// threshold tau, and query-time interpolation with a backoff model
/// (weight lambda on the trained rows).  Rows may be implicit-uniform to
/// avoid materializing the full table.  Immutable; replaced wholesale by
/// each re-estimation.
class SparseLexicon {
 public:
  /// Every row is the uniform distribution over the source vocabulary,
  /// kept implicit (no materialized entries).  tau >= 1/|V_src| would
  /// empty all rows and is rejected.
  static SparseLexicon init_uniform(int src_vocab_size, int tgt_vocab_size,
                                    double tau, double lambda,
                                    BackoffModel backoff);

  /// Takes ownership of rows already thresholded and normalized.
  SparseLexicon(std::vector<LexiconRow> rows, int src_vocab_size,
                int tgt_vocab_size, double tau, double lambda,
                BackoffModel backoff);

  int src_vocab_size() const { return src_v_; }
  int tgt_vocab_size() const { return tgt_v_; }
  double tau() const { return tau_; }
  double lambda() const { return lambda_; }
  const BackoffModel& backoff() const { return backoff_; }
  bool implicit_uniform() const { return implicit_uniform_; }

  bool has_row(WordId e) const {
    return implicit_uniform_ || !rows_[e].empty();
  }
  /// Materialized entries of a row; empty for implicit-uniform rows.
  std::span<const std::pair<WordId, double>> row(WordId e) const {
    return rows_[e];
  }

  /// p_sp(f|e): 0 for entries outside the stored support.
  double sparse_prob(WordId f, WordId e) const;
  /// lambda * p_sp(f|e) + (1-lambda) * p_bo(f).
  double smoothed_prob(WordId f, WordId e) const {
    return lambda_ * sparse_prob(f, e) + (1.0 - lambda_) * backoff_.prob(f);
  }

  std::size_t materialized_entries() const { return entries_; }
  /// Materialized fraction of the full |V_src| x |V_tgt| table;
  /// implicit-uniform rows count as fully active.
  double active_fraction() const;

  /// TSV "target-word<TAB>source-word<TAB>probability", grouped by target,
  /// 17 significant digits.
  void write_tsv(const std::string& path, const Vocabulary& src_vocab,
                 const Vocabulary& tgt_vocab) const;
  /// Reads raw rows (not thresholded); unknown surfaces map to unk with
  /// weights accumulating.
  static std::vector<LexiconRow> read_tsv_rows(const std::string& path,
                                               const Vocabulary& src_vocab,
                                               const Vocabulary& tgt_vocab);

 private:
  std::vector<std::vector<std::pair<WordId, double>>> rows_;
  bool implicit_uniform_ = false;
  int src_v_;
  int tgt_v_;
  double tau_;
  double lambda_;
  BackoffModel backoff_;
  std::size_t entries_ = 0;
};

/// Expands a class-to-class lexicon to word level: every member f of a
/// source class receives the class-pair probability q(f|e) =
/// p(C_src(f)|C_tgt(e)), then each row is thresholded and renormalized.
/// Rows of target words sharing a class are identical, and a dropped
/// source class drops all its member words together.
SparseLexicon class_to_word_lexicon(const SparseLexicon& class_lex,
                                    const ClassMap& c_src, const ClassMap& c_tgt,
                                    double tau, double lambda,
                                    BackoffModel backoff);

}  // namespace declex

#endif  // DECLEX_LEXICON_HPP_
