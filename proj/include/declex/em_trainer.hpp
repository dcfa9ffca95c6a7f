// declex/em_trainer.hpp

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

#ifndef DECLEX_EM_TRAINER_HPP_
#define DECLEX_EM_TRAINER_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "declex/corpus.hpp"
#include "declex/lexicon.hpp"
#include "declex/ngram_lm.hpp"
#include "declex/trellis.hpp"
#include "declex/types.hpp"

namespace declex {

/// Training settings; the defaults mirror the large-vocabulary recipe
/// (100 iterations, tau 1e-6, lambda 0.15, histogram 50, lexical beam 5,
/// LM beam 50).
struct TrainConfig {
  int iterations = 100;
  double tau = 1e-6;
  double lambda = 0.15;
  BackoffKind backoff = BackoffKind::kUniform;
  int histogram_beam = 50;  // kUnlimited disables pruning
  int lex_beam = 5;         // kUnlimited disables preselection (with lm_beam)
  int lm_beam = 50;
  std::optional<double> convergence_rel_tol;
  int workers = 0;  // 0 = hardware concurrency; 1 = reproducibility baseline
  int checkpoint_every = 0;  // consumed by the CLI callback
  int eval_every = 0;  // decode + score vs reference every k iterations
  std::uint64_t seed = 0;

  SearchBeams beams() const { return {histogram_beam, lex_beam, lm_beam}; }
};

/// Parses flat "key=value" lines; unknown keys are an error.  Values
/// "inf"/"-1" mean unlimited for the beam fields.
TrainConfig parse_train_config(const std::string& path, TrainConfig base = {});
void apply_config_entry(TrainConfig* config, const std::string& key,
                        const std::string& value);

struct IterationStats {
  int iteration = 0;  // 1-based
  double loglik = 0.0;  // data log-likelihood under the pre-update lexicon
  double active_fraction = 0.0;  // of the post-update lexicon
  double accuracy = -1.0;        // vs reference when evaluated, else -1
  double seconds = 0.0;
};

struct TrainStats {
  std::vector<IterationStats> iterations;
};

/// TSV "iter<TAB>loglik<TAB>active_fraction<TAB>accuracy<TAB>seconds";
/// accuracy prints "-" when not evaluated.
void write_stats_tsv(const std::string& path, const TrainStats& stats);

/// Sparse expected counts keyed by (target, source), plus the summed
/// sentence log-likelihoods.  merge() is associative and commutative up to
/// floating-point rounding; the trainer merges per-sentence contributions
/// in sentence order so runs are reproducible for any worker count.
class PosteriorAccumulator {
 public:
  static std::uint64_t key(WordId e, WordId f) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(e)) << 32) |
           static_cast<std::uint32_t>(f);
  }
  static WordId key_target(std::uint64_t k) {
    return static_cast<WordId>(k >> 32);
  }
  static WordId key_source(std::uint64_t k) {
    return static_cast<WordId>(k & 0xffffffffu);
  }

  void add(WordId e, WordId f, double count) { counts_[key(e, f)] += count; }
  void add_loglik(double ll) { loglik_ += ll; }
  void merge(const PosteriorAccumulator& other);

  bool empty() const { return counts_.empty(); }
  double loglik() const { return loglik_; }
  const std::unordered_map<std::uint64_t, double>& counts() const {
    return counts_;
  }

 private:
  std::unordered_map<std::uint64_t, double> counts_;
  double loglik_ = 0.0;
};

/// Re-estimation: per-target relative frequencies of the expected counts,
/// thresholded at tau and renormalized.  Targets with no accumulated mass
/// get no row; queries on them fall through to the backoff term.
SparseLexicon m_step(const PosteriorAccumulator& acc, double tau, double lambda,
                     BackoffModel backoff, int src_vocab_size,
                     int tgt_vocab_size);

using IterationCallback =
    std::function<void(const IterationStats&, const SparseLexicon&)>;

/// EM training: pruned forward-backward E-step over the task input with
/// deterministic (sentence-ordered) accumulator merging, M-step
/// re-estimation, per-iteration stats.  Stops early when the relative
/// log-likelihood change drops below convergence_rel_tol, if set.
std::pair<SparseLexicon, TrainStats> train(const MonotoneTask& task,
                                           const NGramLM& lm,
                                           const TrainConfig& config,
                                           const SparseLexicon& init_lex,
                                           IterationCallback callback = nullptr);

}  // namespace declex

#endif  // DECLEX_EM_TRAINER_HPP_
