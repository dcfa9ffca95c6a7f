// declex/em_trainer.cc

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

#include "declex/em_trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "declex/decoder.hpp"
#include "declex/evaluation.hpp"
#include "declex/parallel.hpp"

namespace declex {

namespace {

int parse_beam_value(const std::string& value) {
  if (value == "inf" || value == "unlimited" || value == "-1") return kUnlimited;
  return std::stoi(value);
}

}  // namespace

void apply_config_entry(TrainConfig* config, const std::string& key,
                        const std::string& value) {
  if (key == "iterations")
    config->iterations = std::stoi(value);
  else if (key == "tau")
    config->tau = std::stod(value);
  else if (key == "lambda")
    config->lambda = std::stod(value);
  else if (key == "backoff")
    config->backoff = parse_backoff_kind(value);
  else if (key == "histogram_beam")
    config->histogram_beam = parse_beam_value(value);
  else if (key == "lex_beam")
    config->lex_beam = parse_beam_value(value);
  else if (key == "lm_beam")
    config->lm_beam = parse_beam_value(value);
  else if (key == "convergence_rel_tol")
    config->convergence_rel_tol = std::stod(value);
  else if (key == "workers")
    config->workers = std::stoi(value);
  else if (key == "checkpoint_every")
    config->checkpoint_every = std::stoi(value);
  else if (key == "eval_every")
    config->eval_every = std::stoi(value);
  else if (key == "seed")
    config->seed = std::stoull(value);
  else
    throw std::runtime_error("unknown config key: " + key);
}

TrainConfig parse_train_config(const std::string& path, TrainConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected key=value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    apply_config_entry(&base, key, value);
  }
  return base;
}

void write_stats_tsv(const std::string& path, const TrainStats& stats) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  char buf[128];
  for (const auto& it : stats.iterations) {
    std::snprintf(buf, sizeof(buf), "%d\t%.17g\t%.17g\t", it.iteration,
                  it.loglik, it.active_fraction);
    out << buf;
    if (it.accuracy >= 0.0) {
      std::snprintf(buf, sizeof(buf), "%.6f", it.accuracy);
      out << buf;
    } else {
      out << '-';
    }
    std::snprintf(buf, sizeof(buf), "\t%.3f\n", it.seconds);
    out << buf;
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void PosteriorAccumulator::merge(const PosteriorAccumulator& other) {
  for (const auto& [k, c] : other.counts_) counts_[k] += c;
  loglik_ += other.loglik_;
}

SparseLexicon m_step(const PosteriorAccumulator& acc, double tau, double lambda,
                     BackoffModel backoff, int src_vocab_size,
                     int tgt_vocab_size) {
  if (acc.empty()) throw std::runtime_error("m_step: empty accumulator");
  std::vector<std::uint64_t> keys;
  keys.reserve(acc.counts().size());
  for (const auto& [k, c] : acc.counts())
    if (c > 0.0) keys.push_back(k);
  std::sort(keys.begin(), keys.end());

  std::vector<LexiconRow> rows;
  std::size_t i = 0;
  while (i < keys.size()) {
    const WordId e = PosteriorAccumulator::key_target(keys[i]);
    LexiconRow raw;
    raw.target = e;
    while (i < keys.size() && PosteriorAccumulator::key_target(keys[i]) == e) {
      raw.entries.emplace_back(PosteriorAccumulator::key_source(keys[i]),
                               acc.counts().at(keys[i]));
      ++i;
    }
    rows.push_back(threshold_renormalize(raw, tau));
  }
  return SparseLexicon(std::move(rows), src_vocab_size, tgt_vocab_size, tau,
                       lambda, std::move(backoff));
}

namespace {

struct SentenceResult {
  std::vector<std::pair<std::uint64_t, double>> counts;  // key-sorted
  double loglik = 0.0;
};

void estep_sentence(const TrellisEngine& engine,
                    const std::vector<WordId>& sentence, SentenceResult* out) {
  ForwardBackwardResult fb = engine.forward_backward(sentence);
  out->loglik = fb.loglik;
  out->counts.clear();
  for (std::size_t n = 0; n < sentence.size(); ++n) {
    const WordId f = sentence[n];
    for (const auto& [e, gamma] : fb.posteriors[n])
      out->counts.emplace_back(PosteriorAccumulator::key(e, f), gamma);
  }
  // The same (e, f) pair recurs when a source word repeats; combine here so
  // the global merge handles fewer items.
  std::sort(out->counts.begin(), out->counts.end());
  std::size_t w = 0;
  for (std::size_t i = 0; i < out->counts.size(); ++i) {
    if (w > 0 && out->counts[w - 1].first == out->counts[i].first)
      out->counts[w - 1].second += out->counts[i].second;
    else
      out->counts[w++] = out->counts[i];
  }
  out->counts.resize(w);
}

}  // namespace

std::pair<SparseLexicon, TrainStats> train(const MonotoneTask& task,
                                           const NGramLM& lm,
                                           const TrainConfig& config,
                                           const SparseLexicon& init_lex,
                                           IterationCallback callback) {
  if (config.iterations < 0)
    throw std::runtime_error("train: iterations must be >= 0");
  if (lm.vocab().size() != task.tgt_vocab.size() ||
      static_cast<std::size_t>(init_lex.tgt_vocab_size()) != task.tgt_vocab.size() ||
      static_cast<std::size_t>(init_lex.src_vocab_size()) != task.src_vocab.size())
    throw std::runtime_error(
        "train: LM / lexicon / task vocabulary sizes do not match");
  if (task.source_input.sentences.empty())
    throw std::runtime_error("train: empty input corpus");
  for (std::size_t s = 0; s < task.source_input.sentences.size(); ++s)
    if (task.source_input.sentences[s].empty())
      throw std::runtime_error("train: input sentence " + std::to_string(s) +
                               " is empty");

  TrainStats stats;
  SparseLexicon lexicon = init_lex;
  if (config.iterations == 0) return {std::move(lexicon), std::move(stats)};

  const SearchBeams beams = config.beams();
  const bool preselect = is_limited(beams.lex) && is_limited(beams.lm);
  const bool dense = !preselect || lm.vocab().size() <= 4096;
  auto cache = std::make_shared<LMStateCache>(lm, preselect ? beams.lm : 0, dense);

  // The backoff distribution depends only on the input text; built once.
  BackoffModel backoff =
      BackoffModel::make(config.backoff, task.source_input,
                         static_cast<int>(task.src_vocab.size()));

  const auto& sentences = task.source_input.sentences;
  const std::size_t n_sents = sentences.size();
  constexpr std::size_t kBlock = 1024;  // bounds per-block result memory
  std::vector<SentenceResult> block(std::min(kBlock, n_sents));

  double prev_loglik = 0.0;
  for (int iter = 1; iter <= config.iterations; ++iter) {
    const auto t0 = std::chrono::steady_clock::now();
    TrellisEngine engine(lexicon, lm, beams, cache);

    PosteriorAccumulator acc;
    for (std::size_t base = 0; base < n_sents; base += kBlock) {
      const std::size_t n_block = std::min(kBlock, n_sents - base);
      parallel_for(n_block, config.workers, [&](std::size_t i) {
        estep_sentence(engine, sentences[base + i], &block[i]);
      });
      // Merge in sentence order regardless of completion order.
      for (std::size_t i = 0; i < n_block; ++i) {
        for (const auto& [k, c] : block[i].counts)
          acc.add(PosteriorAccumulator::key_target(k),
                  PosteriorAccumulator::key_source(k), c);
        acc.add_loglik(block[i].loglik);
      }
    }

    SparseLexicon updated =
        m_step(acc, config.tau, config.lambda, backoff,
               static_cast<int>(task.src_vocab.size()),
               static_cast<int>(task.tgt_vocab.size()));

    IterationStats row;
    row.iteration = iter;
    row.loglik = acc.loglik();
    row.active_fraction = updated.active_fraction();
    if (config.eval_every > 0 && !task.reference.sentences.empty() &&
        (iter % config.eval_every == 0 || iter == config.iterations)) {
      Corpus hyp = decode_corpus(task.source_input, updated, lm, beams,
                                 config.workers, cache);
      row.accuracy = token_accuracy(hyp, task.reference).accuracy;
    }
    row.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    stats.iterations.push_back(row);
    lexicon = std::move(updated);
    if (callback) callback(row, lexicon);

    if (config.convergence_rel_tol && iter >= 2) {
      const double rel = std::abs(row.loglik - prev_loglik) /
                         std::max(1.0, std::abs(prev_loglik));
      if (rel < *config.convergence_rel_tol) break;
    }
    prev_loglik = row.loglik;
  }
  return {std::move(lexicon), std::move(stats)};
}

}  // namespace declex
