// declex/trellis.cc

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

#include "declex/trellis.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "declex/kernels.hpp"

namespace declex {

namespace {

// Dense per-state probability vectors are only worth caching while the
// vocabulary is small; past this size lexical candidates fall back to
// on-demand LM lookups.
constexpr std::size_t kDenseVocabLimit = 4096;

}  // namespace

// --- LMStateCache ------------------------------------------------------------

LMStateCache::LMStateCache(const NGramLM& lm, int lm_beam, bool dense)
    : lm_(lm), lm_beam_(lm_beam), dense_(dense) {
  const WordId bos = lm_.vocab().bos();
  const WordId eos = lm_.vocab().eos();
  for (std::size_t w = 0; w < lm_.vocab().size(); ++w)
    if (static_cast<WordId>(w) != bos && static_cast<WordId>(w) != eos)
      candidate_words_.push_back(static_cast<WordId>(w));
}

const LMStateCache::Entry& LMStateCache::get(const LMState& state) const {
  {
    std::shared_lock lock(mutex_);
    auto it = cache_.find(state);
    if (it != cache_.end()) return *it->second;
  }
  auto entry = std::make_unique<Entry>();
  std::vector<double> probs(lm_.vocab().size());
  lm_.score_all(state, probs);
  if (lm_beam_ > 0) {
    std::vector<WordId> order = candidate_words_;
    auto better = [&probs](WordId a, WordId b) {
      if (probs[a] != probs[b]) return probs[a] > probs[b];
      return a < b;
    };
    std::size_t k = std::min<std::size_t>(lm_beam_, order.size());
    std::nth_element(order.begin(), order.begin() + k, order.end(), better);
    order.resize(k);
    std::sort(order.begin(), order.end(), better);
    entry->top_lm.reserve(k);
    for (WordId w : order)
      entry->top_lm.push_back(TopArc{w, probs[w], lm_.next_state(state, w)});
  }
  if (dense_) entry->dense_probs = std::move(probs);

  std::unique_lock lock(mutex_);
  auto [it, inserted] = cache_.emplace(state, std::move(entry));
  return *it->second;
}

// --- TrellisEngine -----------------------------------------------------------

TrellisEngine::TrellisEngine(const SparseLexicon& lexicon, const NGramLM& lm,
                             SearchBeams beams,
                             std::shared_ptr<LMStateCache> cache)
    : lexicon_(lexicon), lm_(lm), beams_(beams), cache_(std::move(cache)) {
  if (static_cast<std::size_t>(lexicon_.tgt_vocab_size()) != lm_.vocab().size())
    throw std::runtime_error(
        "trellis: lexicon target vocabulary does not match the LM vocabulary");
  if (is_limited(beams_.histogram) && beams_.histogram < 1)
    throw std::runtime_error("trellis: histogram beam must be >= 1");
  if (is_limited(beams_.lex) && beams_.lex < 0)
    throw std::runtime_error("trellis: negative lexical beam");
  if (is_limited(beams_.lm) && beams_.lm < 0)
    throw std::runtime_error("trellis: negative LM beam");

  const WordId bos = lm_.vocab().bos();
  const WordId eos = lm_.vocab().eos();
  for (WordId e = 0; e < lexicon_.tgt_vocab_size(); ++e)
    if (e != bos && e != eos) all_words_.push_back(e);

  preselect_ = is_limited(beams_.lex) && is_limited(beams_.lm);
  if (preselect_ && beams_.lex == 0 && beams_.lm == 0)
    throw std::runtime_error("trellis: both preselection beams are zero");

  if (cache_ == nullptr) {
    bool dense = !preselect_ || lm_.vocab().size() <= kDenseVocabLimit;
    cache_ = std::make_shared<LMStateCache>(
        lm_, preselect_ ? beams_.lm : 0, dense);
  }

  if (preselect_ && beams_.lex > 0) {
    const std::size_t k =
        std::min<std::size_t>(beams_.lex, all_words_.size());
    if (lexicon_.implicit_uniform()) {
      // Uniform rows rank every target word equally; lowest ids win.
      lex_best_uniform_.assign(all_words_.begin(), all_words_.begin() + k);
    } else {
      // Top-k per source word by sparse probability (the backoff term is
      // constant per f, so smoothed and sparse rankings agree); ties and
      // zero-probability fill go to the lowest target id.
      struct Scored {
        double p;
        WordId e;
      };
      std::vector<std::vector<Scored>> top(lexicon_.src_vocab_size());
      for (WordId e : all_words_) {
        for (const auto& [f, p] : lexicon_.row(e)) {
          auto& list = top[f];
          if (list.size() >= k && p <= list.back().p) continue;
          auto pos = list.begin();
          while (pos != list.end() && pos->p >= p) ++pos;
          list.insert(pos, Scored{p, e});
          if (list.size() > k) list.pop_back();
        }
      }
      lex_best_.resize(lexicon_.src_vocab_size());
      for (WordId f = 0; f < lexicon_.src_vocab_size(); ++f) {
        auto& out = lex_best_[f];
        out.reserve(k);
        for (const auto& s : top[f]) out.push_back(s.e);
        for (WordId e : all_words_) {
          if (out.size() >= k) break;
          if (std::find(out.begin(), out.end(), e) == out.end())
            out.push_back(e);
        }
      }
    }
  }
}

std::span<const WordId> TrellisEngine::lex_candidates(WordId f) const {
  if (!preselect_ || beams_.lex == 0) return {};
  if (lexicon_.implicit_uniform()) return lex_best_uniform_;
  return lex_best_[f];
}

std::vector<WordId> TrellisEngine::preselect(WordId f, const LMState& state) const {
  std::vector<WordId> out;
  if (!preselect_) {
    out = all_words_;
    return out;
  }
  auto lex = lex_candidates(f);
  out.assign(lex.begin(), lex.end());
  if (beams_.lm > 0)
    for (const auto& arc : cache_->get(state).top_lm) out.push_back(arc.word);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// --- the lattice -------------------------------------------------------------

struct TrellisEngine::Workspace {
  struct Position {
    std::vector<WordId> word;
    std::vector<LMState> state;
    std::vector<double> fwd;
    std::vector<double> bwd;
    std::vector<std::int32_t> backptr;
    std::vector<WordId> backptr_word;

    std::size_t size() const { return word.size(); }
  };
  struct Arc {
    std::int32_t from;
    std::int32_t to;
    double prob;  // LM transition times emission
  };
  struct NodeKey {
    WordId word;
    LMState state;
    bool operator==(const NodeKey& o) const {
      return word == o.word && state == o.state;
    }
  };
  struct NodeKeyHash {
    std::size_t operator()(const NodeKey& k) const {
      return k.state.hash() * 1000003u ^ static_cast<std::size_t>(k.word);
    }
  };

  std::vector<Position> pos;
  std::vector<std::vector<Arc>> arcs;  // arcs[n] end at position n
  std::vector<double> log_scale;
  std::vector<double> eos_prob;
  double loglik = 0.0;
  double logscore = 0.0;
  std::int32_t best_final = -1;

  // per-position scratch
  std::unordered_map<NodeKey, std::int32_t, NodeKeyHash> node_map;
  std::vector<std::int32_t> emit_gen;
  std::vector<double> emit_prob;
  std::vector<std::int32_t> cand_gen;
  std::int32_t generation = 0;
};

void TrellisEngine::run(std::span<const WordId> sentence, bool max_mode,
                        Workspace* ws) const {
  const std::size_t n_pos = sentence.size();
  if (n_pos == 0) throw std::runtime_error("trellis: empty sentence");
  const std::size_t v_tgt = lm_.vocab().size();
  const WordId eos = lm_.vocab().eos();

  for (WordId f : sentence)
    if (f < 0 || f >= lexicon_.src_vocab_size())
      throw std::runtime_error("trellis: source id out of range");

  ws->pos.assign(n_pos, {});
  ws->arcs.assign(n_pos, {});
  ws->log_scale.assign(n_pos, 0.0);
  ws->emit_gen.assign(v_tgt, 0);
  ws->emit_prob.assign(v_tgt, 0.0);
  ws->cand_gen.assign(v_tgt, 0);
  ws->generation = 0;

  const LMState start_state = lm_.begin_state();

  for (std::size_t n = 0; n < n_pos; ++n) {
    const WordId f = sentence[n];
    auto& cur = ws->pos[n];
    auto& arcs = ws->arcs[n];
    ws->node_map.clear();

    const std::int32_t emit_gen = ++ws->generation;
    auto emission = [&](WordId e) {
      if (ws->emit_gen[e] != emit_gen) {
        ws->emit_gen[e] = emit_gen;
        ws->emit_prob[e] = lexicon_.smoothed_prob(f, e);
      }
      return ws->emit_prob[e];
    };

    auto add_arc = [&](std::int32_t from, double from_score, WordId pred_word,
                       WordId e, double p_lm, const LMState& next) {
      const double p_e = emission(e);
      const double arc_prob = p_lm * p_e;
      const double score = from_score * arc_prob;
      if (!(score > 0.0)) return;  // zero-probability expansions are dead
      Workspace::NodeKey key{e, next};
      auto [it, inserted] = ws->node_map.emplace(
          key, static_cast<std::int32_t>(cur.size()));
      if (inserted) {
        cur.word.push_back(e);
        cur.state.push_back(next);
        cur.fwd.push_back(score);
        if (max_mode) {
          cur.backptr.push_back(from);
          cur.backptr_word.push_back(pred_word);
        }
      } else {
        const std::int32_t idx = it->second;
        if (max_mode) {
          if (score > cur.fwd[idx] ||
              (score == cur.fwd[idx] && pred_word < cur.backptr_word[idx])) {
            cur.fwd[idx] = score;
            cur.backptr[idx] = from;
            cur.backptr_word[idx] = pred_word;
          }
        } else {
          cur.fwd[idx] += score;
        }
      }
      if (!max_mode)
        arcs.push_back(Workspace::Arc{from, it->second, arc_prob});
    };

    auto expand = [&](std::int32_t from, double from_score, WordId pred_word,
                      const LMState& state) {
      const LMStateCache::Entry& cs = cache_->get(state);
      if (preselect_) {
        const std::int32_t gen = ++ws->generation;
        for (const auto& ta : cs.top_lm) {
          ws->cand_gen[ta.word] = gen;
          add_arc(from, from_score, pred_word, ta.word, ta.prob, ta.next);
        }
        for (WordId e : lex_candidates(f)) {
          if (ws->cand_gen[e] == gen) continue;
          const double p_lm = cs.dense_probs.empty()
                                  ? std::exp(lm_.logprob(state, e))
                                  : cs.dense_probs[e];
          add_arc(from, from_score, pred_word, e, p_lm, lm_.next_state(state, e));
        }
      } else {
        for (WordId e : all_words_) {
          const double p_lm = cs.dense_probs.empty()
                                  ? std::exp(lm_.logprob(state, e))
                                  : cs.dense_probs[e];
          add_arc(from, from_score, pred_word, e, p_lm, lm_.next_state(state, e));
        }
      }
    };

    if (n == 0) {
      expand(-1, 1.0, -1, start_state);
    } else {
      const auto& prev = ws->pos[n - 1];
      for (std::size_t u = 0; u < prev.size(); ++u)
        expand(static_cast<std::int32_t>(u), prev.fwd[u], prev.word[u],
               prev.state[u]);
    }

    if (cur.size() == 0)
      throw std::runtime_error(
          "trellis: sentence has zero probability under the model (position " +
          std::to_string(n) + ")");

    // Histogram pruning: keep the top B nodes by forward score,
    // deterministically (ties to the earliest created node).
    if (is_limited(beams_.histogram) &&
        cur.size() > static_cast<std::size_t>(beams_.histogram)) {
      const std::size_t b = beams_.histogram;
      std::vector<std::int32_t> order(cur.size());
      for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = static_cast<std::int32_t>(i);
      auto better = [&](std::int32_t x, std::int32_t y) {
        if (cur.fwd[x] != cur.fwd[y]) return cur.fwd[x] > cur.fwd[y];
        return x < y;
      };
      std::nth_element(order.begin(), order.begin() + b, order.end(), better);
      order.resize(b);
      std::sort(order.begin(), order.end());

      std::vector<std::int32_t> remap(cur.size(), -1);
      Workspace::Position kept;
      kept.word.reserve(b);
      kept.state.reserve(b);
      kept.fwd.reserve(b);
      for (std::int32_t idx : order) {
        remap[idx] = static_cast<std::int32_t>(kept.size());
        kept.word.push_back(cur.word[idx]);
        kept.state.push_back(cur.state[idx]);
        kept.fwd.push_back(cur.fwd[idx]);
        if (max_mode) {
          kept.backptr.push_back(cur.backptr[idx]);
          kept.backptr_word.push_back(cur.backptr_word[idx]);
        }
      }
      cur = std::move(kept);
      if (!max_mode) {
        std::size_t w = 0;
        for (const auto& arc : arcs) {
          if (remap[arc.to] == -1) continue;
          arcs[w] = Workspace::Arc{arc.from, remap[arc.to], arc.prob};
          ++w;
        }
        arcs.resize(w);
      }
    }

    // Rescale so forward values stay in range; the factors accumulate into
    // the sentence log-score.
    double norm = max_mode ? kernels::max_value(cur.fwd.data(), cur.size())
                           : kernels::sum(cur.fwd.data(), cur.size());
    if (!(norm > 0.0))
      throw std::runtime_error("trellis: vanished forward mass at position " +
                               std::to_string(n));
    ws->log_scale[n] = std::log(norm);
    kernels::scale(cur.fwd.data(), cur.size(), 1.0 / norm);
  }

  // Sentence-end factor.
  auto& last = ws->pos[n_pos - 1];
  ws->eos_prob.assign(last.size(), 0.0);
  for (std::size_t i = 0; i < last.size(); ++i) {
    const LMStateCache::Entry& cs = cache_->get(last.state[i]);
    ws->eos_prob[i] = cs.dense_probs.empty()
                          ? std::exp(lm_.logprob(last.state[i], eos))
                          : cs.dense_probs[eos];
  }

  double scale_total = 0.0;
  for (double s : ws->log_scale) scale_total += s;

  if (max_mode) {
    std::int32_t best = -1;
    double best_score = 0.0;
    for (std::size_t i = 0; i < last.size(); ++i) {
      const double score = last.fwd[i] * ws->eos_prob[i];
      if (best < 0 || score > best_score ||
          (score == best_score && last.word[i] < last.word[best])) {
        best = static_cast<std::int32_t>(i);
        best_score = score;
      }
    }
    if (best < 0 || !(best_score > 0.0))
      throw std::runtime_error("trellis: no final hypothesis");
    ws->best_final = best;
    ws->logscore = scale_total + std::log(best_score);
  } else {
    const double total_end =
        kernels::dot(last.fwd.data(), ws->eos_prob.data(), last.size());
    if (!(total_end > 0.0))
      throw std::runtime_error("trellis: vanished sentence-end mass");
    ws->loglik = scale_total + std::log(total_end);

    // Backward over exactly the retained nodes.
    last.bwd = ws->eos_prob;
    kernels::scale(last.bwd.data(), last.bwd.size(),
                   1.0 / kernels::sum(last.bwd.data(), last.bwd.size()));
    for (std::size_t n = n_pos - 1; n >= 1; --n) {
      auto& prev = ws->pos[n - 1];
      const auto& cur = ws->pos[n];
      prev.bwd.assign(prev.size(), 0.0);
      for (const auto& arc : ws->arcs[n])
        prev.bwd[arc.from] += arc.prob * cur.bwd[arc.to];
      const double total = kernels::sum(prev.bwd.data(), prev.size());
      if (total > 0.0) kernels::scale(prev.bwd.data(), prev.size(), 1.0 / total);
    }
  }
}

ForwardBackwardResult TrellisEngine::forward_backward(
    std::span<const WordId> sentence) const {
  Workspace ws;
  run(sentence, /*max_mode=*/false, &ws);

  ForwardBackwardResult result;
  result.loglik = ws.loglik;
  result.posteriors.resize(sentence.size());
  std::vector<double> node_gamma;
  for (std::size_t n = 0; n < sentence.size(); ++n) {
    const auto& pos = ws.pos[n];
    node_gamma = pos.fwd;
    kernels::mul_inplace(node_gamma.data(), pos.bwd.data(), node_gamma.size());
    const double total = kernels::sum(node_gamma.data(), node_gamma.size());
    if (!(total > 0.0))
      throw std::runtime_error("trellis: empty posterior at position " +
                               std::to_string(n));
    kernels::scale(node_gamma.data(), node_gamma.size(), 1.0 / total);

    std::vector<std::pair<WordId, double>> gamma;
    gamma.reserve(pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i)
      if (node_gamma[i] > 0.0) gamma.emplace_back(pos.word[i], node_gamma[i]);
    std::sort(gamma.begin(), gamma.end());
    // Merge nodes that share a target word (distinct LM states).
    std::vector<std::pair<WordId, double>>& out = result.posteriors[n];
    for (const auto& [w, g] : gamma) {
      if (!out.empty() && out.back().first == w)
        out.back().second += g;
      else
        out.emplace_back(w, g);
    }
  }
  return result;
}

ViterbiResult TrellisEngine::viterbi(std::span<const WordId> sentence) const {
  Workspace ws;
  run(sentence, /*max_mode=*/true, &ws);

  ViterbiResult result;
  result.logscore = ws.logscore;
  result.words.assign(sentence.size(), kInvalidWord);
  std::int32_t idx = ws.best_final;
  for (std::size_t n = sentence.size(); n-- > 0;) {
    result.words[n] = ws.pos[n].word[idx];
    idx = ws.pos[n].backptr[idx];
  }
  return result;
}

}  // namespace declex
