// declex/corpus.cc

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

#include "declex/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace declex {

std::size_t Corpus::num_tokens() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

TokenizedText read_tokenized(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  TokenizedText text;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::vector<std::string> sent;
    std::string tok;
    while (ss >> tok) sent.push_back(tok);
    text.push_back(std::move(sent));
  }
  return text;
}

void write_tokenized(const std::string& path, const TokenizedText& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  for (const auto& sent : text) {
    for (std::size_t i = 0; i < sent.size(); ++i) {
      if (i > 0) out << ' ';
      out << sent[i];
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

Corpus encode_corpus(const TokenizedText& text, const Vocabulary& vocab,
                     Side side) {
  Corpus corpus;
  corpus.side = side;
  corpus.sentences.reserve(text.size());
  for (const auto& sent : text) {
    std::vector<WordId> ids;
    ids.reserve(sent.size());
    for (const auto& tok : sent) ids.push_back(vocab.encode(tok));
    corpus.sentences.push_back(std::move(ids));
  }
  return corpus;
}

TokenizedText decode_corpus(const Corpus& corpus, const Vocabulary& vocab) {
  TokenizedText text;
  text.reserve(corpus.sentences.size());
  for (const auto& sent : corpus.sentences) {
    std::vector<std::string> words;
    words.reserve(sent.size());
    for (WordId id : sent) words.push_back(vocab.word(id));
    text.push_back(std::move(words));
  }
  return text;
}

std::vector<SentenceAlignment> read_alignments(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::vector<SentenceAlignment> alignments;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    SentenceAlignment links;
    std::istringstream ss(line);
    std::string pair;
    while (ss >> pair) {
      auto dash = pair.find('-');
      if (dash == std::string::npos || dash == 0 || dash + 1 == pair.size())
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": malformed link '" + pair + "'");
      AlignmentLink link;
      link.src = std::stoi(pair.substr(0, dash));
      link.tgt = std::stoi(pair.substr(dash + 1));
      links.push_back(link);
    }
    alignments.push_back(std::move(links));
  }
  return alignments;
}

namespace {

// Keeps only 1:1 links and orders the kept source words by target position.
// Returns false when nothing survives.
bool monotonize_sentence(const std::vector<std::string>& src,
                         const std::vector<std::string>& tgt,
                         const SentenceAlignment& links, std::size_t sent_no,
                         std::vector<std::string>* src_out,
                         std::vector<std::string>* tgt_out) {
  std::vector<int> src_degree(src.size(), 0);
  std::vector<int> tgt_degree(tgt.size(), 0);
  for (const auto& link : links) {
    if (link.src < 0 || link.tgt < 0 ||
        static_cast<std::size_t>(link.src) >= src.size() ||
        static_cast<std::size_t>(link.tgt) >= tgt.size())
      throw std::runtime_error("alignment index out of range in sentence " +
                               std::to_string(sent_no));
    ++src_degree[link.src];
    ++tgt_degree[link.tgt];
  }
  SentenceAlignment kept;
  for (const auto& link : links)
    if (src_degree[link.src] == 1 && tgt_degree[link.tgt] == 1)
      kept.push_back(link);
  std::sort(kept.begin(), kept.end(),
            [](const AlignmentLink& a, const AlignmentLink& b) {
              return a.tgt < b.tgt;
            });
  if (kept.empty()) return false;
  src_out->clear();
  tgt_out->clear();
  for (const auto& link : kept) {
    src_out->push_back(src[link.src]);
    tgt_out->push_back(tgt[link.tgt]);
  }
  return true;
}

}  // namespace

MonotoneTask build_monotone_task(const TokenizedText& source,
                                 const TokenizedText& target,
                                 const std::vector<SentenceAlignment>& alignments,
                                 double split_fraction, std::int64_t min_count) {
  if (source.size() != target.size() || source.size() != alignments.size())
    throw std::runtime_error("build_monotone_task: sentence count mismatch");
  if (!(split_fraction > 0.0 && split_fraction < 1.0))
    throw std::runtime_error("build_monotone_task: split fraction must be in (0,1)");

  TokenizedText mono_src, mono_tgt;
  std::vector<std::string> src_sent, tgt_sent;
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (monotonize_sentence(source[i], target[i], alignments[i], i, &src_sent,
                            &tgt_sent)) {
      mono_src.push_back(src_sent);
      mono_tgt.push_back(tgt_sent);
    }
  }
  if (mono_src.empty())
    throw std::runtime_error("build_monotone_task: no sentence survived");

  // Split by sentence count.
  auto n_first = static_cast<std::size_t>(
      split_fraction * static_cast<double>(mono_src.size()));
  n_first = std::clamp<std::size_t>(n_first, 1, mono_src.size() - 1);

  TokenizedText input_text(mono_src.begin(), mono_src.begin() + n_first);
  TokenizedText ref_text(mono_tgt.begin(), mono_tgt.begin() + n_first);
  TokenizedText lm_text(mono_tgt.begin() + n_first, mono_tgt.end());

  Vocabulary src_vocab = Vocabulary::build(input_text, min_count);
  TokenizedText all_tgt = ref_text;
  all_tgt.insert(all_tgt.end(), lm_text.begin(), lm_text.end());
  Vocabulary tgt_vocab = Vocabulary::build(all_tgt, min_count);

  MonotoneTask task{encode_corpus(input_text, src_vocab, Side::kSource),
                    encode_corpus(ref_text, tgt_vocab, Side::kTarget),
                    encode_corpus(lm_text, tgt_vocab, Side::kTarget),
                    std::move(src_vocab), std::move(tgt_vocab)};
  return task;
}

namespace {

void check_bijective_key(const std::vector<WordId>& key,
                         const Vocabulary& vocab) {
  if (key.size() != vocab.size())
    throw std::runtime_error("cipher key size does not match vocabulary");
  std::vector<bool> hit(key.size(), false);
  for (WordId to : key) {
    if (to < 0 || static_cast<std::size_t>(to) >= key.size() || hit[to])
      throw std::runtime_error("cipher key is not a bijection");
    hit[to] = true;
  }
  if (key[vocab.bos()] != vocab.bos() || key[vocab.eos()] != vocab.eos() ||
      key[vocab.unk()] != vocab.unk())
    throw std::runtime_error("cipher key must fix the special ids");
}

Vocabulary cipher_source_vocabulary(const Vocabulary& tgt_vocab) {
  std::vector<std::string> words(tgt_vocab.size());
  for (std::size_t i = 0; i < tgt_vocab.size(); ++i)
    words[i] = "c" + std::to_string(i);
  words[tgt_vocab.bos()] = Vocabulary::kBosSurface;
  words[tgt_vocab.eos()] = Vocabulary::kEosSurface;
  words[tgt_vocab.unk()] = Vocabulary::kUnkSurface;
  return Vocabulary(std::move(words), tgt_vocab.bos(), tgt_vocab.eos(),
                    tgt_vocab.unk());
}

MonotoneTask cipher_task(const Corpus& target_text, const Vocabulary& tgt_vocab,
                         double split_fraction,
                         const std::function<WordId(WordId)>& encipher) {
  if (!(split_fraction > 0.0 && split_fraction < 1.0))
    throw std::runtime_error("cipher: split fraction must be in (0,1)");
  if (target_text.sentences.size() < 2)
    throw std::runtime_error("cipher: need at least two sentences");
  auto n_first = static_cast<std::size_t>(
      split_fraction * static_cast<double>(target_text.sentences.size()));
  n_first = std::clamp<std::size_t>(n_first, 1, target_text.sentences.size() - 1);

  MonotoneTask task{Corpus{{}, Side::kSource},
                    Corpus{{}, Side::kTarget},
                    Corpus{{}, Side::kTarget},
                    cipher_source_vocabulary(tgt_vocab),
                    tgt_vocab};
  for (std::size_t i = 0; i < n_first; ++i) {
    const auto& sent = target_text.sentences[i];
    std::vector<WordId> ciphered(sent.size());
    for (std::size_t j = 0; j < sent.size(); ++j) ciphered[j] = encipher(sent[j]);
    task.source_input.sentences.push_back(std::move(ciphered));
    task.reference.sentences.push_back(sent);
  }
  for (std::size_t i = n_first; i < target_text.sentences.size(); ++i)
    task.lm_text.sentences.push_back(target_text.sentences[i]);
  return task;
}

}  // namespace

MonotoneTask generate_synthetic_cipher(const Corpus& target_text,
                                       const Vocabulary& tgt_vocab,
                                       const std::vector<WordId>& key,
                                       double split_fraction) {
  check_bijective_key(key, tgt_vocab);
  return cipher_task(target_text, tgt_vocab, split_fraction,
                     [&key](WordId e) { return key[e]; });
}

MonotoneTask generate_ambiguous_cipher(const Corpus& target_text,
                                       const Vocabulary& tgt_vocab,
                                       const std::vector<WordId>& key,
                                       const std::vector<WordId>& key_alt,
                                       double ambiguity, std::uint64_t seed,
                                       double split_fraction) {
  check_bijective_key(key, tgt_vocab);
  check_bijective_key(key_alt, tgt_vocab);
  if (!(ambiguity >= 0.0 && ambiguity <= 1.0))
    throw std::runtime_error("cipher: ambiguity must be in [0,1]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  return cipher_task(target_text, tgt_vocab, split_fraction,
                     [&](WordId e) {
                       return coin(rng) < ambiguity ? key_alt[e] : key[e];
                     });
}

std::vector<WordId> random_substitution_key(const Vocabulary& vocab,
                                            std::uint64_t seed) {
  std::vector<WordId> regular;
  for (std::size_t i = 0; i < vocab.size(); ++i)
    if (!vocab.is_special(static_cast<WordId>(i)))
      regular.push_back(static_cast<WordId>(i));
  std::vector<WordId> shuffled = regular;
  std::mt19937_64 rng(seed);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  std::vector<WordId> key(vocab.size());
  std::iota(key.begin(), key.end(), 0);
  for (std::size_t i = 0; i < regular.size(); ++i) key[regular[i]] = shuffled[i];
  return key;
}

Vocabulary synthetic_vocabulary(int num_words) {
  if (num_words < 1) throw std::runtime_error("synthetic vocabulary: need >= 1 word");
  std::vector<std::string> words = {Vocabulary::kBosSurface,
                                    Vocabulary::kEosSurface,
                                    Vocabulary::kUnkSurface};
  for (int i = 0; i < num_words; ++i) words.push_back("w" + std::to_string(i));
  return Vocabulary(std::move(words), 0, 1, 2);
}

Corpus sample_synthetic_text(const Vocabulary& vocab, std::size_t num_sentences,
                             int min_len, int max_len, std::uint64_t seed) {
  if (min_len < 1 || max_len < min_len)
    throw std::runtime_error("sample_synthetic_text: bad length range");
  std::vector<WordId> words;
  for (std::size_t i = 0; i < vocab.size(); ++i)
    if (!vocab.is_special(static_cast<WordId>(i)))
      words.push_back(static_cast<WordId>(i));
  if (words.empty()) throw std::runtime_error("sample_synthetic_text: no words");
  const std::size_t v = words.size();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> any_word(0, v - 1);

  // Skewed successor table: a handful of likely continuations per word,
  // with a small uniform leak so every bigram stays possible.
  const int kSuccessors = 3;
  const double kLeak = 0.04;
  std::vector<std::array<std::size_t, kSuccessors>> succ(v);
  for (std::size_t i = 0; i < v; ++i)
    for (int k = 0; k < kSuccessors; ++k) succ[i][k] = any_word(rng);
  const double weights[kSuccessors] = {0.66, 0.22, 0.08};  // + kLeak uniform

  std::uniform_int_distribution<int> length(min_len, max_len);
  std::uniform_int_distribution<std::size_t> start(0, v / 4);  // few start words

  Corpus corpus;
  corpus.side = Side::kTarget;
  corpus.sentences.reserve(num_sentences);
  for (std::size_t s = 0; s < num_sentences; ++s) {
    int len = length(rng);
    std::vector<WordId> sent;
    sent.reserve(len);
    std::size_t cur = start(rng);
    sent.push_back(words[cur]);
    for (int i = 1; i < len; ++i) {
      double u = coin(rng);
      if (u < kLeak) {
        cur = any_word(rng);
      } else {
        u = (u - kLeak) / (1.0 - kLeak);
        double acc = 0.0;
        std::size_t chosen = succ[cur][kSuccessors - 1];
        for (int k = 0; k < kSuccessors; ++k) {
          acc += weights[k] / (1.0 - kLeak);
          if (u < acc) {
            chosen = succ[cur][k];
            break;
          }
        }
        cur = chosen;
      }
      sent.push_back(words[cur]);
    }
    corpus.sentences.push_back(std::move(sent));
  }
  return corpus;
}

}  // namespace declex
