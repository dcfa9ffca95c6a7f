// declex/word_classes.cc

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

#include "declex/word_classes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace declex {

namespace {

// x log x with the 0 log 0 := 0 convention.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }
inline double xlogx(std::int64_t x) { return xlogx(static_cast<double>(x)); }

struct BigramCounts {
  // Padded with bos/eos so every token is the left and right end of
  // exactly one bigram.
  std::unordered_map<std::uint64_t, std::int64_t> pairs;  // (left<<32)|right
  std::vector<std::int64_t> word_count;

  static std::uint64_t key(WordId a, WordId b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  }
};

BigramCounts count_bigrams(const Corpus& text, const Vocabulary& vocab) {
  BigramCounts counts;
  counts.word_count.assign(vocab.size(), 0);
  for (const auto& sent : text.sentences) {
    WordId prev = vocab.bos();
    ++counts.word_count[vocab.bos()];
    for (WordId w : sent) {
      if (w < 0 || static_cast<std::size_t>(w) >= vocab.size())
        throw std::runtime_error("word_classes: corpus id out of range");
      ++counts.word_count[w];
      ++counts.pairs[BigramCounts::key(prev, w)];
      prev = w;
    }
    ++counts.word_count[vocab.eos()];
    ++counts.pairs[BigramCounts::key(prev, vocab.eos())];
  }
  return counts;
}

void fill_class_tables(const BigramCounts& counts, const ClassMap& map,
                       std::vector<std::int64_t>* class_pairs,
                       std::vector<std::int64_t>* class_count) {
  const int k = map.num_classes;
  class_pairs->assign(static_cast<std::size_t>(k) * k, 0);
  class_count->assign(k, 0);
  for (std::size_t w = 0; w < counts.word_count.size(); ++w)
    (*class_count)[map.class_of(static_cast<WordId>(w))] +=
        counts.word_count[w];
  for (const auto& [key, c] : counts.pairs) {
    ClassId l = map.class_of(static_cast<WordId>(key >> 32));
    ClassId r = map.class_of(static_cast<WordId>(key & 0xffffffffu));
    (*class_pairs)[static_cast<std::size_t>(l) * k + r] += c;
  }
}

}  // namespace

ClassId ClassMap::class_of(WordId w) const {
  if (w < 0 || static_cast<std::size_t>(w) >= assignment.size() ||
      assignment[w] < 0)
    throw std::runtime_error("class map: unmapped word id " + std::to_string(w));
  return assignment[w];
}

double class_bigram_loglik(const Corpus& text, const ClassMap& map) {
  // Reference (from-scratch) evaluation of the exchange objective.
  std::unordered_map<std::uint64_t, std::int64_t> class_pairs;
  std::vector<std::int64_t> class_count(map.num_classes, 0);
  auto key = [&](ClassId a, ClassId b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  };
  for (const auto& sent : text.sentences) {
    ClassId prev = map.bos_class;
    ++class_count[map.bos_class];
    for (WordId w : sent) {
      ClassId c = map.class_of(w);
      ++class_count[c];
      ++class_pairs[key(prev, c)];
      prev = c;
    }
    ++class_count[map.eos_class];
    ++class_pairs[key(prev, map.eos_class)];
  }
  double f = 0.0;
  for (const auto& [k, c] : class_pairs) f += xlogx(c);
  for (ClassId c = 0; c < map.num_classes; ++c) f -= 2.0 * xlogx(class_count[c]);
  return f;
}

Corpus map_corpus(const Corpus& text, const ClassMap& map) {
  Corpus out;
  out.side = map.side;
  out.sentences.reserve(text.sentences.size());
  for (const auto& sent : text.sentences) {
    std::vector<WordId> mapped;
    mapped.reserve(sent.size());
    for (WordId w : sent) mapped.push_back(map.class_of(w));
    out.sentences.push_back(std::move(mapped));
  }
  return out;
}

Vocabulary class_vocabulary(const ClassMap& map) {
  std::vector<std::string> words(map.num_classes);
  for (int c = 0; c < map.num_regular; ++c) words[c] = "C" + std::to_string(c);
  words[map.bos_class] = Vocabulary::kBosSurface;
  words[map.eos_class] = Vocabulary::kEosSurface;
  words[map.unk_class] = Vocabulary::kUnkSurface;
  return Vocabulary(std::move(words), map.bos_class, map.eos_class,
                    map.unk_class);
}

ClassMap cluster_exchange(const Corpus& text, const Vocabulary& vocab,
                          int num_classes, int max_sweeps, std::uint64_t seed) {
  (void)seed;
  if (num_classes < 2)
    throw std::runtime_error("cluster_exchange: need at least 2 classes");

  std::vector<WordId> clusterable;
  for (std::size_t w = 0; w < vocab.size(); ++w)
    if (!vocab.is_special(static_cast<WordId>(w)))
      clusterable.push_back(static_cast<WordId>(w));
  if (static_cast<std::size_t>(num_classes) > clusterable.size())
    throw std::runtime_error(
        "cluster_exchange: more classes than clusterable word types");

  const int k_total = num_classes + 3;
  ClassMap map;
  map.num_classes = k_total;
  map.num_regular = num_classes;
  map.bos_class = num_classes;
  map.eos_class = num_classes + 1;
  map.unk_class = num_classes + 2;
  map.side = text.side;
  map.assignment.assign(vocab.size(), -1);
  map.assignment[vocab.bos()] = map.bos_class;
  map.assignment[vocab.eos()] = map.eos_class;
  map.assignment[vocab.unk()] = map.unk_class;

  BigramCounts counts = count_bigrams(text, vocab);

  // Frequency order decides both the initial assignment and sweep order.
  std::sort(clusterable.begin(), clusterable.end(), [&](WordId a, WordId b) {
    if (counts.word_count[a] != counts.word_count[b])
      return counts.word_count[a] > counts.word_count[b];
    return a < b;
  });
  for (std::size_t rank = 0; rank < clusterable.size(); ++rank)
    map.assignment[clusterable[rank]] =
        static_cast<ClassId>(rank % static_cast<std::size_t>(num_classes));

  // Adjacency lists for incremental objective deltas.
  std::vector<std::vector<std::pair<WordId, std::int64_t>>> succ(vocab.size());
  std::vector<std::vector<std::pair<WordId, std::int64_t>>> pred(vocab.size());
  std::vector<std::int64_t> self_count(vocab.size(), 0);
  for (const auto& [key, c] : counts.pairs) {
    WordId l = static_cast<WordId>(key >> 32);
    WordId r = static_cast<WordId>(key & 0xffffffffu);
    if (l == r) {
      self_count[l] = c;
      continue;
    }
    succ[l].emplace_back(r, c);
    pred[r].emplace_back(l, c);
  }

  std::vector<std::int64_t> class_pairs;
  std::vector<std::int64_t> class_count;
  fill_class_tables(counts, map, &class_pairs, &class_count);

  auto cell = [&](ClassId a, ClassId b) -> std::int64_t& {
    return class_pairs[static_cast<std::size_t>(a) * k_total + b];
  };

  std::vector<std::int64_t> rr(k_total, 0), ll(k_total, 0);
  std::vector<ClassId> touched;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    std::size_t moves = 0;
    for (WordId w : clusterable) {
      const ClassId a = map.assignment[w];
      const std::int64_t nw = counts.word_count[w];
      if (nw == 0) continue;  // no evidence, leave in the init class

      touched.clear();
      for (const auto& [v, c] : succ[w]) {
        ClassId cls = map.assignment[v];
        if (rr[cls] == 0 && ll[cls] == 0) touched.push_back(cls);
        rr[cls] += c;
      }
      for (const auto& [v, c] : pred[w]) {
        ClassId cls = map.assignment[v];
        if (rr[cls] == 0 && ll[cls] == 0) touched.push_back(cls);
        ll[cls] += c;
      }
      const std::int64_t s = self_count[w];

      // Removing w from class a is common to every candidate move.
      double best_delta = 0.0;
      ClassId best_class = a;
      for (ClassId b = 0; b < num_classes; ++b) {
        if (b == a) continue;
        double delta = 0.0;
        for (ClassId c : touched) {
          if (c == a || c == b) continue;
          delta += xlogx(cell(a, c) - rr[c]) - xlogx(cell(a, c));
          delta += xlogx(cell(b, c) + rr[c]) - xlogx(cell(b, c));
          delta += xlogx(cell(c, a) - ll[c]) - xlogx(cell(c, a));
          delta += xlogx(cell(c, b) + ll[c]) - xlogx(cell(c, b));
        }
        delta += xlogx(cell(a, a) - rr[a] - ll[a] - s) - xlogx(cell(a, a));
        delta += xlogx(cell(a, b) - rr[b] + ll[a]) - xlogx(cell(a, b));
        delta += xlogx(cell(b, a) + rr[a] - ll[b]) - xlogx(cell(b, a));
        delta += xlogx(cell(b, b) + rr[b] + ll[b] + s) - xlogx(cell(b, b));
        delta -= 2.0 * (xlogx(class_count[a] - nw) - xlogx(class_count[a]));
        delta -= 2.0 * (xlogx(class_count[b] + nw) - xlogx(class_count[b]));
        if (delta > best_delta + 1e-9) {
          best_delta = delta;
          best_class = b;
        }
      }

      if (best_class != a) {
        const ClassId b = best_class;
        for (ClassId c : touched) {
          if (c == a || c == b) continue;
          cell(a, c) -= rr[c];
          cell(b, c) += rr[c];
          cell(c, a) -= ll[c];
          cell(c, b) += ll[c];
        }
        cell(a, a) -= rr[a] + ll[a] + s;
        cell(a, b) += ll[a] - rr[b];
        cell(b, a) += rr[a] - ll[b];
        cell(b, b) += rr[b] + ll[b] + s;
        class_count[a] -= nw;
        class_count[b] += nw;
        map.assignment[w] = b;
        ++moves;
      }

      for (ClassId c : touched) {
        rr[c] = 0;
        ll[c] = 0;
      }
    }
    if (moves == 0) break;
  }
  return map;
}

void write_class_map_tsv(const std::string& path, const ClassMap& map,
                         const Vocabulary& vocab) {
  if (map.assignment.size() != vocab.size())
    throw std::runtime_error("class map / vocabulary size mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  for (std::size_t w = 0; w < vocab.size(); ++w)
    out << vocab.word(static_cast<WordId>(w)) << '\t' << map.assignment[w]
        << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::pair<ClassMap, Vocabulary> read_class_map_tsv(const std::string& path,
                                                   Side side) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::vector<std::string> words;
  std::vector<ClassId> classes;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": malformed class map row");
    words.push_back(line.substr(0, tab));
    classes.push_back(std::stoi(line.substr(tab + 1)));
  }
  WordId bos = kInvalidWord, eos = kInvalidWord, unk = kInvalidWord;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (words[i] == Vocabulary::kBosSurface) bos = static_cast<WordId>(i);
    if (words[i] == Vocabulary::kEosSurface) eos = static_cast<WordId>(i);
    if (words[i] == Vocabulary::kUnkSurface) unk = static_cast<WordId>(i);
  }
  if (bos == kInvalidWord || eos == kInvalidWord || unk == kInvalidWord)
    throw std::runtime_error(path + ": class map lacks special tokens");

  ClassMap map;
  map.assignment = classes;
  map.side = side;
  map.num_classes = 0;
  for (ClassId c : classes) {
    if (c < 0)
      throw std::runtime_error(path + ": negative class id");
    map.num_classes = std::max(map.num_classes, c + 1);
  }
  map.bos_class = classes[bos];
  map.eos_class = classes[eos];
  map.unk_class = classes[unk];
  // Special classes must be singletons.
  for (std::size_t i = 0; i < classes.size(); ++i) {
    bool special = static_cast<WordId>(i) == bos ||
                   static_cast<WordId>(i) == eos || static_cast<WordId>(i) == unk;
    if (!special && (classes[i] == map.bos_class || classes[i] == map.eos_class ||
                     classes[i] == map.unk_class))
      throw std::runtime_error(path + ": special class is not a singleton");
  }
  map.num_regular = map.num_classes - 3;
  Vocabulary vocab(std::move(words), bos, eos, unk);
  return {std::move(map), std::move(vocab)};
}

}  // namespace declex
