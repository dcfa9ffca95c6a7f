// tests/test_word_classes.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <map>

#include "declex/word_classes.hpp"
#include "testutil.hpp"

using namespace declex;
using testutil::text_from_string;

namespace {

struct Toy {
  Vocabulary vocab;
  Corpus corpus;
};

// Alternating "a x b y" pattern: a,b share contexts and x,y share contexts,
// so the optimal 2-class split is {a,b} | {x,y}.
Toy alternating_toy() {
  TokenizedText text;
  for (int i = 0; i < 12; ++i)
    text.push_back({"a", "x", "b", "y", "a", "x", "b", "y"});
  auto vocab = Vocabulary::build(text, 1);
  auto corpus = encode_corpus(text, vocab, Side::kSource);
  return {vocab, corpus};
}

// Every assignment of the 4 types to 2 classes, evaluated with the public
// objective; the exchange result must reach the maximum.
double brute_force_best(const Toy& toy, ClassMap base,
                        std::vector<ClassId>* best_assignment) {
  std::vector<WordId> words;
  for (std::size_t w = 0; w < toy.vocab.size(); ++w)
    if (!toy.vocab.is_special(static_cast<WordId>(w)))
      words.push_back(static_cast<WordId>(w));
  double best = -1e300;
  for (int mask = 0; mask < (1 << words.size()); ++mask) {
    ClassMap candidate = base;
    for (std::size_t i = 0; i < words.size(); ++i)
      candidate.assignment[words[i]] = (mask >> i) & 1;
    double f = class_bigram_loglik(toy.corpus, candidate);
    if (f > best) {
      best = f;
      if (best_assignment != nullptr) *best_assignment = candidate.assignment;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("single-class objective matches the closed form") {
  auto toy = alternating_toy();
  // With K=1 every word is in class 0; transitions: bos->c0 once per
  // sentence, c0->c0 (len-1) times, c0->eos once.
  ClassMap map;
  map.num_classes = 4;
  map.num_regular = 1;
  map.bos_class = 1;
  map.eos_class = 2;
  map.unk_class = 3;
  map.assignment.assign(toy.vocab.size(), 0);
  map.assignment[toy.vocab.bos()] = 1;
  map.assignment[toy.vocab.eos()] = 2;
  map.assignment[toy.vocab.unk()] = 3;

  const double s = static_cast<double>(toy.corpus.num_sentences());
  const double t = static_cast<double>(toy.corpus.num_tokens());
  auto g = [](double x) { return x > 0 ? x * std::log(x) : 0.0; };
  double expected = g(t - s)          // c0 -> c0
                    + g(s) + g(s)     // bos -> c0, c0 -> eos
                    - 2.0 * (g(t) + g(s) + g(s));
  CHECK(class_bigram_loglik(toy.corpus, map) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("objective is invariant under class relabeling") {
  auto toy = alternating_toy();
  ClassMap map = cluster_exchange(toy.corpus, toy.vocab, 2, 5);
  double f1 = class_bigram_loglik(toy.corpus, map);
  ClassMap swapped = map;
  for (auto& c : swapped.assignment)
    if (c == 0)
      c = 1;
    else if (c == 1)
      c = 0;
  CHECK(class_bigram_loglik(toy.corpus, swapped) ==
        doctest::Approx(f1).epsilon(1e-12));
}

TEST_CASE("exchange recovers the brute-force optimal 2-class partition") {
  auto toy = alternating_toy();
  ClassMap map = cluster_exchange(toy.corpus, toy.vocab, 2, 10);
  double reached = class_bigram_loglik(toy.corpus, map);
  double best = brute_force_best(toy, map, nullptr);
  CHECK(reached == doctest::Approx(best).epsilon(1e-9));
  // a,b together; x,y together; the two groups apart
  WordId a = toy.vocab.encode("a"), b = toy.vocab.encode("b");
  WordId x = toy.vocab.encode("x"), y = toy.vocab.encode("y");
  CHECK(map.assignment[a] == map.assignment[b]);
  CHECK(map.assignment[x] == map.assignment[y]);
  CHECK(map.assignment[a] != map.assignment[x]);
}

TEST_CASE("objective never decreases across sweeps") {
  std::mt19937_64 rng(3);
  auto text = testutil::random_text(12, 40, 2, 9, &rng);
  auto vocab = Vocabulary::build(text, 1);
  auto corpus = encode_corpus(text, vocab, Side::kSource);

  double prev = -1e300;
  for (int sweeps = 0; sweeps <= 6; ++sweeps) {
    ClassMap map = cluster_exchange(corpus, vocab, 4, sweeps);
    double f = class_bigram_loglik(corpus, map);
    CHECK(f >= prev - 1e-9);
    prev = f;
  }
}

TEST_CASE("K equal to the number of types leaves nothing to improve") {
  auto toy = alternating_toy();
  // 4 clusterable types, K=4: init is a bijection, no merge can help.
  ClassMap singletons = cluster_exchange(toy.corpus, toy.vocab, 4, 0);
  ClassMap swept = cluster_exchange(toy.corpus, toy.vocab, 4, 8);
  CHECK(class_bigram_loglik(toy.corpus, swept) >=
        class_bigram_loglik(toy.corpus, singletons) - 1e-9);
  // word-level objective equals the class objective under singletons
  CHECK(class_bigram_loglik(toy.corpus, singletons) ==
        doctest::Approx(class_bigram_loglik(toy.corpus, swept)).epsilon(1e-9));
}

TEST_CASE("cluster_exchange validates its inputs") {
  auto toy = alternating_toy();
  CHECK_THROWS_WITH(cluster_exchange(toy.corpus, toy.vocab, 5, 3),
                    doctest::Contains("more classes"));
  CHECK_THROWS_WITH(cluster_exchange(toy.corpus, toy.vocab, 1, 3),
                    doctest::Contains("at least 2"));
}

TEST_CASE("clustering is deterministic") {
  std::mt19937_64 rng(8);
  auto text = testutil::random_text(15, 50, 1, 8, &rng);
  auto vocab = Vocabulary::build(text, 1);
  auto corpus = encode_corpus(text, vocab, Side::kSource);
  ClassMap m1 = cluster_exchange(corpus, vocab, 5, 10, /*seed=*/1);
  ClassMap m2 = cluster_exchange(corpus, vocab, 5, 10, /*seed=*/2);
  CHECK(m1.assignment == m2.assignment);  // default initializer draws nothing
}

TEST_CASE("map_corpus applies the assignment tokenwise") {
  auto text = text_from_string("a x b");
  auto vocab = Vocabulary::build(text, 1);
  auto corpus = encode_corpus(text, vocab, Side::kSource);
  ClassMap map;
  map.num_classes = 5;
  map.num_regular = 2;
  map.bos_class = 2;
  map.eos_class = 3;
  map.unk_class = 4;
  map.assignment.assign(vocab.size(), -1);
  map.assignment[vocab.bos()] = 2;
  map.assignment[vocab.eos()] = 3;
  map.assignment[vocab.unk()] = 4;
  map.assignment[vocab.encode("a")] = 0;
  map.assignment[vocab.encode("b")] = 0;
  map.assignment[vocab.encode("x")] = 1;
  Corpus mapped = map_corpus(corpus, map);
  CHECK(mapped.sentences[0] == std::vector<WordId>{0, 1, 0});

  // unmapped id -> error
  Corpus bad;
  bad.sentences = {{static_cast<WordId>(vocab.size())}};
  CHECK_THROWS_WITH(map_corpus(bad, map), doctest::Contains("unmapped"));
}

TEST_CASE("identity-like map preserves corpus structure") {
  auto toy = alternating_toy();
  ClassMap map = cluster_exchange(toy.corpus, toy.vocab, 4, 0);
  Corpus mapped = map_corpus(toy.corpus, map);
  REQUIRE(mapped.sentences.size() == toy.corpus.sentences.size());
  for (std::size_t s = 0; s < mapped.sentences.size(); ++s)
    CHECK(mapped.sentences[s].size() == toy.corpus.sentences[s].size());
  // bijective word->class: equality pattern preserved
  const auto& orig = toy.corpus.sentences[0];
  const auto& m = mapped.sentences[0];
  for (std::size_t i = 0; i < orig.size(); ++i)
    for (std::size_t j = 0; j < orig.size(); ++j)
      CHECK((orig[i] == orig[j]) == (m[i] == m[j]));
}

TEST_CASE("mapped corpus bigram counts aggregate word bigram counts") {
  std::mt19937_64 rng(4);
  auto text = testutil::random_text(9, 30, 2, 7, &rng);
  auto vocab = Vocabulary::build(text, 1);
  auto corpus = encode_corpus(text, vocab, Side::kSource);
  ClassMap map = cluster_exchange(corpus, vocab, 3, 4);
  Corpus mapped = map_corpus(corpus, map);

  std::map<std::pair<WordId, WordId>, long> word_pairs;
  for (const auto& sent : corpus.sentences)
    for (std::size_t i = 0; i + 1 < sent.size(); ++i)
      ++word_pairs[{sent[i], sent[i + 1]}];
  std::map<std::pair<ClassId, ClassId>, long> expected;
  for (const auto& [pair, c] : word_pairs)
    expected[{map.class_of(pair.first), map.class_of(pair.second)}] += c;

  std::map<std::pair<ClassId, ClassId>, long> got;
  for (const auto& sent : mapped.sentences)
    for (std::size_t i = 0; i + 1 < sent.size(); ++i)
      ++got[{sent[i], sent[i + 1]}];
  CHECK(got == expected);
}

TEST_CASE("class map TSV round-trip") {
  auto toy = alternating_toy();
  ClassMap map = cluster_exchange(toy.corpus, toy.vocab, 2, 10);
  std::string path = "classes_rt.tsv";
  write_class_map_tsv(path, map, toy.vocab);
  auto [map2, vocab2] = read_class_map_tsv(path, Side::kSource);
  CHECK(map2.assignment == map.assignment);
  CHECK(map2.num_classes == map.num_classes);
  CHECK(map2.bos_class == map.bos_class);
  REQUIRE(vocab2.size() == toy.vocab.size());
  for (std::size_t w = 0; w < vocab2.size(); ++w)
    CHECK(vocab2.word(static_cast<WordId>(w)) ==
          toy.vocab.word(static_cast<WordId>(w)));
  std::remove(path.c_str());
}

TEST_CASE("class vocabulary mirrors the special classes") {
  auto toy = alternating_toy();
  ClassMap map = cluster_exchange(toy.corpus, toy.vocab, 2, 5);
  Vocabulary cv = class_vocabulary(map);
  CHECK(cv.size() == static_cast<std::size_t>(map.num_classes));
  CHECK(cv.bos() == map.bos_class);
  CHECK(cv.eos() == map.eos_class);
  CHECK(cv.unk() == map.unk_class);
  CHECK(cv.word(0) == "C0");
}
