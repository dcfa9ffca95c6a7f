// tests/test_vocab_corpus.cc

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

#include <cstdio>
#include <optional>
#include <fstream>
#include <random>
#include <set>

#include "declex/corpus.hpp"
#include "declex/vocabulary.hpp"
#include "testutil.hpp"

using namespace declex;
using testutil::text_from_string;

TEST_CASE("vocabulary keeps frequency order with first-occurrence ties") {
  auto v = Vocabulary::build(text_from_string("a b a"), 1);
  CHECK(v.size() == 5);  // 3 specials + a + b
  CHECK(v.encode("a") < v.encode("b"));
  CHECK(v.word(v.encode("a")) == "a");

  // counts a:5, b:5, c:1 with min_count 2: c excluded, a before b.
  auto v2 = Vocabulary::build(
      text_from_string("a b a b c\na b a b\na b a b"), 2);
  CHECK(v2.find("c") == kInvalidWord);
  CHECK(v2.encode("c") == v2.unk());
  CHECK(v2.encode("a") < v2.encode("b"));
}

TEST_CASE("below-threshold tokens map to unk") {
  auto v = Vocabulary::build(text_from_string("a b a"), 2);
  CHECK(v.find("b") == kInvalidWord);
  CHECK(v.encode("b") == v.unk());
  CHECK(v.encode("a") != v.unk());
}

TEST_CASE("empty corpus is an error") {
  CHECK_THROWS_WITH(Vocabulary::build({}, 1),
                    doctest::Contains("empty corpus"));
  CHECK_THROWS(Vocabulary::build(text_from_string("\n\n"), 1));
}

TEST_CASE("vocabulary round-trip: decode(encode(w)) == w for known words") {
  auto text = text_from_string("the cat sat on the mat\nthe dog sat");
  auto v = Vocabulary::build(text, 1);
  for (const auto& sent : text)
    for (const auto& w : sent) CHECK(v.word(v.encode(w)) == w);
}

TEST_CASE("literal sentence markers in text fold into unk") {
  auto v = Vocabulary::build(text_from_string("a <s> b </s> a"), 1);
  CHECK(v.encode("<s>") == v.unk());
  CHECK(v.encode("</s>") == v.unk());
}

TEST_CASE("vocabulary TSV round-trip") {
  auto v = Vocabulary::build(text_from_string("b a a c c c"), 1);
  std::string path = "vocab_rt.tsv";
  v.write_tsv(path);
  auto v2 = Vocabulary::read_tsv(path);
  REQUIRE(v2.size() == v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    CHECK(v2.word(static_cast<WordId>(i)) == v.word(static_cast<WordId>(i)));
    CHECK(v2.count(static_cast<WordId>(i)) == v.count(static_cast<WordId>(i)));
  }
  std::remove(path.c_str());
}

TEST_CASE("monotone task keeps 1:1 links ordered by target position") {
  // src=[x,y,z], tgt=[A,B,C], links {(0,1),(1,0),(2,2)}:
  // kept source words ordered by target position -> [y,x,z].
  auto src = text_from_string("x y z\nq r");
  auto tgt = text_from_string("A B C\nQ R");
  std::vector<SentenceAlignment> links = {
      {{0, 1}, {1, 0}, {2, 2}},
      {{0, 0}, {1, 1}},
  };
  auto task = build_monotone_task(src, tgt, links, 0.5, 1);
  REQUIRE(task.source_input.sentences.size() == 1);
  REQUIRE(task.lm_text.sentences.size() == 1);
  const auto& s = task.source_input.sentences[0];
  REQUIRE(s.size() == 3);
  CHECK(task.src_vocab.word(s[0]) == "y");
  CHECK(task.src_vocab.word(s[1]) == "x");
  CHECK(task.src_vocab.word(s[2]) == "z");
  const auto& r = task.reference.sentences[0];
  CHECK(task.tgt_vocab.word(r[0]) == "A");
  CHECK(task.tgt_vocab.word(r[1]) == "B");
  CHECK(task.tgt_vocab.word(r[2]) == "C");
}

TEST_CASE("monotone task with identity alignment keeps content") {
  auto src = text_from_string("x y\nu v\np q\nr s");
  auto tgt = text_from_string("X Y\nU V\nP Q\nR S");
  std::vector<SentenceAlignment> links(4, {{0, 0}, {1, 1}});
  auto task = build_monotone_task(src, tgt, links, 0.5, 1);
  REQUIRE(task.source_input.sentences.size() == 2);
  REQUIRE(task.reference.sentences.size() == 2);
  REQUIRE(task.lm_text.sentences.size() == 2);
  CHECK(task.src_vocab.word(task.source_input.sentences[0][0]) == "x");
  CHECK(task.tgt_vocab.word(task.reference.sentences[1][1]) == "V");
  // per-sentence lengths identical (1:1 monotone invariant)
  for (std::size_t i = 0; i < task.source_input.sentences.size(); ++i)
    CHECK(task.source_input.sentences[i].size() ==
          task.reference.sentences[i].size());
}

TEST_CASE("multi-aligned words drop and empty sentences vanish") {
  // src=[x,y], tgt=[A,B], links {(0,0),(0,1)}: x is multi-aligned, y and
  // both targets end up unaligned; the sentence reduces to empty and is
  // dropped.
  auto src = text_from_string("x y\na b\nc d");
  auto tgt = text_from_string("A B\nE F\nG H");
  std::vector<SentenceAlignment> links = {
      {{0, 0}, {0, 1}},
      {{0, 0}, {1, 1}},
      {{0, 0}, {1, 1}},
  };
  auto task = build_monotone_task(src, tgt, links, 0.5, 1);
  // only the two fully-aligned sentences survive
  CHECK(task.source_input.sentences.size() + task.lm_text.sentences.size() == 2);
}

TEST_CASE("alignment index out of range names the sentence") {
  auto src = text_from_string("x y\nu v");
  auto tgt = text_from_string("X Y\nU V");
  std::vector<SentenceAlignment> links = {{{0, 0}, {1, 1}}, {{5, 0}}};
  CHECK_THROWS_WITH(build_monotone_task(src, tgt, links, 0.5, 1),
                    doctest::Contains("sentence 1"));
}

TEST_CASE("monotone task invariants hold on random alignments") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> len(1, 8);
  std::uniform_int_distribution<int> n_links(0, 10);
  TokenizedText src, tgt;
  std::vector<SentenceAlignment> links;
  for (int s = 0; s < 60; ++s) {
    int ls = len(rng), lt = len(rng);
    std::vector<std::string> ss, ts;
    for (int i = 0; i < ls; ++i) ss.push_back("s" + std::to_string(rng() % 12));
    for (int i = 0; i < lt; ++i) ts.push_back("t" + std::to_string(rng() % 12));
    src.push_back(ss);
    tgt.push_back(ts);
    SentenceAlignment al;
    int k = n_links(rng);
    for (int i = 0; i < k; ++i)
      al.push_back({static_cast<int>(rng() % ls), static_cast<int>(rng() % lt)});
    links.push_back(al);
  }
  std::optional<MonotoneTask> built;
  try {
    built = build_monotone_task(src, tgt, links, 0.4, 1);
  } catch (const std::exception&) {
    return;  // all sentences empty is a legitimate outcome here
  }
  const MonotoneTask& task = *built;
  REQUIRE(task.source_input.sentences.size() == task.reference.sentences.size());
  for (std::size_t i = 0; i < task.source_input.sentences.size(); ++i) {
    CHECK(task.source_input.sentences[i].size() ==
          task.reference.sentences[i].size());
    CHECK(!task.source_input.sentences[i].empty());
    for (WordId w : task.source_input.sentences[i])
      CHECK(static_cast<std::size_t>(w) < task.src_vocab.size());
  }
}

TEST_CASE("alignment file parsing") {
  std::string path = "align_test.txt";
  {
    std::ofstream out(path);
    out << "0-0 1-2 3-1\n\n2-0\n";
  }
  auto als = read_alignments(path);
  REQUIRE(als.size() == 3);
  CHECK(als[0].size() == 3);
  CHECK(als[0][1] == AlignmentLink{1, 2});
  CHECK(als[1].empty());
  CHECK(als[2][0] == AlignmentLink{2, 0});
  std::remove(path.c_str());

  {
    std::ofstream out(path);
    out << "0-0 badpair\n";
  }
  CHECK_THROWS_WITH(read_alignments(path), doctest::Contains(":1"));
  std::remove(path.c_str());
}

TEST_CASE("synthetic cipher with identity key renames ids only") {
  Vocabulary vocab = synthetic_vocabulary(6);
  Corpus text = sample_synthetic_text(vocab, 10, 3, 6, 5);
  std::vector<WordId> key(vocab.size());
  for (std::size_t i = 0; i < key.size(); ++i) key[i] = static_cast<WordId>(i);
  auto task = generate_synthetic_cipher(text, vocab, key, 0.5);
  REQUIRE(task.source_input.sentences.size() == 5);
  for (std::size_t s = 0; s < 5; ++s)
    CHECK(task.source_input.sentences[s] == task.reference.sentences[s]);
}

TEST_CASE("synthetic cipher substitutes tokenwise") {
  Vocabulary vocab = synthetic_vocabulary(2);  // w0=3, w1=4
  Corpus text;
  text.side = Side::kTarget;
  text.sentences = {{3, 4, 3}, {4, 4, 4}};
  std::vector<WordId> key = {0, 1, 2, 4, 3};  // swap w0/w1
  auto task = generate_synthetic_cipher(text, vocab, key, 0.5);
  REQUIRE(task.source_input.sentences.size() == 1);
  CHECK(task.source_input.sentences[0] == std::vector<WordId>{4, 3, 4});
  CHECK(task.reference.sentences[0] == std::vector<WordId>{3, 4, 3});
  CHECK(task.lm_text.sentences.size() == 1);
}

TEST_CASE("synthetic cipher split leaves halves disjoint") {
  Vocabulary vocab = synthetic_vocabulary(30);
  Corpus text = sample_synthetic_text(vocab, 1000, 4, 9, 11);
  auto key = random_substitution_key(vocab, 17);
  auto task = generate_synthetic_cipher(text, vocab, key, 0.5);
  CHECK(task.source_input.sentences.size() == 500);
  CHECK(task.reference.sentences.size() == 500);
  CHECK(task.lm_text.sentences.size() == 500);
}

TEST_CASE("non-bijective keys are rejected") {
  Vocabulary vocab = synthetic_vocabulary(3);
  Corpus text = sample_synthetic_text(vocab, 4, 3, 5, 1);
  std::vector<WordId> key = {0, 1, 2, 3, 3, 5};  // repeated image
  CHECK_THROWS_WITH(generate_synthetic_cipher(text, vocab, key, 0.5),
                    doctest::Contains("bijection"));
}

TEST_CASE("random substitution key fixes specials and permutes the rest") {
  Vocabulary vocab = synthetic_vocabulary(20);
  auto key = random_substitution_key(vocab, 3);
  CHECK(key[vocab.bos()] == vocab.bos());
  CHECK(key[vocab.eos()] == vocab.eos());
  CHECK(key[vocab.unk()] == vocab.unk());
  std::set<WordId> image(key.begin(), key.end());
  CHECK(image.size() == key.size());
}

TEST_CASE("tokenized text io round-trips") {
  std::string path = "text_rt.txt";
  auto text = text_from_string("a b c\nd e\n\nf");
  write_tokenized(path, text);
  auto rt = read_tokenized(path);
  CHECK(rt == text);
  std::remove(path.c_str());
}
