// tests/test_ngram_lm.cc

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
#include <fstream>
#include <random>

#include "declex/kernels.hpp"
#include "declex/ngram_lm.hpp"
#include "testutil.hpp"

using namespace declex;
using testutil::full_history_state;
using testutil::text_from_string;

namespace {

NGramLM toy_bigram() {
  // Two sentences "a b" / "a c", order 2, fixed discount 0.5.  All expected
  // values below are hand-computed interpolated Kneser-Ney fractions.
  auto text = text_from_string("a b\na c");
  auto vocab = Vocabulary::build(text, 1);
  auto corpus = encode_corpus(text, vocab, Side::kTarget);
  return NGramLM::train(corpus, vocab, 2, {0.5, 0.5});
}

double logprob_after(const NGramLM& lm, const std::vector<std::string>& hist,
                     const std::string& w) {
  LMState state = lm.begin_state();
  for (const auto& h : hist) state = lm.score(state, lm.vocab().encode(h)).second;
  return lm.logprob(state, lm.vocab().encode(w));
}

}  // namespace

TEST_CASE("unigram model normalizes") {
  auto text = text_from_string("a a a");
  auto vocab = Vocabulary::build(text, 1);
  auto corpus = encode_corpus(text, vocab, Side::kTarget);
  auto lm = NGramLM::train(corpus, vocab, 1);
  std::vector<double> probs(vocab.size());
  lm.score_all(LMState{}, probs);
  CHECK(kernels::sum(probs.data(), probs.size()) ==
        doctest::Approx(1.0).epsilon(1e-9));
  // "a" dominates
  WordId a = vocab.encode("a");
  for (std::size_t w = 0; w < vocab.size(); ++w)
    if (static_cast<WordId>(w) != a) CHECK(probs[a] > probs[w]);
}

TEST_CASE("hand-computed Kneser-Ney table on the 4-token corpus") {
  auto lm = toy_bigram();
  const double tol = 1e-12;

  // unigram layer (continuation counts a:1 b:1 c:1 </s>:2, D=0.5)
  CHECK(std::exp(logprob_after(lm, {"c"}, "a")) ==
        doctest::Approx(0.5 * (1.0 / 6.0)).epsilon(tol));  // bow(c) * p1(a)

  // p(b|a) = (1-0.5)/2 + bow(a)*p_KN(b) with interpolation weight 0.5
  CHECK(std::exp(logprob_after(lm, {"a"}, "b")) ==
        doctest::Approx(1.0 / 3.0).epsilon(tol));
  CHECK(std::exp(logprob_after(lm, {"a"}, "c")) ==
        doctest::Approx(1.0 / 3.0).epsilon(tol));
  // p(a|<s>) = 1.5/2 + 0.25 * 1/6
  CHECK(std::exp(logprob_after(lm, {}, "a")) ==
        doctest::Approx(19.0 / 24.0).epsilon(tol));

  // sentence "a b": p(a|<s>) * p(b|a) * p(</s>|b), p(</s>|b) = 41/60
  std::vector<WordId> ab = {lm.vocab().encode("a"), lm.vocab().encode("b")};
  CHECK(lm.sentence_logprob(ab) ==
        doctest::Approx(std::log(19.0 / 24.0) + std::log(1.0 / 3.0) +
                        std::log(41.0 / 60.0))
            .epsilon(tol));
}

TEST_CASE("every stored history normalizes within 1e-6") {
  auto lm = toy_bigram();
  std::vector<double> probs(lm.vocab().size());
  // empty history (unigram layer)
  lm.score_all(LMState{}, probs);
  CHECK(kernels::sum(probs.data(), probs.size()) ==
        doctest::Approx(1.0).epsilon(1e-9));
  for (const LMState& h : lm.stored_contexts()) {
    lm.score_all(h, probs);
    CHECK(kernels::sum(probs.data(), probs.size()) ==
          doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("score_all agrees with per-word scores") {
  auto text = text_from_string("a b c a\nb b a\nc a b");
  auto vocab = Vocabulary::build(text, 1);
  auto corpus = encode_corpus(text, vocab, Side::kTarget);
  auto lm = NGramLM::train(corpus, vocab, 3);
  std::vector<double> probs(vocab.size());
  std::vector<LMState> states = lm.stored_contexts();
  states.push_back(LMState{});
  states.push_back(lm.begin_state());
  for (const auto& st : states) {
    lm.score_all(st, probs);
    for (std::size_t w = 0; w < vocab.size(); ++w)
      CHECK(probs[w] ==
            doctest::Approx(std::exp(lm.logprob(st, static_cast<WordId>(w))))
                .epsilon(1e-12));
  }
}

TEST_CASE("state recombination matches explicit full histories") {
  std::mt19937_64 rng(11);
  auto text = testutil::random_text(6, 30, 1, 9, &rng);
  auto vocab = Vocabulary::build(text, 1);
  auto corpus = encode_corpus(text, vocab, Side::kTarget);
  for (int order : {2, 3, 4}) {
    auto lm = NGramLM::train(corpus, vocab, order);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<WordId> sent;
      int len = 1 + static_cast<int>(rng() % 7);
      for (int i = 0; i < len; ++i)
        sent.push_back(vocab.encode("w" + std::to_string(rng() % 6)));
      // token-by-token scoring with recombined states
      LMState state = lm.begin_state();
      double total = 0.0;
      for (WordId w : sent) {
        auto [lp, next] = lm.score(state, w);
        total += lp;
        state = next;
      }
      total += lm.score_eos(state);
      // explicit full-history scoring
      std::vector<WordId> hist = {vocab.bos()};
      double expected = 0.0;
      for (WordId w : sent) {
        expected += lm.logprob(full_history_state(hist, order), w);
        hist.push_back(w);
      }
      expected += lm.score_eos(full_history_state(hist, order));
      CHECK(total == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("ARPA round-trip preserves scores") {
  auto text = text_from_string("a b c a\nb b a\nc a b\na c");
  auto vocab = Vocabulary::build(text, 1);
  auto corpus = encode_corpus(text, vocab, Side::kTarget);
  auto lm = NGramLM::train(corpus, vocab, 3);
  std::string path = "toy_rt.arpa";
  lm.write_arpa(path);
  auto lm2 = NGramLM::read_arpa(path);
  REQUIRE(lm2.order() == 3);
  REQUIRE(lm2.vocab().size() == vocab.size());
  for (int k = 1; k <= 3; ++k) CHECK(lm2.num_grams(k) == lm.num_grams(k));

  std::mt19937_64 rng(5);
  for (int q = 0; q < 100; ++q) {
    LMState s1 = lm.begin_state(), s2 = lm2.begin_state();
    int len = static_cast<int>(rng() % 4);
    for (int i = 0; i < len; ++i) {
      WordId w = static_cast<WordId>(rng() % vocab.size());
      s1 = lm.score(s1, w).second;
      s2 = lm2.score(s2, w).second;
    }
    WordId w = static_cast<WordId>(rng() % vocab.size());
    CHECK(lm.logprob(s1, w) ==
          doctest::Approx(lm2.logprob(s2, w)).epsilon(1e-9));
  }
  std::remove(path.c_str());
}

TEST_CASE("ARPA without end marker is rejected") {
  std::string path = "broken.arpa";
  {
    std::ofstream out(path);
    out << "\\data\\\nngram 1=3\n\n\\1-grams:\n-1\t<s>\n-1\t</s>\n-1\tx\n";
  }
  CHECK_THROWS_WITH(NGramLM::read_arpa(path), doctest::Contains("\\end\\"));
  std::remove(path.c_str());
}

TEST_CASE("externally written ARPA scores match hand-computed backoff math") {
  // Fixture mimicking an external tool's output; the expected sentence
  // scores are worked out by hand from the ARPA backoff definition.
  std::string path = "external.arpa";
  {
    std::ofstream out(path);
    out << "\\data\\\n"
        << "ngram 1=5\n"
        << "ngram 2=3\n"
        << "\n\\1-grams:\n"
        << "-99\t<s>\t-0.30103\n"
        << "-0.69897\t</s>\t0\n"
        << "-1\t<unk>\t0\n"
        << "-0.39794\tx\t-0.30103\n"
        << "-0.69897\ty\t0\n"
        << "\n\\2-grams:\n"
        << "-0.1549\t<s> x\n"
        << "-0.39794\tx y\n"
        << "-0.39794\ty </s>\n"
        << "\n\\end\\\n";
  }
  auto lm = NGramLM::read_arpa(path);
  const double ln10 = std::log(10.0);
  std::vector<WordId> xy = {lm.vocab().encode("x"), lm.vocab().encode("y")};
  // all three events stored: -0.1549 - 0.39794 - 0.39794 (log10)
  CHECK(lm.sentence_logprob(xy) ==
        doctest::Approx(-0.95078 * ln10).epsilon(1e-4));
  std::vector<WordId> yx = {lm.vocab().encode("y"), lm.vocab().encode("x")};
  // every event backs off:
  // p(y|<s>)=bow(<s>)p(y), p(x|y)=p(x), p(</s>|x)=bow(x)p(</s>)
  CHECK(lm.sentence_logprob(yx) ==
        doctest::Approx(-2.39794 * ln10).epsilon(1e-4));
  std::remove(path.c_str());
}

TEST_CASE("degenerate corpora") {
  auto vocab = Vocabulary::build(text_from_string("a\nb\na"), 1);
  auto corpus = encode_corpus(text_from_string("a\nb\na"), vocab, Side::kTarget);
  // no adjacent word pair anywhere
  CHECK_THROWS_WITH(NGramLM::train(corpus, vocab, 2),
                    doctest::Contains("bigram"));
  // unigram model is fine
  CHECK_NOTHROW(NGramLM::train(corpus, vocab, 1));

  // order exceeding longest sentence + 1 warns but proceeds
  auto text2 = text_from_string("a b\nb a\na b");
  auto vocab2 = Vocabulary::build(text2, 1);
  auto corpus2 = encode_corpus(text2, vocab2, Side::kTarget);
  auto lm = NGramLM::train(corpus2, vocab2, 4);
  std::vector<double> probs(vocab2.size());
  lm.score_all(lm.begin_state(), probs);
  CHECK(kernels::sum(probs.data(), probs.size()) ==
        doctest::Approx(1.0).epsilon(1e-6));

  Corpus empty;
  CHECK_THROWS_WITH(NGramLM::train(empty, vocab, 2),
                    doctest::Contains("empty"));
}

TEST_CASE("removing a sentence never raises stored gram counts") {
  std::mt19937_64 rng(23);
  auto text = testutil::random_text(5, 20, 2, 6, &rng);
  auto vocab = Vocabulary::build(text, 1);
  auto full = encode_corpus(text, vocab, Side::kTarget);
  Corpus reduced = full;
  reduced.sentences.pop_back();
  auto lm_full = NGramLM::train(full, vocab, 3);
  auto lm_reduced = NGramLM::train(reduced, vocab, 3);
  for (int k = 1; k <= 3; ++k)
    CHECK(lm_reduced.num_grams(k) <= lm_full.num_grams(k));
}

TEST_CASE("estimated discounts keep every history normalized") {
  std::mt19937_64 rng(77);
  auto text = testutil::random_text(8, 60, 1, 10, &rng);
  auto vocab = Vocabulary::build(text, 1);
  auto corpus = encode_corpus(text, vocab, Side::kTarget);
  auto lm = NGramLM::train(corpus, vocab, 3);  // "estimate" mode
  std::vector<double> probs(vocab.size());
  for (const LMState& h : lm.stored_contexts()) {
    lm.score_all(h, probs);
    CHECK(kernels::sum(probs.data(), probs.size()) ==
          doctest::Approx(1.0).epsilon(1e-6));
  }
}
