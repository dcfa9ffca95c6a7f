// declex/lexicon.cc

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

#include "declex/lexicon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace declex {

const char* backoff_kind_name(BackoffKind kind) {
  switch (kind) {
    case BackoffKind::kUniform:
      return "uniform";
    case BackoffKind::kUnigram:
      return "unigram";
    case BackoffKind::kKneserNeyLower:
      return "kneser-ney";
  }
  return "?";
}

BackoffKind parse_backoff_kind(const std::string& name) {
  if (name == "uniform") return BackoffKind::kUniform;
  if (name == "unigram") return BackoffKind::kUnigram;
  if (name == "kneser-ney" || name == "kn") return BackoffKind::kKneserNeyLower;
  throw std::runtime_error("unknown backoff kind: " + name);
}

namespace {

// Absolute discounting with a uniform floor keeps every source word
// strictly positive, which the smoothing step relies on.
std::vector<double> discounted_unigram(const std::vector<std::int64_t>& counts,
                                       int vocab_size) {
  const double kDiscount = 0.5;
  double total = 0.0;
  std::int64_t types = 0;
  for (std::int64_t c : counts) {
    total += static_cast<double>(c);
    if (c > 0) ++types;
  }
  if (total <= 0.0)
    throw std::runtime_error("backoff model: empty source text");
  const double floor =
      kDiscount * static_cast<double>(types) / total / vocab_size;
  std::vector<double> dist(vocab_size);
  for (int f = 0; f < vocab_size; ++f)
    dist[f] =
        std::max(static_cast<double>(counts[f]) - kDiscount, 0.0) / total + floor;
  return dist;
}

}  // namespace

BackoffModel BackoffModel::uniform(int src_vocab_size) {
  if (src_vocab_size < 1)
    throw std::runtime_error("backoff model: vocabulary must be non-empty");
  return BackoffModel(BackoffKind::kUniform, src_vocab_size, {});
}

BackoffModel BackoffModel::unigram(const Corpus& source_text,
                                   int src_vocab_size) {
  std::vector<std::int64_t> counts(src_vocab_size, 0);
  for (const auto& sent : source_text.sentences)
    for (WordId f : sent) {
      if (f < 0 || f >= src_vocab_size)
        throw std::runtime_error("backoff model: id out of range");
      ++counts[f];
    }
  return BackoffModel(BackoffKind::kUnigram, src_vocab_size,
                      discounted_unigram(counts, src_vocab_size));
}

BackoffModel BackoffModel::kneser_ney_lower(const Corpus& source_text,
                                            int src_vocab_size) {
  // Continuation counts: number of distinct left contexts, with a
  // sentence-begin pseudo-context for sentence-initial words.
  std::unordered_map<std::uint64_t, bool> seen;
  std::vector<std::int64_t> counts(src_vocab_size, 0);
  for (const auto& sent : source_text.sentences) {
    WordId prev = -1;  // sentence-begin pseudo-token
    for (WordId f : sent) {
      if (f < 0 || f >= src_vocab_size)
        throw std::runtime_error("backoff model: id out of range");
      std::uint64_t key =
          (static_cast<std::uint64_t>(static_cast<std::uint32_t>(prev)) << 32) |
          static_cast<std::uint32_t>(f);
      if (seen.emplace(key, true).second) ++counts[f];
      prev = f;
    }
  }
  return BackoffModel(BackoffKind::kKneserNeyLower, src_vocab_size,
                      discounted_unigram(counts, src_vocab_size));
}

BackoffModel BackoffModel::make(BackoffKind kind, const Corpus& source_text,
                                int src_vocab_size) {
  switch (kind) {
    case BackoffKind::kUniform:
      return uniform(src_vocab_size);
    case BackoffKind::kUnigram:
      return unigram(source_text, src_vocab_size);
    case BackoffKind::kKneserNeyLower:
      return kneser_ney_lower(source_text, src_vocab_size);
  }
  throw std::runtime_error("unknown backoff kind");
}

LexiconRow threshold_renormalize(const LexiconRow& row, double tau) {
  if (!(tau >= 0.0 && tau < 1.0))
    throw std::runtime_error("threshold_renormalize: tau must be in [0,1)");
  double total = 0.0;
  for (const auto& [f, w] : row.entries) {
    if (w < 0.0)
      throw std::runtime_error("threshold_renormalize: negative weight");
    total += w;
  }
  if (total <= 0.0)
    throw std::runtime_error("threshold_renormalize: all-zero row");

  LexiconRow out;
  out.target = row.target;
  out.normalized = true;
  double kept_mass = 0.0;
  for (const auto& [f, w] : row.entries) {
    if (w / total >= tau && w > 0.0) {
      out.entries.emplace_back(f, w);
      kept_mass += w;
    }
  }
  if (out.entries.empty()) {
    // Nothing survives: keep the argmax with probability 1 (lowest source
    // id on ties) so the row stays a proper distribution.
    WordId best = row.entries.front().first;
    double best_w = row.entries.front().second;
    for (const auto& [f, w] : row.entries) {
      if (w > best_w || (w == best_w && f < best)) {
        best = f;
        best_w = w;
      }
    }
    out.entries.emplace_back(best, 1.0);
    std::sort(out.entries.begin(), out.entries.end());
    return out;
  }
  for (auto& [f, w] : out.entries) w /= kept_mass;
  std::sort(out.entries.begin(), out.entries.end());
  return out;
}

SparseLexicon::SparseLexicon(std::vector<LexiconRow> rows, int src_vocab_size,
                             int tgt_vocab_size, double tau, double lambda,
                             BackoffModel backoff)
    : src_v_(src_vocab_size),
      tgt_v_(tgt_vocab_size),
      tau_(tau),
      lambda_(lambda),
      backoff_(std::move(backoff)) {
  if (src_v_ < 1 || tgt_v_ < 1)
    throw std::runtime_error("lexicon: vocabulary sizes must be >= 1");
  if (!(lambda_ >= 0.0 && lambda_ <= 1.0))
    throw std::runtime_error("lexicon: lambda must be in [0,1]");
  if (!(tau_ >= 0.0 && tau_ < 1.0))
    throw std::runtime_error("lexicon: tau must be in [0,1)");
  if (backoff_.vocab_size() != src_v_)
    throw std::runtime_error("lexicon: backoff vocabulary size mismatch");
  rows_.resize(tgt_v_);
  for (auto& row : rows) {
    if (row.target < 0 || row.target >= tgt_v_)
      throw std::runtime_error("lexicon: row target out of range");
    if (!row.normalized)
      throw std::runtime_error("lexicon: rows must be normalized");
    if (!rows_[row.target].empty())
      throw std::runtime_error("lexicon: duplicate row for target " +
                               std::to_string(row.target));
    for (const auto& [f, w] : row.entries)
      if (f < 0 || f >= src_v_)
        throw std::runtime_error("lexicon: source id out of range");
    entries_ += row.entries.size();
    rows_[row.target] = std::move(row.entries);
  }
}

SparseLexicon SparseLexicon::init_uniform(int src_vocab_size, int tgt_vocab_size,
                                          double tau, double lambda,
                                          BackoffModel backoff) {
  if (src_vocab_size < 1 || tgt_vocab_size < 1)
    throw std::runtime_error("lexicon: vocabulary sizes must be >= 1");
  if (tau >= 1.0 / src_vocab_size)
    throw std::runtime_error(
        "init_uniform: threshold would empty all rows (tau >= 1/|V_src|)");
  SparseLexicon lex({}, src_vocab_size, tgt_vocab_size, tau, lambda,
                    std::move(backoff));
  lex.implicit_uniform_ = true;
  return lex;
}

double SparseLexicon::sparse_prob(WordId f, WordId e) const {
  if (f < 0 || f >= src_v_ || e < 0 || e >= tgt_v_)
    throw std::runtime_error("lexicon: id out of range");
  if (implicit_uniform_) return 1.0 / src_v_;
  const auto& row = rows_[e];
  auto it = std::lower_bound(
      row.begin(), row.end(), f,
      [](const std::pair<WordId, double>& en, WordId x) { return en.first < x; });
  if (it == row.end() || it->first != f) return 0.0;
  return it->second;
}

double SparseLexicon::active_fraction() const {
  if (implicit_uniform_) return 1.0;
  return static_cast<double>(entries_) /
         (static_cast<double>(src_v_) * static_cast<double>(tgt_v_));
}

void SparseLexicon::write_tsv(const std::string& path,
                              const Vocabulary& src_vocab,
                              const Vocabulary& tgt_vocab) const {
  if (static_cast<int>(src_vocab.size()) != src_v_ ||
      static_cast<int>(tgt_vocab.size()) != tgt_v_)
    throw std::runtime_error("lexicon: vocabulary size mismatch on write");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  char buf[64];
  auto emit = [&](WordId e, WordId f, double p) {
    std::snprintf(buf, sizeof(buf), "%.17g", p);
    out << tgt_vocab.word(e) << '\t' << src_vocab.word(f) << '\t' << buf << '\n';
  };
  for (WordId e = 0; e < tgt_v_; ++e) {
    if (implicit_uniform_) {
      for (WordId f = 0; f < src_v_; ++f) emit(e, f, 1.0 / src_v_);
    } else {
      for (const auto& [f, p] : rows_[e]) emit(e, f, p);
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<LexiconRow> SparseLexicon::read_tsv_rows(const std::string& path,
                                                     const Vocabulary& src_vocab,
                                                     const Vocabulary& tgt_vocab) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::vector<std::vector<std::pair<WordId, double>>> raw(tgt_vocab.size());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tgt, src, prob;
    if (!std::getline(ss, tgt, '\t') || !std::getline(ss, src, '\t') ||
        !std::getline(ss, prob, '\t'))
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": malformed lexicon row");
    // Exact surface lookup (specials included); only genuinely unknown
    // words fold into unk.
    WordId e = tgt_vocab.find(tgt);
    if (e == kInvalidWord) e = tgt_vocab.unk();
    WordId f = src_vocab.find(src);
    if (f == kInvalidWord) f = src_vocab.unk();
    raw[e].emplace_back(f, std::stod(prob));
  }
  std::vector<LexiconRow> rows;
  for (std::size_t e = 0; e < raw.size(); ++e) {
    if (raw[e].empty()) continue;
    // Entries mapped onto the same id (e.g. unk) accumulate.
    std::sort(raw[e].begin(), raw[e].end());
    LexiconRow row;
    row.target = static_cast<WordId>(e);
    for (const auto& [f, w] : raw[e]) {
      if (!row.entries.empty() && row.entries.back().first == f)
        row.entries.back().second += w;
      else
        row.entries.emplace_back(f, w);
    }
    row.normalized = false;
    rows.push_back(std::move(row));
  }
  return rows;
}

SparseLexicon class_to_word_lexicon(const SparseLexicon& class_lex,
                                    const ClassMap& c_src, const ClassMap& c_tgt,
                                    double tau, double lambda,
                                    BackoffModel backoff) {
  const int word_src_v = static_cast<int>(c_src.assignment.size());
  const int word_tgt_v = static_cast<int>(c_tgt.assignment.size());
  if (class_lex.src_vocab_size() != c_src.num_classes ||
      class_lex.tgt_vocab_size() != c_tgt.num_classes)
    throw std::runtime_error(
        "class_to_word_lexicon: class lexicon / class map size mismatch");

  // Source class members, id-sorted inside each class.
  std::vector<std::vector<WordId>> members(c_src.num_classes);
  for (WordId f = 0; f < word_src_v; ++f)
    members[c_src.class_of(f)].push_back(f);

  // One expanded row per target class, shared by all its member words.
  std::vector<std::vector<std::pair<WordId, double>>> class_rows(
      c_tgt.num_classes);
  std::vector<bool> has_class_row(c_tgt.num_classes, false);
  for (ClassId ce = 0; ce < c_tgt.num_classes; ++ce) {
    if (!class_lex.has_row(ce)) continue;
    LexiconRow unnorm;
    unnorm.target = 0;  // placeholder; per-word targets are set below
    if (class_lex.implicit_uniform()) {
      double p = 1.0 / class_lex.src_vocab_size();
      for (ClassId cf = 0; cf < c_src.num_classes; ++cf)
        for (WordId f : members[cf]) unnorm.entries.emplace_back(f, p);
    } else {
      for (const auto& [cf, p] : class_lex.row(ce))
        for (WordId f : members[cf]) unnorm.entries.emplace_back(f, p);
    }
    if (unnorm.entries.empty()) continue;
    std::sort(unnorm.entries.begin(), unnorm.entries.end());
    class_rows[ce] = threshold_renormalize(unnorm, tau).entries;
    has_class_row[ce] = true;
  }

  std::vector<LexiconRow> rows;
  for (WordId e = 0; e < word_tgt_v; ++e) {
    ClassId ce = c_tgt.class_of(e);
    if (!has_class_row[ce]) continue;
    LexiconRow row;
    row.target = e;
    row.entries = class_rows[ce];  // identical for every e in the class
    row.normalized = true;
    rows.push_back(std::move(row));
  }
  return SparseLexicon(std::move(rows), word_src_v, word_tgt_v, tau, lambda,
                       std::move(backoff));
}

}  // namespace declex
