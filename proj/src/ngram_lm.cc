// declex/ngram_lm.cc

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

#include "declex/ngram_lm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "declex/kernels.hpp"

namespace declex {

namespace {

constexpr int kMaxOrder = LMState::kMaxHistory + 1;
constexpr double kMinBackoff = 1e-12;

// n-gram key used while counting, up to kMaxOrder ids.
struct GramKey {
  std::array<WordId, kMaxOrder> w{};
  std::int8_t len = 0;

  bool operator==(const GramKey& o) const {
    if (len != o.len) return false;
    for (int i = 0; i < len; ++i)
      if (w[i] != o.w[i]) return false;
    return true;
  }
  bool operator<(const GramKey& o) const {
    for (int i = 0; i < std::min(len, o.len); ++i)
      if (w[i] != o.w[i]) return w[i] < o.w[i];
    return len < o.len;
  }
  GramKey suffix() const {
    GramKey s;
    s.len = static_cast<std::int8_t>(len - 1);
    for (int i = 1; i < len; ++i) s.w[i - 1] = w[i];
    return s;
  }
};

struct GramKeyHash {
  std::size_t operator()(const GramKey& k) const {
    std::size_t h = 1469598103934665603ull;
    for (int i = 0; i < k.len; ++i) {
      h ^= static_cast<std::size_t>(k.w[i]) + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return h ^ static_cast<std::size_t>(k.len);
  }
};

using CountMap = std::unordered_map<GramKey, std::int64_t, GramKeyHash>;

double estimate_discount(const CountMap& counts) {
  std::int64_t n1 = 0, n2 = 0;
  for (const auto& [gram, c] : counts) {
    if (c == 1) ++n1;
    if (c == 2) ++n2;
  }
  double d = 0.5;
  if (n1 + 2 * n2 > 0) d = static_cast<double>(n1) / static_cast<double>(n1 + 2 * n2);
  return std::clamp(d, 0.01, 0.99);
}

}  // namespace

// --- LMState -----------------------------------------------------------------

void LMState::push(WordId w, int max_len) {
  if (max_len <= 0) {
    len_ = 0;
    return;
  }
  if (len_ >= max_len) {
    int shift = len_ - max_len + 1;
    for (int i = shift; i < len_; ++i) hist_[i - shift] = hist_[i];
    len_ = static_cast<std::int8_t>(max_len - 1);
  }
  hist_[len_++] = w;
}

void LMState::drop_oldest() {
  for (int i = 1; i < len_; ++i) hist_[i - 1] = hist_[i];
  if (len_ > 0) --len_;
}

std::size_t LMState::hash() const {
  std::size_t h = 1469598103934665603ull;
  for (int i = 0; i < len_; ++i) {
    h ^= static_cast<std::size_t>(hist_[i]) + 0x9e3779b97f4a7c15ull;
    h *= 1099511628211ull;
  }
  return h ^ static_cast<std::size_t>(len_);
}

// --- lookup helpers ----------------------------------------------------------

const double* NGramLM::Context::find(WordId w) const {
  auto it = std::lower_bound(
      conts.begin(), conts.end(), w,
      [](const std::pair<WordId, double>& e, WordId x) { return e.first < x; });
  if (it == conts.end() || it->first != w) return nullptr;
  return &it->second;
}

NGramLM::HistKey NGramLM::make_key(const WordId* hist, int len) {
  HistKey k;
  k.len = static_cast<std::int8_t>(len);
  for (int i = 0; i < len; ++i) k.w[i] = hist[i];
  return k;
}

std::size_t NGramLM::HistKeyHash::operator()(const HistKey& k) const {
  std::size_t h = 1469598103934665603ull;
  for (int i = 0; i < k.len; ++i) {
    h ^= static_cast<std::size_t>(k.w[i]) + 0x9e3779b97f4a7c15ull;
    h *= 1099511628211ull;
  }
  return h ^ static_cast<std::size_t>(k.len);
}

const NGramLM::Context* NGramLM::find_context(const WordId* hist, int len) const {
  auto it = ctx_ids_.find(make_key(hist, len));
  if (it == ctx_ids_.end()) return nullptr;
  return &contexts_[it->second];
}

double NGramLM::logprob(const LMState& state, WordId w) const {
  if (w < 0 || static_cast<std::size_t>(w) >= vocab_.size())
    throw std::runtime_error("ngram_lm: word id out of range");
  double acc = 0.0;
  int maxl = std::min(state.length(), order_ - 1);
  WordId suffix[LMState::kMaxHistory];
  for (int l = maxl; l >= 1; --l) {
    for (int i = 0; i < l; ++i) suffix[i] = state.at(state.length() - l + i);
    const Context* ctx = find_context(suffix, l);
    if (ctx == nullptr) continue;
    if (const double* p = ctx->find(w)) return acc + *p;
    acc += ctx->logbow;
  }
  return acc + unigram_logp_[w];
}

std::pair<double, LMState> NGramLM::score(const LMState& state, WordId w) const {
  return {logprob(state, w), next_state(state, w)};
}

LMState NGramLM::next_state(const LMState& state, WordId w) const {
  LMState next = state;
  next.push(w, order_ - 1);
  // Recombination: keep only the longest suffix that is a stored history.
  WordId buf[LMState::kMaxHistory];
  while (next.length() > 0) {
    for (int i = 0; i < next.length(); ++i) buf[i] = next.at(i);
    if (find_context(buf, next.length()) != nullptr) break;
    next.drop_oldest();
  }
  return next;
}

double NGramLM::sentence_logprob(std::span<const WordId> sentence) const {
  LMState state = begin_state();
  double total = 0.0;
  for (WordId w : sentence) {
    auto [lp, next] = score(state, w);
    total += lp;
    state = next;
  }
  return total + score_eos(state);
}

LMState NGramLM::begin_state() const {
  LMState s;
  s.push(vocab_.bos(), order_ - 1);
  WordId buf[LMState::kMaxHistory];
  while (s.length() > 0) {
    for (int i = 0; i < s.length(); ++i) buf[i] = s.at(i);
    if (find_context(buf, s.length()) != nullptr) break;
    s.drop_oldest();
  }
  return s;
}

void NGramLM::score_all(const LMState& state, std::span<double> out) const {
  const std::size_t v = vocab_.size();
  if (out.size() < v) throw std::runtime_error("score_all: output too small");
  int maxl = std::min(state.length(), order_ - 1);
  const Context* levels[LMState::kMaxHistory];
  int n_levels = 0;
  WordId suffix[LMState::kMaxHistory];
  for (int l = 1; l <= maxl; ++l) {
    for (int i = 0; i < l; ++i) suffix[i] = state.at(state.length() - l + i);
    if (const Context* ctx = find_context(suffix, l)) levels[n_levels++] = ctx;
  }
  // Multiplier applied to a level = product of backoff weights of all
  // longer stored levels.
  double bow_after = 1.0;
  double mult[LMState::kMaxHistory + 1];
  for (int j = n_levels - 1; j >= 0; --j) {
    mult[j + 1] = bow_after;
    bow_after *= std::exp(levels[j]->logbow);
  }
  mult[0] = bow_after;  // unigram level
  kernels::scale_copy(unigram_p_.data(), mult[0], out.data(), v);
  for (int j = 0; j < n_levels; ++j)
    for (const auto& [w, logp] : levels[j]->conts)
      out[w] = std::exp(logp) * mult[j + 1];
}

std::vector<LMState> NGramLM::stored_contexts() const {
  std::vector<HistKey> keys;
  keys.reserve(ctx_ids_.size());
  for (const auto& [key, id] : ctx_ids_) keys.push_back(key);
  std::sort(keys.begin(), keys.end(), [](const HistKey& a, const HistKey& b) {
    if (a.len != b.len) return a.len < b.len;
    for (int i = 0; i < a.len; ++i)
      if (a.w[i] != b.w[i]) return a.w[i] < b.w[i];
    return false;
  });
  std::vector<LMState> states;
  states.reserve(keys.size());
  for (const auto& key : keys) {
    LMState s;
    for (int i = 0; i < key.len; ++i) s.push(key.w[i], LMState::kMaxHistory);
    states.push_back(s);
  }
  return states;
}

std::size_t NGramLM::num_grams(int k) const {
  if (k < 1 || k > order_) return 0;
  return gram_counts_[k - 1];
}

// --- training ----------------------------------------------------------------

class NGramLMBuilder {
 public:
  static NGramLM build(const Corpus& text, const Vocabulary& vocab, int order,
                       const std::vector<double>& discounts) {
    if (order < 1 || order > kMaxOrder)
      throw std::runtime_error("ngram_lm: order must be in 1.." +
                               std::to_string(kMaxOrder));
    if (text.sentences.empty()) throw std::runtime_error("ngram_lm: empty corpus");

    std::vector<double> d = discounts;
    if (d.size() == 1) d.assign(order, d[0]);
    if (!d.empty() && d.size() != static_cast<std::size_t>(order))
      throw std::runtime_error("ngram_lm: need one discount per order");
    for (double x : d)
      if (!(x >= 0.0 && x < 1.0))
        throw std::runtime_error("ngram_lm: discounts must be in [0,1)");

    const WordId bos = vocab.bos();
    const WordId eos = vocab.eos();
    const std::size_t v = vocab.size();

    // Raw counts per order over bos/eos-padded sentences.  The lone
    // sentence-begin unigram is skipped; it is never predicted.
    std::vector<CountMap> raw(order + 1);
    std::size_t max_len = 0;
    std::size_t distinct_word_bigrams = 0;
    CountMap word_bigrams;
    for (const auto& sent : text.sentences) {
      max_len = std::max(max_len, sent.size());
      std::vector<WordId> seq;
      seq.reserve(sent.size() + 2);
      seq.push_back(bos);
      for (WordId w : sent) {
        if (w < 0 || static_cast<std::size_t>(w) >= v)
          throw std::runtime_error("ngram_lm: corpus id out of vocabulary range");
        seq.push_back(w);
      }
      seq.push_back(eos);
      for (int k = 1; k <= order; ++k) {
        if (seq.size() < static_cast<std::size_t>(k)) continue;
        for (std::size_t i = 0; i + k <= seq.size(); ++i) {
          if (k == 1 && seq[i] == bos) continue;
          GramKey g;
          g.len = static_cast<std::int8_t>(k);
          for (int j = 0; j < k; ++j) g.w[j] = seq[i + j];
          ++raw[k][g];
        }
      }
      for (std::size_t i = 0; i + 1 < sent.size(); ++i) {
        GramKey g;
        g.len = 2;
        g.w[0] = sent[i];
        g.w[1] = sent[i + 1];
        ++word_bigrams[g];
      }
    }
    distinct_word_bigrams = word_bigrams.size();
    if (order >= 2 && distinct_word_bigrams == 0)
      throw std::runtime_error("ngram_lm: zero distinct bigrams in corpus");
    if (static_cast<std::size_t>(order) > max_len + 1)
      std::cerr << "warning: LM order " << order
                << " exceeds longest sentence + 1 (" << max_len + 1
                << "); higher-order tables will be thin\n";

    // Kneser-Ney counts: raw at the top level and for histories starting
    // at sentence begin, distinct-left-extension counts elsewhere.
    std::vector<CountMap> cnt(order + 1);
    cnt[order] = std::move(raw[order]);
    for (int k = order - 1; k >= 1; --k) {
      const CountMap& upper = (k + 1 == order) ? cnt[order] : raw[k + 1];
      for (const auto& [gram, c] : upper) ++cnt[k][gram.suffix()];
      for (const auto& [gram, c] : raw[k])
        if (gram.w[0] == bos) cnt[k][gram] = c;
    }

    NGramLM lm;
    lm.order_ = order;
    lm.eos_ = eos;
    lm.vocab_ = vocab;
    lm.gram_counts_.assign(order, 0);
    lm.gram_counts_[0] = v;

    // Level 1: discounted continuation unigram, interpolated with the
    // uniform distribution so every vocabulary word keeps positive mass.
    const double d1 = d.empty() ? estimate_discount(cnt[1]) : d[0];
    double s1 = 0.0;
    std::int64_t n1types = 0;
    for (const auto& [gram, c] : cnt[1]) {
      s1 += static_cast<double>(c);
      ++n1types;
    }
    if (s1 <= 0.0) throw std::runtime_error("ngram_lm: empty corpus");
    const double floor1 =
        d1 * static_cast<double>(n1types) / s1 / static_cast<double>(v);
    lm.unigram_logp_.assign(v, 0.0);
    lm.unigram_p_.assign(v, 0.0);
    for (std::size_t w = 0; w < v; ++w) {
      GramKey g;
      g.len = 1;
      g.w[0] = static_cast<WordId>(w);
      auto it = cnt[1].find(g);
      double c = it == cnt[1].end() ? 0.0 : static_cast<double>(it->second);
      double p = std::max(c - d1, 0.0) / s1 + floor1;
      lm.unigram_p_[w] = p;
      lm.unigram_logp_[w] = std::log(p);
    }

    // Levels 2..order: group by history, interpolate with the lower level,
    // then convert the interpolation weight into a stored backoff weight.
    for (int k = 2; k <= order; ++k) {
      const double dk = d.empty() ? estimate_discount(cnt[k]) : d[k - 1];
      std::vector<GramKey> grams;
      grams.reserve(cnt[k].size());
      for (const auto& [gram, c] : cnt[k]) grams.push_back(gram);
      std::sort(grams.begin(), grams.end());
      lm.gram_counts_[k - 1] = grams.size();

      std::size_t i = 0;
      while (i < grams.size()) {
        std::size_t j = i;
        while (j < grams.size() && std::equal(grams[i].w.begin(),
                                              grams[i].w.begin() + k - 1,
                                              grams[j].w.begin()))
          ++j;
        // grams[i..j) share the history grams[i].w[0..k-1).
        double total = 0.0;
        for (std::size_t g = i; g < j; ++g)
          total += static_cast<double>(cnt[k].find(grams[g])->second);
        const double n_conts = static_cast<double>(j - i);
        const double interp = dk * n_conts / total;

        LMState lower_state;
        for (int x = 1; x < k - 1; ++x)
          lower_state.push(grams[i].w[x], LMState::kMaxHistory);

        NGramLM::Context ctx;
        ctx.conts.reserve(j - i);
        double seen_mass = 0.0;
        double lower_mass = 0.0;
        for (std::size_t g = i; g < j; ++g) {
          const WordId w = grams[g].w[k - 1];
          const double c = static_cast<double>(cnt[k].find(grams[g])->second);
          const double p_low = std::exp(lm.logprob(lower_state, w));
          const double p = std::max(c - dk, 0.0) / total + interp * p_low;
          ctx.conts.emplace_back(w, std::log(p));
          seen_mass += p;
          lower_mass += p_low;
        }
        double num = std::max(1.0 - seen_mass, kMinBackoff);
        double den = std::max(1.0 - lower_mass, kMinBackoff);
        ctx.logbow = std::log(num / den);

        NGramLM::HistKey hist = NGramLM::make_key(grams[i].w.data(), k - 1);
        lm.ctx_ids_.emplace(hist, static_cast<std::uint32_t>(lm.contexts_.size()));
        lm.contexts_.push_back(std::move(ctx));
        i = j;
      }
    }
    return lm;
  }
};

NGramLM NGramLM::train(const Corpus& text, const Vocabulary& vocab, int order,
                       const std::vector<double>& discounts) {
  return NGramLMBuilder::build(text, vocab, order, discounts);
}

// --- ARPA I/O ----------------------------------------------------------------

namespace {
constexpr double kLn10 = 2.302585092994045684;
}

void NGramLM::write_arpa(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  char buf[64];

  // Collect stored grams per level.  Level k >= 2 grams live in the
  // contexts of length k-1.
  std::vector<HistKey> ctx_keys;
  ctx_keys.reserve(ctx_ids_.size());
  for (const auto& [key, id] : ctx_ids_) ctx_keys.push_back(key);
  std::sort(ctx_keys.begin(), ctx_keys.end(),
            [](const HistKey& a, const HistKey& b) {
              if (a.len != b.len) return a.len < b.len;
              for (int i = 0; i < a.len; ++i)
                if (a.w[i] != b.w[i]) return a.w[i] < b.w[i];
              return false;
            });

  out << "\\data\\\n";
  for (int k = 1; k <= order_; ++k)
    out << "ngram " << k << "=" << gram_counts_[k - 1] << "\n";

  auto print_log10 = [&](double ln_value) {
    std::snprintf(buf, sizeof(buf), "%.17g", ln_value / kLn10);
    out << buf;
  };
  auto context_logbow = [&](const WordId* ids, int len) {
    const Context* c = find_context(ids, len);
    return c == nullptr ? 0.0 : c->logbow;
  };

  out << "\n\\1-grams:\n";
  for (std::size_t w = 0; w < vocab_.size(); ++w) {
    print_log10(unigram_logp_[w]);
    out << '\t' << vocab_.word(static_cast<WordId>(w));
    if (order_ > 1) {
      WordId id = static_cast<WordId>(w);
      out << '\t';
      print_log10(context_logbow(&id, 1));
    }
    out << '\n';
  }

  for (int k = 2; k <= order_; ++k) {
    out << "\n\\" << k << "-grams:\n";
    for (const auto& hist : ctx_keys) {
      if (hist.len != k - 1) continue;
      const Context& ctx = contexts_[ctx_ids_.at(hist)];
      for (const auto& [w, logp] : ctx.conts) {
        print_log10(logp);
        out << '\t';
        for (int i = 0; i < hist.len; ++i) out << vocab_.word(hist.w[i]) << ' ';
        out << vocab_.word(w);
        if (k < order_) {
          WordId full[kMaxOrder];
          for (int i = 0; i < hist.len; ++i) full[i] = hist.w[i];
          full[hist.len] = w;
          out << '\t';
          print_log10(context_logbow(full, k));
        }
        out << '\n';
      }
    }
  }
  out << "\n\\end\\\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

NGramLM NGramLM::read_arpa(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);

  auto fail = [&](std::size_t lineno, const std::string& what) -> void {
    throw std::runtime_error(path + ":" + std::to_string(lineno) +
                             ": ARPA parse error: " + what);
  };

  std::string line;
  std::size_t lineno = 0;
  // Find \data\ header.
  bool found_data = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.rfind("\\data\\", 0) == 0) {
      found_data = true;
      break;
    }
  }
  if (!found_data) fail(lineno, "missing \\data\\ section");

  std::vector<std::size_t> counts;
  std::string pending;
  bool have_pending = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) break;
    if (line.rfind("ngram", 0) != 0) {
      pending = line;  // tolerate a missing blank line before a section
      have_pending = true;
      break;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) fail(lineno, "malformed ngram count line");
    int k = std::stoi(line.substr(5, eq - 5));
    if (k != static_cast<int>(counts.size()) + 1)
      fail(lineno, "ngram counts out of order");
    counts.push_back(std::stoul(line.substr(eq + 1)));
  }
  if (counts.empty()) fail(lineno, "no ngram counts");
  const int order = static_cast<int>(counts.size());
  if (order > kMaxOrder) fail(lineno, "order too large");

  struct RawGram {
    std::vector<std::string> words;
    double logp;
    double logbow;
  };
  std::vector<std::vector<RawGram>> sections(order);

  bool saw_end = false;
  int cur_k = 0;
  while (have_pending || std::getline(in, line)) {
    if (have_pending) {
      line = pending;
      have_pending = false;
    } else {
      ++lineno;
    }
    if (line.empty()) continue;
    if (line.rfind("\\end\\", 0) == 0) {
      saw_end = true;
      break;
    }
    if (line[0] == '\\') {
      auto dash = line.find("-grams:");
      if (dash == std::string::npos) fail(lineno, "unknown section " + line);
      cur_k = std::stoi(line.substr(1, dash - 1));
      if (cur_k < 1 || cur_k > order) fail(lineno, "section order out of range");
      continue;
    }
    if (cur_k == 0) fail(lineno, "entry outside any section");
    std::istringstream ss(line);
    RawGram g;
    g.logbow = 0.0;
    std::string tok;
    if (!(ss >> tok)) fail(lineno, "missing log-probability");
    try {
      g.logp = std::stod(tok) * kLn10;
    } catch (...) {
      fail(lineno, "bad log-probability '" + tok + "'");
    }
    for (int i = 0; i < cur_k; ++i) {
      if (!(ss >> tok)) fail(lineno, "too few words for section order");
      g.words.push_back(tok);
    }
    if (ss >> tok) g.logbow = std::stod(tok) * kLn10;
    sections[cur_k - 1].push_back(std::move(g));
  }
  if (!saw_end) fail(lineno, "missing \\end\\ marker");
  for (int k = 1; k <= order; ++k)
    if (sections[k - 1].size() != counts[k - 1])
      fail(lineno, "section " + std::to_string(k) + " has " +
                       std::to_string(sections[k - 1].size()) + " entries, " +
                       "header says " + std::to_string(counts[k - 1]));

  // Vocabulary from the unigram section, ids in file order.
  std::vector<std::string> words;
  words.reserve(sections[0].size() + 1);
  for (const auto& g : sections[0]) words.push_back(g.words[0]);
  WordId bos = kInvalidWord, eos = kInvalidWord, unk = kInvalidWord;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (words[i] == Vocabulary::kBosSurface) bos = static_cast<WordId>(i);
    if (words[i] == Vocabulary::kEosSurface) eos = static_cast<WordId>(i);
    if (words[i] == Vocabulary::kUnkSurface) unk = static_cast<WordId>(i);
  }
  if (bos == kInvalidWord || eos == kInvalidWord)
    throw std::runtime_error(path + ": ARPA model lacks sentence markers");
  bool synth_unk = unk == kInvalidWord;
  if (synth_unk) {
    unk = static_cast<WordId>(words.size());
    words.push_back(Vocabulary::kUnkSurface);
  }

  NGramLM lm;
  lm.order_ = order;
  lm.vocab_ = Vocabulary(std::move(words), bos, eos, unk);
  lm.eos_ = eos;
  const std::size_t v = lm.vocab_.size();
  lm.gram_counts_.assign(order, 0);
  lm.gram_counts_[0] = v;
  for (int k = 2; k <= order; ++k) lm.gram_counts_[k - 1] = sections[k - 1].size();

  lm.unigram_logp_.assign(v, -99.0 * kLn10);
  for (std::size_t i = 0; i < sections[0].size(); ++i)
    lm.unigram_logp_[i] = sections[0][i].logp;
  lm.unigram_p_.assign(v, 0.0);
  for (std::size_t i = 0; i < v; ++i) lm.unigram_p_[i] = std::exp(lm.unigram_logp_[i]);

  auto encode_gram = [&](const std::vector<std::string>& surfaces,
                         std::vector<WordId>* ids) {
    ids->clear();
    for (const auto& s : surfaces) {
      WordId id = lm.vocab_.find(s);
      if (id == kInvalidWord)
        throw std::runtime_error(path + ": n-gram word '" + s +
                                 "' missing from unigram section");
      ids->push_back(id);
    }
  };

  // Contexts come from two sources: grams of order < max with a backoff
  // weight, and histories of stored higher-order grams.
  std::unordered_map<HistKey, Context, HistKeyHash> ctx_build;
  std::vector<WordId> ids;
  for (int k = 1; k < order; ++k) {
    for (const auto& g : sections[k - 1]) {
      if (g.logbow == 0.0) continue;
      encode_gram(g.words, &ids);
      ctx_build[make_key(ids.data(), k)].logbow = g.logbow;
    }
  }
  for (int k = 2; k <= order; ++k) {
    for (const auto& g : sections[k - 1]) {
      encode_gram(g.words, &ids);
      HistKey hist = make_key(ids.data(), k - 1);
      ctx_build[hist].conts.emplace_back(ids[k - 1], g.logp);
    }
  }
  std::vector<HistKey> keys;
  keys.reserve(ctx_build.size());
  for (auto& [key, ctx] : ctx_build) {
    std::sort(ctx.conts.begin(), ctx.conts.end());
    keys.push_back(key);
  }
  std::sort(keys.begin(), keys.end(), [](const HistKey& a, const HistKey& b) {
    if (a.len != b.len) return a.len < b.len;
    for (int i = 0; i < a.len; ++i)
      if (a.w[i] != b.w[i]) return a.w[i] < b.w[i];
    return false;
  });
  for (const auto& key : keys) {
    lm.ctx_ids_.emplace(key, static_cast<std::uint32_t>(lm.contexts_.size()));
    lm.contexts_.push_back(std::move(ctx_build[key]));
  }
  return lm;
}

}  // namespace declex
