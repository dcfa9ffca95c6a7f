// tools/declex_main.cc

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

// declex: unsupervised word-substitution lexicon training pipeline.
//
//   synth               generate a synthetic substitution task
//   build-task          build the monotone 1:1 task from bitext + alignments
//   train-lm            train a Kneser-Ney n-gram LM, write ARPA
//   cluster             exchange-cluster a vocabulary into word classes
//   init-class-lexicon  learn an initial word lexicon on word classes
//   train               EM-train the sparse lexicon
//   decode              Viterbi-decode source text
//   evaluate            token accuracy of a hypothesis against a reference

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "declex/corpus.hpp"
#include "declex/decoder.hpp"
#include "declex/em_trainer.hpp"
#include "declex/evaluation.hpp"
#include "declex/kernels.hpp"
#include "declex/lexicon.hpp"
#include "declex/ngram_lm.hpp"
#include "declex/trellis.hpp"
#include "declex/vocabulary.hpp"
#include "declex/word_classes.hpp"

namespace {

using namespace declex;

void force_kernels(const std::string& name) {
  if (name.empty() || name == "auto") return;
  if (name == "scalar")
    kernels::force_backend(kernels::Backend::kScalar);
  else if (name == "avx2")
    kernels::force_backend(kernels::Backend::kAvx2);
  else
    throw std::runtime_error("unknown kernel backend: " + name);
}

int parse_beam(const std::string& value) {
  if (value == "inf" || value == "unlimited" || value == "-1") return kUnlimited;
  return std::stoi(value);
}

struct SynthArgs {
  int vocab = 100;
  std::size_t input_sentences = 1250;
  std::size_t lm_sentences = 12500;
  int min_len = 4;
  int max_len = 12;
  std::uint64_t seed = 1;
  double ambiguity = 0.0;
  std::string out;
};

int run_synth(const SynthArgs& args) {
  Vocabulary vocab = synthetic_vocabulary(args.vocab);
  Corpus text = sample_synthetic_text(
      vocab, args.input_sentences + args.lm_sentences, args.min_len,
      args.max_len, args.seed);
  auto key = random_substitution_key(vocab, args.seed + 1);
  double split = (static_cast<double>(args.input_sentences) + 0.5) /
                 static_cast<double>(text.sentences.size());
  MonotoneTask task =
      args.ambiguity > 0.0
          ? generate_ambiguous_cipher(
                text, vocab, key, random_substitution_key(vocab, args.seed + 2),
                args.ambiguity, args.seed + 3, split)
          : generate_synthetic_cipher(text, vocab, key, split);

  write_tokenized(args.out + ".source.txt",
                  decode_corpus(task.source_input, task.src_vocab));
  write_tokenized(args.out + ".reference.txt",
                  decode_corpus(task.reference, task.tgt_vocab));
  write_tokenized(args.out + ".lmtext.txt",
                  decode_corpus(task.lm_text, task.tgt_vocab));
  std::ofstream keyfile(args.out + ".key.tsv");
  for (std::size_t e = 0; e < vocab.size(); ++e) {
    if (vocab.is_special(static_cast<WordId>(e))) continue;
    keyfile << vocab.word(static_cast<WordId>(e)) << '\t'
            << task.src_vocab.word(key[e]) << '\n';
  }
  std::cerr << "wrote " << args.out << ".{source,reference,lmtext}.txt and "
            << args.out << ".key.tsv\n";
  return 0;
}

struct BuildTaskArgs {
  std::string src, tgt, align, out;
  double split = 0.5;
  long long min_count = 1;
};

int run_build_task(const BuildTaskArgs& args) {
  auto src = read_tokenized(args.src);
  auto tgt = read_tokenized(args.tgt);
  auto alignments = read_alignments(args.align);
  MonotoneTask task =
      build_monotone_task(src, tgt, alignments, args.split, args.min_count);
  write_tokenized(args.out + ".source.txt",
                  decode_corpus(task.source_input, task.src_vocab));
  write_tokenized(args.out + ".reference.txt",
                  decode_corpus(task.reference, task.tgt_vocab));
  write_tokenized(args.out + ".lmtext.txt",
                  decode_corpus(task.lm_text, task.tgt_vocab));
  task.src_vocab.write_tsv(args.out + ".src-vocab.tsv");
  task.tgt_vocab.write_tsv(args.out + ".tgt-vocab.tsv");
  std::cerr << "kept " << task.source_input.sentences.size() << " + "
            << task.lm_text.sentences.size() << " sentences\n";
  return 0;
}

struct TrainLmArgs {
  std::string text, out;
  int order = 3;
  long long min_count = 1;
  std::string discount = "estimate";
};

int run_train_lm(const TrainLmArgs& args) {
  auto text = read_tokenized(args.text);
  Vocabulary vocab = Vocabulary::build(text, args.min_count);
  Corpus corpus = encode_corpus(text, vocab, Side::kTarget);
  std::vector<double> discounts;
  if (args.discount != "estimate") {
    std::istringstream ss(args.discount);
    std::string tok;
    while (std::getline(ss, tok, ',')) discounts.push_back(std::stod(tok));
  }
  NGramLM lm = NGramLM::train(corpus, vocab, args.order, discounts);
  lm.write_arpa(args.out);
  std::cerr << "trained " << args.order << "-gram LM over " << vocab.size()
            << " words\n";
  return 0;
}

struct ClusterArgs {
  std::string text, out;
  int classes = 100;
  int sweeps = 10;
  long long min_count = 1;
  std::uint64_t seed = 0;
};

int run_cluster(const ClusterArgs& args) {
  auto text = read_tokenized(args.text);
  Vocabulary vocab = Vocabulary::build(text, args.min_count);
  Corpus corpus = encode_corpus(text, vocab, Side::kSource);
  ClassMap map =
      cluster_exchange(corpus, vocab, args.classes, args.sweeps, args.seed);
  write_class_map_tsv(args.out, map, vocab);
  std::cerr << "objective " << class_bigram_loglik(corpus, map) << " with "
            << args.classes << " classes\n";
  return 0;
}

struct InitClassLexiconArgs {
  std::string input, lm_text, classes_src, classes_tgt, out;
  int class_lm_order = 2;
  int iterations = 50;
  double tau = 1e-3;
  int workers = 0;
  std::string kernels = "auto";
};

int run_init_class_lexicon(const InitClassLexiconArgs& args) {
  force_kernels(args.kernels);
  auto [c_src, src_vocab] = read_class_map_tsv(args.classes_src, Side::kSource);
  auto [c_tgt, tgt_vocab] = read_class_map_tsv(args.classes_tgt, Side::kTarget);

  Corpus input =
      encode_corpus(read_tokenized(args.input), src_vocab, Side::kSource);
  Corpus lm_words =
      encode_corpus(read_tokenized(args.lm_text), tgt_vocab, Side::kTarget);

  // Map both corpora to classes, train a class LM and a full class-to-class
  // lexicon with EM, then convert back to words and threshold.
  MonotoneTask class_task{map_corpus(input, c_src),
                          Corpus{{}, Side::kTarget},
                          map_corpus(lm_words, c_tgt),
                          class_vocabulary(c_src),
                          class_vocabulary(c_tgt)};
  NGramLM class_lm = NGramLM::train(class_task.lm_text, class_task.tgt_vocab,
                                    args.class_lm_order);

  TrainConfig config;
  config.iterations = args.iterations;
  config.tau = 0.0;  // the class lexicon stays full
  config.lambda = 1.0;
  config.histogram_beam = kUnlimited;
  config.lex_beam = kUnlimited;
  config.lm_beam = kUnlimited;
  config.workers = args.workers;
  SparseLexicon init = SparseLexicon::init_uniform(
      static_cast<int>(class_task.src_vocab.size()),
      static_cast<int>(class_task.tgt_vocab.size()), 0.0, 1.0,
      BackoffModel::uniform(static_cast<int>(class_task.src_vocab.size())));
  auto [class_lex, stats] =
      train(class_task, class_lm, config, init,
            [](const IterationStats& row, const SparseLexicon&) {
              std::fprintf(stderr, "class-em iter %d loglik %.4f\n",
                           row.iteration, row.loglik);
            });

  SparseLexicon word_lex = class_to_word_lexicon(
      class_lex, c_src, c_tgt, args.tau, 1.0,
      BackoffModel::uniform(static_cast<int>(src_vocab.size())));
  word_lex.write_tsv(args.out, src_vocab, tgt_vocab);
  std::cerr << "class-initialized lexicon: " << word_lex.materialized_entries()
            << " entries (" << 100.0 * word_lex.active_fraction()
            << "% active)\n";
  return 0;
}

struct TrainArgs {
  std::string input, lm, init = "uniform", out, stats, config, reference;
  long long min_count = 1;
  std::string kernels = "auto";
  // string-typed so "inf" works; empty = keep config/default
  std::string iterations, tau, lambda, backoff, histogram_beam, lex_beam,
      lm_beam, workers, checkpoint_every, eval_every, convergence_rel_tol, seed;
};

int run_train(const TrainArgs& args) {
  force_kernels(args.kernels);
  TrainConfig config;
  if (!args.config.empty()) config = parse_train_config(args.config);
  auto override_key = [&](const std::string& key, const std::string& value) {
    if (!value.empty()) apply_config_entry(&config, key, value);
  };
  override_key("iterations", args.iterations);
  override_key("tau", args.tau);
  override_key("lambda", args.lambda);
  override_key("backoff", args.backoff);
  override_key("histogram_beam", args.histogram_beam);
  override_key("lex_beam", args.lex_beam);
  override_key("lm_beam", args.lm_beam);
  override_key("workers", args.workers);
  override_key("checkpoint_every", args.checkpoint_every);
  override_key("eval_every", args.eval_every);
  override_key("convergence_rel_tol", args.convergence_rel_tol);
  override_key("seed", args.seed);

  NGramLM lm = NGramLM::read_arpa(args.lm);
  auto input_text = read_tokenized(args.input);
  Vocabulary src_vocab = Vocabulary::build(input_text, args.min_count);
  MonotoneTask task{encode_corpus(input_text, src_vocab, Side::kSource),
                    Corpus{{}, Side::kTarget},
                    Corpus{{}, Side::kTarget},
                    src_vocab,
                    lm.vocab()};
  if (!args.reference.empty())
    task.reference =
        encode_corpus(read_tokenized(args.reference), lm.vocab(), Side::kTarget);

  const int v_src = static_cast<int>(task.src_vocab.size());
  const int v_tgt = static_cast<int>(task.tgt_vocab.size());
  BackoffModel backoff =
      BackoffModel::make(config.backoff, task.source_input, v_src);

  std::optional<SparseLexicon> init;
  if (args.init == "uniform") {
    init = SparseLexicon::init_uniform(v_src, v_tgt, config.tau, config.lambda,
                                       backoff);
  } else {
    auto rows =
        SparseLexicon::read_tsv_rows(args.init, task.src_vocab, task.tgt_vocab);
    std::vector<LexiconRow> normalized;
    for (auto& r : rows)
      normalized.push_back(threshold_renormalize(r, config.tau));
    init = SparseLexicon(std::move(normalized), v_src, v_tgt, config.tau,
                         config.lambda, backoff);
  }

  auto callback = [&](const IterationStats& row, const SparseLexicon& lex) {
    std::fprintf(stderr, "iter %d loglik %.4f active %.5f", row.iteration,
                 row.loglik, row.active_fraction);
    if (row.accuracy >= 0.0) std::fprintf(stderr, " acc %.4f", row.accuracy);
    std::fprintf(stderr, " (%.2fs)\n", row.seconds);
    if (config.checkpoint_every > 0 &&
        row.iteration % config.checkpoint_every == 0) {
      char suffix[32];
      std::snprintf(suffix, sizeof(suffix), ".iter%04d.tsv", row.iteration);
      lex.write_tsv(args.out + suffix, task.src_vocab, task.tgt_vocab);
    }
  };

  auto [lexicon, stats] = train(task, lm, config, *init, callback);
  lexicon.write_tsv(args.out, task.src_vocab, task.tgt_vocab);
  if (!args.stats.empty()) write_stats_tsv(args.stats, stats);
  return 0;
}

struct DecodeArgs {
  std::string input, lexicon, lm, out;
  std::string histogram_beam = "50", lex_beam = "5", lm_beam = "50";
  double lambda = 0.15;
  double tau = 0.0;
  std::string backoff = "uniform";
  long long min_count = 1;
  int workers = 0;
  std::string kernels = "auto";
};

int run_decode(const DecodeArgs& args) {
  force_kernels(args.kernels);
  NGramLM lm = NGramLM::read_arpa(args.lm);
  auto input_text = read_tokenized(args.input);
  Vocabulary src_vocab = Vocabulary::build(input_text, args.min_count);
  Corpus input = encode_corpus(input_text, src_vocab, Side::kSource);

  const int v_src = static_cast<int>(src_vocab.size());
  const int v_tgt = static_cast<int>(lm.vocab().size());
  BackoffModel backoff =
      BackoffModel::make(parse_backoff_kind(args.backoff), input, v_src);
  auto rows = SparseLexicon::read_tsv_rows(args.lexicon, src_vocab, lm.vocab());
  std::vector<LexiconRow> normalized;
  for (auto& r : rows) normalized.push_back(threshold_renormalize(r, args.tau));
  SparseLexicon lexicon(std::move(normalized), v_src, v_tgt, args.tau,
                        args.lambda, backoff);

  SearchBeams beams{parse_beam(args.histogram_beam), parse_beam(args.lex_beam),
                    parse_beam(args.lm_beam)};
  Corpus hyp = decode_corpus(input, lexicon, lm, beams, args.workers);
  write_tokenized(args.out, decode_corpus(hyp, lm.vocab()));
  return 0;
}

struct EvaluateArgs {
  std::string hyp, ref;
};

int run_evaluate(const EvaluateArgs& args) {
  auto hyp_text = read_tokenized(args.hyp);
  auto ref_text = read_tokenized(args.ref);
  TokenizedText joint = ref_text;
  joint.insert(joint.end(), hyp_text.begin(), hyp_text.end());
  Vocabulary vocab = Vocabulary::build(joint, 1);
  auto result = token_accuracy(encode_corpus(hyp_text, vocab, Side::kTarget),
                               encode_corpus(ref_text, vocab, Side::kTarget));
  std::printf("accuracy=%.6f tokens=%lld\n", result.accuracy,
              static_cast<long long>(result.tokens));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unsupervised word-substitution lexicon trainer"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic task");
  synth_cmd->add_option("--vocab", synth.vocab, "real word types");
  synth_cmd->add_option("--input-sentences", synth.input_sentences,
                        "sentences in the enciphered input half");
  synth_cmd->add_option("--lm-sentences", synth.lm_sentences,
                        "sentences in the LM half");
  synth_cmd->add_option("--min-len", synth.min_len, "shortest sentence");
  synth_cmd->add_option("--max-len", synth.max_len, "longest sentence");
  synth_cmd->add_option("--seed", synth.seed, "generator seed");
  synth_cmd->add_option("--ambiguity", synth.ambiguity,
                        "probability of the alternate cipher key per token");
  synth_cmd->add_option("--out", synth.out, "output prefix")->required();

  BuildTaskArgs bt;
  auto* bt_cmd = app.add_subcommand(
      "build-task", "monotone 1:1 task from bitext and alignments");
  bt_cmd->add_option("--src", bt.src, "source text")->required();
  bt_cmd->add_option("--tgt", bt.tgt, "target text")->required();
  bt_cmd->add_option("--align", bt.align, "Pharaoh i-j alignments")->required();
  bt_cmd->add_option("--split", bt.split, "input fraction of sentences");
  bt_cmd->add_option("--min-count", bt.min_count, "vocabulary threshold");
  bt_cmd->add_option("--out", bt.out, "output prefix")->required();

  TrainLmArgs tl;
  auto* tl_cmd = app.add_subcommand("train-lm", "Kneser-Ney n-gram LM -> ARPA");
  tl_cmd->add_option("--text", tl.text, "training text")->required();
  tl_cmd->add_option("--order", tl.order, "n-gram order");
  tl_cmd->add_option("--min-count", tl.min_count, "vocabulary threshold");
  tl_cmd->add_option("--discount", tl.discount,
                     "\"estimate\" or comma-separated per-order values");
  tl_cmd->add_option("--out", tl.out, "output ARPA path")->required();

  ClusterArgs cl;
  auto* cl_cmd = app.add_subcommand("cluster", "exchange word clustering");
  cl_cmd->add_option("--text", cl.text, "training text")->required();
  cl_cmd->add_option("--classes", cl.classes, "number of classes");
  cl_cmd->add_option("--sweeps", cl.sweeps, "maximum exchange sweeps");
  cl_cmd->add_option("--min-count", cl.min_count, "vocabulary threshold");
  cl_cmd->add_option("--seed", cl.seed, "seed (reserved)");
  cl_cmd->add_option("--out", cl.out, "class map TSV")->required();

  InitClassLexiconArgs icl;
  auto* icl_cmd = app.add_subcommand(
      "init-class-lexicon", "class-level EM then expansion to a word lexicon");
  icl_cmd->add_option("--input", icl.input, "source input text")->required();
  icl_cmd->add_option("--lm-text", icl.lm_text, "target LM text")->required();
  icl_cmd->add_option("--classes-src", icl.classes_src, "source class map")
      ->required();
  icl_cmd->add_option("--classes-tgt", icl.classes_tgt, "target class map")
      ->required();
  icl_cmd->add_option("--class-lm-order", icl.class_lm_order, "class LM order");
  icl_cmd->add_option("--iterations", icl.iterations, "class EM iterations");
  icl_cmd->add_option("--tau", icl.tau, "conversion threshold");
  icl_cmd->add_option("--workers", icl.workers, "worker threads");
  icl_cmd->add_option("--kernels", icl.kernels, "auto|scalar|avx2");
  icl_cmd->add_option("--out", icl.out, "word lexicon TSV")->required();

  TrainArgs tr;
  auto* tr_cmd = app.add_subcommand("train", "EM-train the sparse lexicon");
  tr_cmd->add_option("--input", tr.input, "source input text")->required();
  tr_cmd->add_option("--lm", tr.lm, "target LM (ARPA)")->required();
  tr_cmd->add_option("--init", tr.init, "\"uniform\" or a lexicon TSV");
  tr_cmd->add_option("--out", tr.out, "output lexicon TSV")->required();
  tr_cmd->add_option("--stats", tr.stats, "per-iteration stats TSV");
  tr_cmd->add_option("--config", tr.config, "key=value config file");
  tr_cmd->add_option("--reference", tr.reference,
                     "token-parallel reference for --eval-every");
  tr_cmd->add_option("--min-count", tr.min_count, "source vocab threshold");
  tr_cmd->add_option("--kernels", tr.kernels, "auto|scalar|avx2");
  tr_cmd->add_option("--iterations", tr.iterations, "EM iterations");
  tr_cmd->add_option("--tau", tr.tau, "lexicon threshold");
  tr_cmd->add_option("--lambda", tr.lambda, "lexicon interpolation weight");
  tr_cmd->add_option("--backoff", tr.backoff, "uniform|unigram|kneser-ney");
  tr_cmd->add_option("--histogram-beam", tr.histogram_beam,
                     "per-position node cap (inf disables)");
  tr_cmd->add_option("--lex-beam", tr.lex_beam, "lexical preselection size");
  tr_cmd->add_option("--lm-beam", tr.lm_beam, "LM preselection size");
  tr_cmd->add_option("--workers", tr.workers, "worker threads (0 = all)");
  tr_cmd->add_option("--checkpoint-every", tr.checkpoint_every,
                     "write the lexicon every k iterations");
  tr_cmd->add_option("--eval-every", tr.eval_every,
                     "decode + score vs --reference every k iterations");
  tr_cmd->add_option("--convergence-rel-tol", tr.convergence_rel_tol,
                     "early-stop tolerance on relative loglik change");
  tr_cmd->add_option("--seed", tr.seed, "seed (recorded in config)");

  DecodeArgs dc;
  auto* dc_cmd = app.add_subcommand("decode", "Viterbi decode source text");
  dc_cmd->add_option("--input", dc.input, "source text")->required();
  dc_cmd->add_option("--lexicon", dc.lexicon, "lexicon TSV")->required();
  dc_cmd->add_option("--lm", dc.lm, "target LM (ARPA)")->required();
  dc_cmd->add_option("--out", dc.out, "hypothesis text")->required();
  dc_cmd->add_option("--histogram-beam", dc.histogram_beam, "node cap");
  dc_cmd->add_option("--lex-beam", dc.lex_beam, "lexical preselection size");
  dc_cmd->add_option("--lm-beam", dc.lm_beam, "LM preselection size");
  dc_cmd->add_option("--lambda", dc.lambda, "lexicon interpolation weight");
  dc_cmd->add_option("--tau", dc.tau, "re-threshold the lexicon on load");
  dc_cmd->add_option("--backoff", dc.backoff, "uniform|unigram|kneser-ney");
  dc_cmd->add_option("--min-count", dc.min_count, "source vocab threshold");
  dc_cmd->add_option("--workers", dc.workers, "worker threads (0 = all)");
  dc_cmd->add_option("--kernels", dc.kernels, "auto|scalar|avx2");

  EvaluateArgs ev;
  auto* ev_cmd = app.add_subcommand("evaluate", "token accuracy");
  ev_cmd->add_option("--hyp", ev.hyp, "hypothesis text")->required();
  ev_cmd->add_option("--ref", ev.ref, "reference text")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (synth_cmd->parsed()) return run_synth(synth);
    if (bt_cmd->parsed()) return run_build_task(bt);
    if (tl_cmd->parsed()) return run_train_lm(tl);
    if (cl_cmd->parsed()) return run_cluster(cl);
    if (icl_cmd->parsed()) return run_init_class_lexicon(icl);
    if (tr_cmd->parsed()) return run_train(tr);
    if (dc_cmd->parsed()) return run_decode(dc);
    if (ev_cmd->parsed()) return run_evaluate(ev);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
