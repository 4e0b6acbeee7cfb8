// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#include <map>
#include <ostream>

#include "commands.hpp"
#include "paralab/common/error.hpp"
#include "paralab/common/format.hpp"
#include "paralab/common/hash.hpp"
#include "paralab/evaluate/metrics.hpp"
#include "paralab/evaluate/toy.hpp"
#include "paralab/minimodel/checkpoint.hpp"
#include "paralab/paragen/annotation.hpp"
#include "paralab/paragen/engine.hpp"
#include "paralab/paragen/lexicon.hpp"
#include "paralab/paragen/oracle.hpp"
#include "paralab/tensorio/corpus.hpp"

#ifndef PARALAB_DEFAULT_LEXICONS
#define PARALAB_DEFAULT_LEXICONS "data/lexicons"
#endif

namespace paralab::cli {

namespace {

using nlohmann::json;
using paragen::Words;

struct Vocabulary {
  std::map<std::string, std::int32_t> ids;
  std::vector<std::string> words;

  tensorio::TokenSequence encode(const Words& sentence) {
    tensorio::TokenSequence seq;
    for (const auto& w : sentence) {
      auto [it, fresh] = ids.try_emplace(w, static_cast<std::int32_t>(words.size()) + 4);
      if (fresh) words.push_back(w);
      seq.token_ids.push_back(it->second);
      seq.surface.push_back(w);
      seq.last_subword_mask.push_back(true);
      seq.specials_mask.push_back(false);
    }
    return seq;
  }

  std::string to_tsv() const {
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
      out += std::to_string(i + 4) + "\t" + words[i] + "\n";
    }
    return out;
  }
};

std::string render_source(const paragen::AnnotatedSentence& s) {
  std::string out;
  for (const auto& t : s.tokens) {
    out += t.text;
    if (t.space_after) out += ' ';
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

bool skippable(ErrorCode code) {
  return code == ErrorCode::UnsupportedPattern || code == ErrorCode::MissingLexiconEntry ||
         code == ErrorCode::MissingAnnotation;
}

void gen_paraphrases(const json& config, RunContext& run) {
  const auto kind = str(config, "kind");
  if (kind != "active-passive" && kind != "clause-np") {
    fail(ErrorCode::InvalidArgument, "--kind must be active-passive or clause-np");
  }
  const auto sentences = paragen::read_annotations(str(config, "annotations"));
  const auto lexicons = paragen::Lexicons::load(str(config, "lexicons"));
  auto oracle = paragen::make_oracle(str(config, "oracle"));
  const bool score = config.at("score").get<bool>();

  tensorio::ParallelCorpus corpus;
  corpus.pair_kind = kind == "active-passive" ? tensorio::PairKind::ActivePassive
                                              : tensorio::PairKind::ClauseNounPhrase;
  Vocabulary vocab;
  std::string csv = score ? "index,pattern,source,paraphrase,source_logprob,paraphrase_logprob\n"
                          : "index,pattern,source,paraphrase\n";
  std::string skipped;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const auto& s = sentences[i];
    try {
      paragen::Rewrite rewrite;
      std::string pattern = "active";
      if (corpus.pair_kind == tensorio::PairKind::ActivePassive) {
        rewrite = paragen::active_to_passive(s, lexicons, *oracle);
      } else {
        const auto match = paragen::detect_adverbial_clause(s);
        if (!match) fail(ErrorCode::UnsupportedPattern, "no adverbial clause");
        pattern = paragen::clause_kind_name(match->kind);
        rewrite = paragen::clause_to_noun_phrase(s, *match, lexicons, *oracle);
      }
      Words source;
      for (const auto& t : s.tokens) source.push_back(t.text);
      corpus.source.push_back(vocab.encode(source));
      corpus.paraphrase.push_back(vocab.encode(rewrite.words));
      csv += std::to_string(i) + "," + pattern + "," + csv_field(render_source(s)) + "," +
             csv_field(rewrite.text);
      if (score) {
        csv += "," + format_number(oracle->sentence_logprob(source)) + "," +
               format_number(oracle->sentence_logprob(rewrite.words));
      }
      csv += "\n";
    } catch (const Error& e) {
      if (!skippable(e.code())) throw;
      skipped += json{{"index", i}, {"reason", to_string(e.code())}, {"message", e.what()}}.dump() +
                 "\n";
    }
  }
  write_file(run.file("skipped.jsonl"), skipped);
  if (corpus.size() == 0) fail(ErrorCode::EmptyCorpus, "every sentence was skipped");
  tensorio::write_corpus(corpus, run.file("pairs.jsonl"));
  write_file(run.file("pairs.csv"), csv);
  write_file(run.file("vocab.tsv"), vocab.to_tsv());
  run.log << "generated " << corpus.size() << " pairs, skipped " << sentences.size() - corpus.size()
          << "\n";
}

void evaluate_outputs(const json& config, RunContext& run) {
  json metrics = json::object();
  const bool text = is_set(config, "candidates") || is_set(config, "references");
  if (text) {
    if (!is_set(config, "candidates") || !is_set(config, "references")) {
      fail(ErrorCode::Usage, "--candidates and --references go together");
    }
    const auto cands = read_lines(str(config, "candidates"));
    const auto refs = read_lines(str(config, "references"));
    if (cands.size() != refs.size()) {
      fail(ErrorCode::LengthMismatch, std::to_string(cands.size()) + " candidates but " +
                                          std::to_string(refs.size()) + " references");
    }
    std::vector<evaluate::Tokens> c, r;
    for (const auto& l : cands) c.push_back(evaluate::split_words(l));
    for (const auto& l : refs) r.push_back(evaluate::split_words(l));
    metrics["bleu"] = evaluate::bleu(c, r);
  }
  if (is_set(config, "annotations")) {
    const auto sentences = paragen::read_annotations(str(config, "annotations"));
    metrics["passive"] = evaluate::passive_score(sentences);
  }
  if (is_set(config, "model") != is_set(config, "corpus")) {
    fail(ErrorCode::Usage, "--model and --corpus go together");
  }
  if (is_set(config, "model")) {
    const auto params = minimodel::load_checkpoint(str(config, "model"));
    const auto corpus = tensorio::read_corpus(str(config, "corpus"));
    const auto from = str(config, "from");
    if (from != "source" && from != "paraphrase") {
      fail(ErrorCode::InvalidArgument, "--from must be source or paraphrase");
    }
    const auto s = evaluate::score_decodes(params, corpus, from == "paraphrase", {},
                                           static_cast<int>(config.at("max-len").get<long long>()));
    metrics["bleu-source-form"] = s.bleu_source_form;
    metrics["bleu-target-form"] = s.bleu_target_form;
    metrics["target-form-rate"] = s.target_form_rate;
    metrics["accuracy"] = s.accuracy;
  }
  if (metrics.empty()) {
    fail(ErrorCode::Usage, "nothing to evaluate: give --candidates/--references, --annotations "
                           "or --model/--corpus");
  }
  std::string csv = "metric,value\n";
  for (const auto& [k, v] : metrics.items()) {
    csv += k + "," + format_number(v.get<double>()) + "\n";
    run.log << k << " = " << format_number(v.get<double>()) << "\n";
  }
  write_file(run.file("metrics.csv"), csv);
  write_file(run.file("metrics.json"), metrics.dump(2) + "\n");
}

}  // namespace

CommandDef gen_paraphrases_command() {
  auto lexicons = path_option("lexicons", "directory of lexicon TSV files", false);
  lexicons.fallback = PARALAB_DEFAULT_LEXICONS;
  return {"gen-paraphrases",
          "generate paraphrase pairs from annotated sentences",
          {path_option("annotations", "annotated sentences (JSONL)"),
           string_option("kind", "active-passive", "active-passive or clause-np"), lexicons,
           string_option("oracle", "fallback",
                         "fallback, fallback:length, exec:CMD, unix:PATH or tcp:HOST:PORT"),
           flag_option("score", "add oracle sentence log-probability columns")},
          gen_paraphrases};
}

CommandDef evaluate_command() {
  return {"evaluate",
          "score outputs with BLEU, the passive detector or toy decoding",
          {path_option("candidates", "candidate sentences, one per line", false),
           path_option("references", "reference sentences, one per line", false),
           path_option("annotations", "annotated target sentences for passive scoring", false),
           path_option("model", "toy model checkpoint", false),
           path_option("corpus", "parallel corpus to decode", false),
           string_option("from", "source", "decode source or paraphrase inputs"),
           int_option("max-len", 32, "decode length limit")},
          evaluate_outputs};
}

}  // namespace paralab::cli
