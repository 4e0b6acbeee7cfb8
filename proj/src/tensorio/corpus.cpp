// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#include "paralab/tensorio/corpus.hpp"

#include <json.hpp>
#include <sstream>

#include "paralab/common/error.hpp"
#include "paralab/common/hash.hpp"

namespace paralab::tensorio {
namespace {

using nlohmann::json;

TokenSequence sequence_from_json(const json& j, std::size_t line) {
  TokenSequence seq;
  try {
    seq.surface = j.at("tokens").get<std::vector<std::string>>();
    seq.token_ids = j.at("ids").get<std::vector<std::int32_t>>();
    seq.last_subword_mask = j.at("last_subword").get<std::vector<bool>>();
    seq.specials_mask = j.at("specials").get<std::vector<bool>>();
  } catch (const json::exception& e) {
    fail(ErrorCode::MalformedJson,
         "line " + std::to_string(line) + ": bad token sequence: " + e.what());
  }
  try {
    seq.validate();
  } catch (const Error& e) {
    fail(e.code(), "line " + std::to_string(line) + ": " + e.what());
  }
  return seq;
}

json sequence_to_json(const TokenSequence& seq) {
  return json{{"tokens", seq.surface},
              {"ids", seq.token_ids},
              {"last_subword", seq.last_subword_mask},
              {"specials", seq.specials_mask}};
}

}  // namespace

void TokenSequence::validate() const {
  const std::size_t n = token_ids.size();
  if (surface.size() != n || last_subword_mask.size() != n || specials_mask.size() != n) {
    fail(ErrorCode::InvalidSequence, "token sequence fields differ in length");
  }
  std::ptrdiff_t last_word_token = -1;
  for (std::size_t i = 0; i < n; ++i) {
    if (specials_mask[i]) {
      if (last_subword_mask[i]) {
        fail(ErrorCode::InvalidSequence, "special token marked as a word end");
      }
      continue;
    }
    last_word_token = static_cast<std::ptrdiff_t>(i);
  }
  if (last_word_token < 0) {
    fail(ErrorCode::InvalidSequence, "sequence has no non-special token");
  }
  if (!last_subword_mask[static_cast<std::size_t>(last_word_token)]) {
    fail(ErrorCode::InvalidSequence, "final word has no closing sub-word");
  }
}

std::string_view pair_kind_name(PairKind kind) {
  switch (kind) {
    case PairKind::ActivePassive: return "active_passive";
    case PairKind::ClauseNounPhrase: return "clause_noun_phrase";
    case PairKind::Custom: return "custom";
  }
  return "custom";
}

PairKind parse_pair_kind(std::string_view name) {
  if (name == "active_passive") return PairKind::ActivePassive;
  if (name == "clause_noun_phrase") return PairKind::ClauseNounPhrase;
  if (name == "custom") return PairKind::Custom;
  fail(ErrorCode::InvalidArgument, "unknown pair kind '" + std::string(name) + "'");
}

void ParallelCorpus::validate() const {
  if (source.empty() && paraphrase.empty()) fail(ErrorCode::EmptyCorpus, "corpus is empty");
  if (source.size() != paraphrase.size()) {
    fail(ErrorCode::PairCountMismatch,
         "source has " + std::to_string(source.size()) + " sentences, paraphrase has " +
             std::to_string(paraphrase.size()));
  }
  for (const auto* refs : {&references_source, &references_target}) {
    if (refs->has_value() && (*refs)->size() != source.size()) {
      fail(ErrorCode::PairCountMismatch, "reference count differs from corpus size");
    }
  }
  for (const auto& s : source) s.validate();
  for (const auto& p : paraphrase) p.validate();
}

ParallelCorpus parse_corpus(const std::string& text) {
  ParallelCorpus corpus;
  std::vector<std::string> ref_src, ref_tgt;
  std::optional<PairKind> kind;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::size_t records = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(ErrorCode::MalformedJson, "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.is_object()) {
      fail(ErrorCode::MalformedJson, "line " + std::to_string(line_no) + ": not an object");
    }
    ++records;
    if (j.contains("src")) corpus.source.push_back(sequence_from_json(j["src"], line_no));
    if (j.contains("para")) corpus.paraphrase.push_back(sequence_from_json(j["para"], line_no));
    if (j.contains("ref_src")) ref_src.push_back(j["ref_src"].get<std::string>());
    if (j.contains("ref_tgt")) ref_tgt.push_back(j["ref_tgt"].get<std::string>());
    if (j.contains("kind")) {
      const auto line_kind = parse_pair_kind(j["kind"].get<std::string>());
      if (kind && *kind != line_kind) {
        fail(ErrorCode::MalformedJson,
             "line " + std::to_string(line_no) + ": mixed pair kinds in one corpus");
      }
      kind = line_kind;
    }
  }
  if (records == 0) fail(ErrorCode::EmptyCorpus, "corpus is empty");
  if (!ref_src.empty()) corpus.references_source = std::move(ref_src);
  if (!ref_tgt.empty()) corpus.references_target = std::move(ref_tgt);
  corpus.pair_kind = kind.value_or(PairKind::Custom);
  corpus.validate();
  return corpus;
}

ParallelCorpus read_corpus(const std::filesystem::path& path) {
  return parse_corpus(read_file(path));
}

std::string format_corpus(const ParallelCorpus& corpus) {
  corpus.validate();
  std::string out;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    json j{{"src", sequence_to_json(corpus.source[i])},
           {"para", sequence_to_json(corpus.paraphrase[i])}};
    if (corpus.references_source) j["ref_src"] = (*corpus.references_source)[i];
    if (corpus.references_target) j["ref_tgt"] = (*corpus.references_target)[i];
    j["kind"] = pair_kind_name(corpus.pair_kind);
    out += j.dump();
    out += '\n';
  }
  return out;
}

void write_corpus(const ParallelCorpus& corpus, const std::filesystem::path& path) {
  write_file(path, format_corpus(corpus));
}

std::string corpus_hash(const std::filesystem::path& path) { return git_blob_hash_file(path); }

}  // namespace paralab::tensorio
