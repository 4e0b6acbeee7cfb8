// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace paralab::tensorio {

/// One tokenized sentence. Token ids and sub-word boundaries arrive
/// pre-computed; nothing here tokenizes.
struct TokenSequence {
  std::vector<std::int32_t> token_ids;
  std::vector<std::string> surface;
  std::vector<bool> last_subword_mask;  // true on the final piece of each word
  std::vector<bool> specials_mask;      // true on BOS/EOS/pad

  std::size_t size() const { return token_ids.size(); }

  /// Throws Error(InvalidSequence) when the invariants do not hold: equal
  /// list lengths, at least one non-special token, specials never marked as
  /// word ends, and the last non-special token closing a word.
  void validate() const;
};

enum class PairKind { ActivePassive, ClauseNounPhrase, Custom };

std::string_view pair_kind_name(PairKind kind);
PairKind parse_pair_kind(std::string_view name);

/// Aligned sentence sets S (source) and P (paraphrase); pair i is
/// (source[i], paraphrase[i]). Reference i translates the i-th sentence of
/// the matching side.
struct ParallelCorpus {
  std::vector<TokenSequence> source;
  std::vector<TokenSequence> paraphrase;
  std::optional<std::vector<std::string>> references_source;
  std::optional<std::vector<std::string>> references_target;
  PairKind pair_kind = PairKind::Custom;

  std::size_t size() const { return source.size(); }
  void validate() const;
};

/// Reads the JSON-lines corpus format, one pair per line:
///   {"src": {"tokens": [...], "ids": [...], "last_subword": [...],
///            "specials": [...]},
///    "para": {...}, "ref_src": "...", "ref_tgt": "...",
///    "kind": "active_passive"}
/// "kind", "ref_src" and "ref_tgt" are optional. A line may omit "src" or
/// "para"; the per-side counts must still agree at the end of the file.
ParallelCorpus read_corpus(const std::filesystem::path& path);
ParallelCorpus parse_corpus(const std::string& text);
std::string format_corpus(const ParallelCorpus& corpus);
void write_corpus(const ParallelCorpus& corpus, const std::filesystem::path& path);

/// Content hash recorded in dump metadata: git blob SHA-1 of the corpus file.
std::string corpus_hash(const std::filesystem::path& path);

}  // namespace paralab::tensorio
