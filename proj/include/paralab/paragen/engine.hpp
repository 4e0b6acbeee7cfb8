// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "paralab/paragen/annotation.hpp"
#include "paralab/paragen/lexicon.hpp"
#include "paralab/paragen/oracle.hpp"

namespace paralab::paragen {

using Words = std::vector<std::string>;

/// Inserts the oracle's pick among `candidates` before `tokens[position]`.
/// A single candidate is inserted without consulting the oracle. Throws
/// Error(InvalidArgument) for no candidates or a position past the end and
/// Error(Oracle) when the oracle answers outside the candidate set.
Words word_insertion(const Words& tokens, std::size_t position,
                     std::span<const std::string> candidates, Oracle& oracle);

/// word_insertion, kept only when the oracle scores the inserted sentence
/// strictly higher; ties return `tokens` unchanged.
Words optional_word_insertion(const Words& tokens, std::size_t position,
                              std::span<const std::string> candidates, Oracle& oracle);

/// Noun for a verb lemma: the AMR table first, then the oracle's choice
/// between the Nomlex noun and the present participle (whichever exist),
/// scored as an insertion at `position` of `context`.
std::optional<std::string> noun_derivation(std::string_view lemma, const Lexicons& lexicons,
                                           Oracle& oracle, std::span<const std::string> context = {},
                                           std::size_t position = 0);

struct Rewrite {
  Words words;
  std::string text;
};

using Span = std::pair<int, int>;  // inclusive token range

struct ActiveMatch {
  int root = -1;
  int subject = -1;  // head of the subject phrase
  int object = -1;   // head of the direct object phrase
  Span subject_span;
  Span object_span;
  std::vector<int> auxiliaries;
  int negation = -1;
  int particle = -1;
  int dative = -1;
};

/// A declarative clause whose root verb has a nominal subject before it and
/// a direct object after it. None for questions, coordination, a root in
/// past-participle form, passive markers or a "to" auxiliary on the root.
/// Throws Error(MalformedTree) for an invalid parse.
std::optional<ActiveMatch> detect_active(const AnnotatedSentence& s);

/// Active to passive voice. Throws Error(UnsupportedPattern) when
/// detect_active finds nothing or the verb group cannot be rebuilt, and
/// Error(MissingLexiconEntry) when the root has no past participle.
Rewrite active_to_passive(const AnnotatedSentence& s, const Lexicons& lexicons, Oracle& oracle);

enum class ClauseKind { CausePossessive, CauseNonPossessive, Temporal, Purpose };

std::string_view clause_kind_name(ClauseKind kind);

struct ClauseMatch {
  ClauseKind kind = ClauseKind::Temporal;
  int root = -1;    // clause verb
  int marker = -1;  // "because", a temporal marker, "when" or "to"
  Span span;
};

/// First adverbial clause (in sentence order) matching a kind. When the
/// sentence carries SRL frames, an argument with the kind's label (ARGM-CAU,
/// ARGM-TMP, ARGM-PRP or ARGM-PNC) must cover exactly the clause.
std::optional<ClauseMatch> detect_adverbial_clause(const AnnotatedSentence& s);

/// Adverbial clause to noun phrase. Throws Error(MissingLexiconEntry) when
/// the clause verb has no noun form and Error(UnsupportedPattern) for a
/// negated clause outside the possessive cause kind.
Rewrite clause_to_noun_phrase(const AnnotatedSentence& s, const ClauseMatch& match,
                              const Lexicons& lexicons, Oracle& oracle);

}  // namespace paralab::paragen
