// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace paralab::paragen {

struct VerbForms {
  std::string past;
  std::string past_participle;
  std::string present_participle;
  std::string third_singular;
};

struct PronounForms {
  std::string subject;
  std::string object;
  std::string possessive;
};

/// Word tables loaded from tab-separated files; '#' starts a comment line.
///   amr_morph.tsv   verb  noun
///   nomlex.tsv      verb  noun
///   verb_forms.tsv  lemma past past_participle present_participle third_singular
///   pronouns.tsv    subject object possessive
struct Lexicons {
  std::map<std::string, std::string, std::less<>> amr_morph;
  std::map<std::string, std::string, std::less<>> nomlex;
  std::map<std::string, VerbForms, std::less<>> verb_forms;
  std::vector<PronounForms> pronouns;

  /// Throws Error(Io) for a missing file and Error(MalformedLexicon) for a
  /// line with the wrong number of columns or a duplicate key.
  static Lexicons load(const std::filesystem::path& dir);
  static Lexicons parse(std::string_view amr_morph, std::string_view nomlex,
                        std::string_view verb_forms, std::string_view pronouns);

  /// Lookups are case-insensitive; the result is lower case.
  const VerbForms* verb(std::string_view lemma) const;
  std::optional<std::string> object_form(std::string_view word) const;
  std::optional<std::string> subject_form(std::string_view word) const;
  std::optional<std::string> possessive_form(std::string_view word) const;
};

/// Insertion candidate sets, in their published order (duplicates kept).
const std::vector<std::string>& temporal_prepositions();
const std::vector<std::string>& general_prepositions();

std::string to_lower(std::string_view s);

}  // namespace paralab::paragen
