// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#include "paralab/paragen/lexicon.hpp"

#include <cctype>
#include <sstream>

#include "paralab/common/error.hpp"
#include "paralab/common/hash.hpp"

namespace paralab::paragen {

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

namespace {

std::vector<std::vector<std::string>> read_rows(std::string_view text, std::size_t columns,
                                                std::string_view name) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::size_t start = 0;
    for (;;) {
      const auto tab = line.find('\t', start);
      cols.push_back(to_lower(line.substr(start, tab - start)));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (cols.size() != columns) {
      fail(ErrorCode::MalformedLexicon, std::string(name) + ":" + std::to_string(lineno) +
                                            ": expected " + std::to_string(columns) + " columns");
    }
    for (const auto& c : cols) {
      if (c.empty()) {
        fail(ErrorCode::MalformedLexicon,
             std::string(name) + ":" + std::to_string(lineno) + ": empty column");
      }
    }
    rows.push_back(std::move(cols));
  }
  return rows;
}

template <class Map, class Value>
void insert_unique(Map& map, const std::string& key, Value value, std::string_view name) {
  if (!map.emplace(key, std::move(value)).second) {
    fail(ErrorCode::MalformedLexicon, std::string(name) + ": duplicate entry " + key);
  }
}

}  // namespace

Lexicons Lexicons::parse(std::string_view amr_morph, std::string_view nomlex,
                         std::string_view verb_forms, std::string_view pronouns) {
  Lexicons lex;
  for (auto& r : read_rows(amr_morph, 2, "amr_morph")) {
    insert_unique(lex.amr_morph, r[0], r[1], "amr_morph");
  }
  for (auto& r : read_rows(nomlex, 2, "nomlex")) insert_unique(lex.nomlex, r[0], r[1], "nomlex");
  for (auto& r : read_rows(verb_forms, 5, "verb_forms")) {
    insert_unique(lex.verb_forms, r[0], VerbForms{r[1], r[2], r[3], r[4]}, "verb_forms");
  }
  for (auto& r : read_rows(pronouns, 3, "pronouns")) {
    lex.pronouns.push_back({r[0], r[1], r[2]});
  }
  return lex;
}

Lexicons Lexicons::load(const std::filesystem::path& dir) {
  return parse(read_file(dir / "amr_morph.tsv"), read_file(dir / "nomlex.tsv"),
               read_file(dir / "verb_forms.tsv"), read_file(dir / "pronouns.tsv"));
}

const VerbForms* Lexicons::verb(std::string_view lemma) const {
  const auto it = verb_forms.find(to_lower(lemma));
  return it == verb_forms.end() ? nullptr : &it->second;
}

std::optional<std::string> Lexicons::object_form(std::string_view word) const {
  const auto w = to_lower(word);
  for (const auto& p : pronouns) {
    if (p.subject == w || p.object == w) return p.object;
  }
  return std::nullopt;
}

std::optional<std::string> Lexicons::subject_form(std::string_view word) const {
  const auto w = to_lower(word);
  for (const auto& p : pronouns) {
    if (p.object == w || p.subject == w) return p.subject;
  }
  return std::nullopt;
}

std::optional<std::string> Lexicons::possessive_form(std::string_view word) const {
  const auto w = to_lower(word);
  for (const auto& p : pronouns) {
    if (p.subject == w || p.object == w) return p.possessive;
  }
  return std::nullopt;
}

const std::vector<std::string>& temporal_prepositions() {
  static const std::vector<std::string> set = {"as",   "aboard", "along", "around", "at",
                                               "during", "upon", "with",  "without"};
  return set;
}

const std::vector<std::string>& general_prepositions() {
  static const std::vector<std::string> set = {
      "as",       "aboard",    "about",   "above",   "across",  "after",  "against",
      "along",    "around",    "at",      "before",  "behind",  "below",  "beneath",
      "beside",   "between",   "beyond",  "but",     "by",      "down",   "during",
      "except",   "following", "for",     "from",    "in",      "inside", "into",
      "like",     "minus",     "minus",   "near",    "next",    "of",     "off",
      "on",       "onto",      "onto",    "opposite", "out",    "outside", "over",
      "past",     "plus",      "round",   "since",   "since",   "than",   "through",
      "to",       "toward",    "under",   "underneath", "unlike", "until", "up",
      "upon",     "with",      "without"};
  return set;
}

}  // namespace paralab::paragen
