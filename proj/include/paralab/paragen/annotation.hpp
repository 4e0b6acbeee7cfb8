// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace paralab::paragen {

struct AnnotatedToken {
  std::string text;
  std::string lemma;
  std::string pos;  // coarse (universal) tag
  std::string tag;  // fine tag of the annotation source (PTB, STTS, ...)
  int head = -1;    // index of the head token; -1 marks the root
  std::string dep;
  std::map<std::string, std::string> morph;
  bool space_after = true;
};

struct SrlArgument {
  std::string label;  // e.g. ARG0, ARGM-CAU
  int start = 0;      // token span [start, end)
  int end = 0;
};

struct SrlFrame {
  int predicate = 0;
  std::vector<SrlArgument> args;
};

/// One parsed sentence. JSONL schema, one object per line:
///   {"tokens": [{"text": "She", "lemma": "she", "pos": "PRON", "tag": "PRP",
///                "head": 1, "dep": "nsubj", "morph": {"Case": "Nom"},
///                "space_after": true}, ...],
///    "srl": [{"predicate": 1, "args": [{"label": "ARG0", "start": 0, "end": 1}]}]}
/// "morph", "space_after" and "srl" are optional; the root has "head": -1.
struct AnnotatedSentence {
  std::vector<AnnotatedToken> tokens;
  std::vector<SrlFrame> srl_frames;

  int size() const { return static_cast<int>(tokens.size()); }
  /// Index of the root token.
  int root() const;
  /// Children of `head` in sentence order.
  std::vector<int> children(int head) const;
  /// First child of `head` with this dependency label, or -1.
  int child(int head, std::string_view dep) const;
  /// Smallest contiguous span [first, last] covering the subtree of `i`.
  std::pair<int, int> subtree_span(int i) const;

  /// Throws Error(MalformedTree) unless heads form one rooted tree and SRL
  /// spans lie within the sentence.
  void validate() const;
};

/// Throws Error(MissingAnnotation) when a token lacks a required field and
/// Error(MalformedJson) for unparsable text.
AnnotatedSentence annotation_from_json(const nlohmann::json& j);
nlohmann::json annotation_to_json(const AnnotatedSentence& s);
std::vector<AnnotatedSentence> parse_annotations(const std::string& jsonl);
std::vector<AnnotatedSentence> read_annotations(const std::filesystem::path& path);
std::string format_annotations(const std::vector<AnnotatedSentence>& sentences);

}  // namespace paralab::paragen
