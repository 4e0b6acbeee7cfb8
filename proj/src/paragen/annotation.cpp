// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#include "paralab/paragen/annotation.hpp"

#include <sstream>

#include "paralab/common/error.hpp"
#include "paralab/common/hash.hpp"

namespace paralab::paragen {

using nlohmann::json;

int AnnotatedSentence::root() const {
  for (int i = 0; i < size(); ++i) {
    if (tokens[static_cast<size_t>(i)].head < 0) return i;
  }
  fail(ErrorCode::MalformedTree, "sentence has no root");
}

std::vector<int> AnnotatedSentence::children(int head) const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i) {
    if (tokens[static_cast<size_t>(i)].head == head && i != head) out.push_back(i);
  }
  return out;
}

int AnnotatedSentence::child(int head, std::string_view dep) const {
  for (int c : children(head)) {
    if (tokens[static_cast<size_t>(c)].dep == dep) return c;
  }
  return -1;
}

std::pair<int, int> AnnotatedSentence::subtree_span(int i) const {
  int lo = i, hi = i;
  for (int c : children(i)) {
    auto [clo, chi] = subtree_span(c);
    lo = std::min(lo, clo);
    hi = std::max(hi, chi);
  }
  return {lo, hi};
}

void AnnotatedSentence::validate() const {
  if (tokens.empty()) fail(ErrorCode::MalformedTree, "sentence has no tokens");
  int roots = 0;
  for (int i = 0; i < size(); ++i) {
    const int h = tokens[static_cast<size_t>(i)].head;
    if (h < 0) {
      ++roots;
    } else if (h >= size() || h == i) {
      fail(ErrorCode::MalformedTree, "token " + std::to_string(i) + " has invalid head " + std::to_string(h));
    }
  }
  if (roots != 1) fail(ErrorCode::MalformedTree, "expected one root, found " + std::to_string(roots));
  for (int i = 0; i < size(); ++i) {
    int cur = i;
    for (int steps = 0; tokens[static_cast<size_t>(cur)].head >= 0; ++steps) {
      if (steps > size()) fail(ErrorCode::MalformedTree, "head cycle through token " + std::to_string(i));
      cur = tokens[static_cast<size_t>(cur)].head;
    }
  }
  for (const auto& f : srl_frames) {
    if (f.predicate < 0 || f.predicate >= size()) fail(ErrorCode::MalformedTree, "SRL predicate out of range");
    for (const auto& a : f.args) {
      if (a.start < 0 || a.end > size() || a.start >= a.end) {
        fail(ErrorCode::MalformedTree, "SRL span " + a.label + " out of range");
      }
    }
  }
}

AnnotatedSentence annotation_from_json(const json& j) {
  if (!j.is_object() || !j.contains("tokens") || !j["tokens"].is_array()) {
    fail(ErrorCode::MissingAnnotation, "record has no token list");
  }
  AnnotatedSentence s;
  for (const auto& t : j["tokens"]) {
    AnnotatedToken tok;
    for (const char* key : {"text", "lemma", "pos", "tag", "head", "dep"}) {
      if (!t.contains(key)) {
        fail(ErrorCode::MissingAnnotation,
             "token " + std::to_string(s.tokens.size()) + " lacks \"" + key + "\"");
      }
    }
    try {
      tok.text = t["text"].get<std::string>();
      tok.lemma = t["lemma"].get<std::string>();
      tok.pos = t["pos"].get<std::string>();
      tok.tag = t["tag"].get<std::string>();
      tok.head = t["head"].get<int>();
      tok.dep = t["dep"].get<std::string>();
      if (t.contains("morph")) tok.morph = t["morph"].get<std::map<std::string, std::string>>();
      if (t.contains("space_after")) tok.space_after = t["space_after"].get<bool>();
    } catch (const json::exception& e) {
      fail(ErrorCode::MalformedJson, std::string("bad token field: ") + e.what());
    }
    s.tokens.push_back(std::move(tok));
  }
  if (j.contains("srl")) {
    try {
      for (const auto& f : j["srl"]) {
        SrlFrame frame;
        frame.predicate = f.at("predicate").get<int>();
        for (const auto& a : f.at("args")) {
          frame.args.push_back({a.at("label").get<std::string>(), a.at("start").get<int>(),
                                a.at("end").get<int>()});
        }
        s.srl_frames.push_back(std::move(frame));
      }
    } catch (const json::exception& e) {
      fail(ErrorCode::MalformedJson, std::string("bad SRL frame: ") + e.what());
    }
  }
  s.validate();
  return s;
}

json annotation_to_json(const AnnotatedSentence& s) {
  json tokens = json::array();
  for (const auto& t : s.tokens) {
    json jt{{"text", t.text}, {"lemma", t.lemma}, {"pos", t.pos},
            {"tag", t.tag},   {"head", t.head},   {"dep", t.dep}};
    if (!t.morph.empty()) jt["morph"] = t.morph;
    if (!t.space_after) jt["space_after"] = false;
    tokens.push_back(std::move(jt));
  }
  json out{{"tokens", std::move(tokens)}};
  if (!s.srl_frames.empty()) {
    json frames = json::array();
    for (const auto& f : s.srl_frames) {
      json args = json::array();
      for (const auto& a : f.args) args.push_back({{"label", a.label}, {"start", a.start}, {"end", a.end}});
      frames.push_back({{"predicate", f.predicate}, {"args", std::move(args)}});
    }
    out["srl"] = std::move(frames);
  }
  return out;
}

std::vector<AnnotatedSentence> parse_annotations(const std::string& jsonl) {
  std::vector<AnnotatedSentence> out;
  std::istringstream in(jsonl);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) fail(ErrorCode::MalformedJson, "line " + std::to_string(line_no) + ": not JSON");
    try {
      out.push_back(annotation_from_json(j));
    } catch (const Error& e) {
      fail(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<AnnotatedSentence> read_annotations(const std::filesystem::path& path) {
  return parse_annotations(read_file(path));
}

std::string format_annotations(const std::vector<AnnotatedSentence>& sentences) {
  std::string out;
  for (const auto& s : sentences) out += annotation_to_json(s).dump() + "\n";
  return out;
}

}  // namespace paralab::paragen
