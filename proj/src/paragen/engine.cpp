// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#include "paralab/paragen/engine.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "paralab/common/error.hpp"

namespace paralab::paragen {

Words word_insertion(const Words& tokens, std::size_t position,
                     std::span<const std::string> candidates, Oracle& oracle) {
  if (candidates.empty()) fail(ErrorCode::InvalidArgument, "word insertion needs candidates");
  if (position > tokens.size()) fail(ErrorCode::InvalidArgument, "insertion position past the end");
  std::string choice = candidates.front();
  if (candidates.size() > 1) {
    choice = oracle.mask_fill_best(tokens, position, candidates);
    if (std::find(candidates.begin(), candidates.end(), choice) == candidates.end()) {
      fail(ErrorCode::Oracle, "oracle chose a non-candidate: " + choice);
    }
  }
  Words out = tokens;
  out.insert(out.begin() + static_cast<std::ptrdiff_t>(position), std::move(choice));
  return out;
}

Words optional_word_insertion(const Words& tokens, std::size_t position,
                              std::span<const std::string> candidates, Oracle& oracle) {
  Words inserted = word_insertion(tokens, position, candidates, oracle);
  return oracle.sentence_logprob(inserted) > oracle.sentence_logprob(tokens) ? inserted : tokens;
}

std::optional<std::string> noun_derivation(std::string_view lemma, const Lexicons& lexicons,
                                           Oracle& oracle, std::span<const std::string> context,
                                           std::size_t position) {
  const std::string l = to_lower(lemma);
  if (auto it = lexicons.amr_morph.find(l); it != lexicons.amr_morph.end()) return it->second;
  std::vector<std::string> options;
  if (auto it = lexicons.nomlex.find(l); it != lexicons.nomlex.end()) options.push_back(it->second);
  if (const auto* v = lexicons.verb(l)) options.push_back(v->present_participle);
  if (options.empty()) return std::nullopt;
  if (options.size() == 1) return options.front();
  const Words ctx(context.begin(), context.end());
  return word_insertion(ctx, std::min(position, ctx.size()), options, oracle)[std::min(position, ctx.size())];
}

namespace {

struct Out {
  std::string text;
  int origin = -1;  // source token index, -1 for introduced words
};

bool attaches_left(std::string_view w) {
  if (w.empty()) return false;
  if (w == "n't" || w[0] == '\'') return true;
  return w.size() == 1 && std::string_view(".,;:!?)%").find(w[0]) != std::string_view::npos;
}

Words texts(const std::vector<Out>& out) {
  Words w;
  for (const auto& o : out) w.push_back(o.text);
  return w;
}

Rewrite finish(const AnnotatedSentence& s, std::vector<Out> out) {
  for (std::size_t k = 0; k < out.size(); ++k) {
    auto& o = out[k];
    if (k == 0) {
      if (!o.text.empty()) o.text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(o.text[0])));
    } else if (o.origin == 0) {
      const auto& t = s.tokens[0];
      if (t.tag != "NNP" && t.tag != "NNPS" && t.pos != "PROPN" && o.text != "I") {
        o.text[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(o.text[0])));
      }
    }
  }
  Rewrite r;
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (k > 0) {
      const auto& prev = out[k - 1];
      const bool adjacent = prev.origin >= 0 && out[k].origin == prev.origin + 1;
      const bool space = adjacent ? s.tokens[static_cast<std::size_t>(prev.origin)].space_after
                                  : !attaches_left(out[k].text);
      if (space) r.text += ' ';
    }
    r.text += out[k].text;
    r.words.push_back(out[k].text);
  }
  return r;
}

// Runs an insertion over the current words and mirrors it into `out`.
bool insert_into(std::vector<Out>& out, std::size_t position, std::span<const std::string> cands,
                 Oracle& oracle, bool optional) {
  const Words before = texts(out);
  const Words after = optional ? optional_word_insertion(before, position, cands, oracle)
                               : word_insertion(before, position, cands, oracle);
  if (after.size() == before.size()) return false;
  out.insert(out.begin() + static_cast<std::ptrdiff_t>(position), Out{after[position], -1});
  return true;
}

std::string lower_lemma(const AnnotatedToken& t) { return to_lower(t.lemma); }

bool in_span(int i, Span s) { return i >= s.first && i <= s.second; }

std::string cased_pronoun(std::string form) { return form == "i" ? "I" : form; }

// Words of a phrase, with a lone personal pronoun put into the given case.
std::vector<Out> phrase(const AnnotatedSentence& s, Span span, int head, const Lexicons& lex,
                        bool subject_case) {
  std::vector<Out> out;
  const auto& h = s.tokens[static_cast<std::size_t>(head)];
  if (span.first == span.second && h.tag == "PRP") {
    const auto form = subject_case ? lex.subject_form(h.text) : lex.object_form(h.text);
    if (form) return {Out{cased_pronoun(*form), head}};
  }
  for (int i = span.first; i <= span.second; ++i) {
    out.push_back({s.tokens[static_cast<std::size_t>(i)].text, i});
  }
  return out;
}

struct Agreement {
  bool plural = false;
  bool first_person = false;
};

Agreement agreement(const AnnotatedSentence& s, int head, const Lexicons& lex) {
  const auto& t = s.tokens[static_cast<std::size_t>(head)];
  Agreement a;
  if (t.tag == "PRP") {
    const auto form = lex.subject_form(t.text).value_or(to_lower(t.text));
    a.first_person = form == "i";
    a.plural = form == "we" || form == "they" || form == "you";
    return a;
  }
  const auto num = t.morph.find("Number");
  a.plural = t.tag == "NNS" || t.tag == "NNPS" || (num != t.morph.end() && num->second == "Plur");
  return a;
}

std::string be_form(Agreement a, bool past) {
  if (past) return a.plural ? "were" : "was";
  if (a.first_person) return "am";
  return a.plural ? "are" : "is";
}

std::string have_form(Agreement a, bool past) {
  if (past) return "had";
  return a.plural || a.first_person ? "have" : "has";
}

std::string convert_modal(const std::string& lemma) {
  if (lemma == "can") return "could";
  if (lemma == "may") return "might";
  if (lemma == "shall") return "should";
  return lemma;
}

}  // namespace

std::optional<ActiveMatch> detect_active(const AnnotatedSentence& s) {
  s.validate();
  const int r = s.root();
  const auto& root = s.tokens[static_cast<std::size_t>(r)];
  if (root.tag.rfind("VB", 0) != 0 || root.tag == "VBN") return std::nullopt;
  for (const auto& t : s.tokens) {
    if (t.text == "?" || t.dep == "conj" || t.dep == "cc" || t.dep == "nsubjpass" ||
        t.dep == "auxpass") {
      return std::nullopt;
    }
  }
  ActiveMatch m;
  m.root = r;
  for (int c : s.children(r)) {
    const auto& t = s.tokens[static_cast<std::size_t>(c)];
    if (t.tag == "TO") return std::nullopt;
    if (t.dep == "nsubj" && m.subject < 0) m.subject = c;
    else if ((t.dep == "dobj" || t.dep == "obj") && m.object < 0) m.object = c;
    else if (t.dep == "aux") m.auxiliaries.push_back(c);
    else if (t.dep == "neg") m.negation = c;
    else if (t.dep == "prt" || t.dep == "compound:prt") m.particle = c;
    else if (t.dep == "dative" || t.dep == "iobj") m.dative = c;
  }
  if (m.subject < 0 || m.object < 0) return std::nullopt;
  m.subject_span = s.subtree_span(m.subject);
  m.object_span = s.subtree_span(m.object);
  if (m.subject_span.second >= r || m.object_span.first <= r) return std::nullopt;
  return m;
}

Rewrite active_to_passive(const AnnotatedSentence& s, const Lexicons& lexicons, Oracle& oracle) {
  const auto m = detect_active(s);
  if (!m) fail(ErrorCode::UnsupportedPattern, "no active clause with subject and direct object");
  const auto& root = s.tokens[static_cast<std::size_t>(m->root)];

  std::vector<std::string> modals;
  int have_aux = -1, be_aux = -1, do_aux = -1;
  for (int a : m->auxiliaries) {
    const auto& t = s.tokens[static_cast<std::size_t>(a)];
    const auto lemma = lower_lemma(t);
    if (t.tag == "MD") modals.push_back(convert_modal(lemma));
    else if (lemma == "have") have_aux = a;
    else if (lemma == "be") be_aux = a;
    else if (lemma == "do") do_aux = a;
    else fail(ErrorCode::UnsupportedPattern, "unhandled auxiliary: " + t.text);
  }
  const bool gerund = root.tag == "VBG";
  if (gerund && be_aux < 0) fail(ErrorCode::UnsupportedPattern, "gerund root without auxiliary");
  const int finite = have_aux >= 0 ? have_aux : be_aux >= 0 ? be_aux : do_aux >= 0 ? do_aux : m->root;
  const bool past = s.tokens[static_cast<std::size_t>(finite)].tag == "VBD";
  const Agreement agree = agreement(s, m->object, lexicons);

  Words group = modals;
  if (!modals.empty()) {
    if (have_aux >= 0) group.insert(group.end(), {"have", "been"});
    else if (gerund) group.insert(group.end(), {"be", "being"});
    else group.push_back("be");
  } else if (have_aux >= 0) {
    group.insert(group.end(), {have_form(agree, past), "been"});
  } else if (gerund) {
    group.insert(group.end(), {be_form(agree, past), "being"});
  } else {
    group.push_back(be_form(agree, past));
  }
  if (m->negation >= 0) group.insert(group.begin() + 1, "not");
  const auto* forms = lexicons.verb(root.lemma);
  if (forms == nullptr) fail(ErrorCode::MissingLexiconEntry, "no verb forms for: " + root.lemma);
  group.push_back(forms->past_participle);
  if (m->particle >= 0) group.push_back(to_lower(s.tokens[static_cast<std::size_t>(m->particle)].text));

  std::set<int> verb_tokens(m->auxiliaries.begin(), m->auxiliaries.end());
  verb_tokens.insert(m->root);
  if (m->negation >= 0) verb_tokens.insert(m->negation);
  if (m->particle >= 0) verb_tokens.insert(m->particle);
  const int first_verb = *verb_tokens.begin();
  const Span dative_span = m->dative >= 0 ? s.subtree_span(m->dative) : Span{-1, -2};

  std::vector<Out> out;
  std::size_t dative_at = 0;
  for (int i = 0; i < s.size(); ++i) {
    if (i == m->subject_span.first) {
      const auto p = phrase(s, m->object_span, m->object, lexicons, true);
      out.insert(out.end(), p.begin(), p.end());
      i = m->subject_span.second;
    } else if (i == m->object_span.first) {
      out.push_back({"by", -1});
      const auto p = phrase(s, m->subject_span, m->subject, lexicons, false);
      out.insert(out.end(), p.begin(), p.end());
      i = m->object_span.second;
    } else if (verb_tokens.count(i) != 0) {
      if (i == first_verb) {
        for (const auto& w : group) out.push_back({w, -1});
      }
    } else {
      if (i == dative_span.first) dative_at = out.size();
      out.push_back({s.tokens[static_cast<std::size_t>(i)].text, i});
    }
  }
  if (m->dative >= 0) insert_into(out, dative_at, general_prepositions(), oracle, true);
  return finish(s, std::move(out));
}

std::string_view clause_kind_name(ClauseKind kind) {
  switch (kind) {
    case ClauseKind::CausePossessive: return "cause-possessive";
    case ClauseKind::CauseNonPossessive: return "cause-non-possessive";
    case ClauseKind::Temporal: return "temporal";
    case ClauseKind::Purpose: return "purpose";
  }
  return "unknown";
}

namespace {

bool srl_confirms(const AnnotatedSentence& s, ClauseKind kind, Span span) {
  if (s.srl_frames.empty()) return true;
  for (const auto& f : s.srl_frames) {
    for (const auto& a : f.args) {
      if (a.start != span.first || a.end != span.second + 1) continue;
      switch (kind) {
        case ClauseKind::CausePossessive:
        case ClauseKind::CauseNonPossessive:
          if (a.label == "ARGM-CAU") return true;
          break;
        case ClauseKind::Temporal:
          if (a.label == "ARGM-TMP") return true;
          break;
        case ClauseKind::Purpose:
          if (a.label == "ARGM-PRP" || a.label == "ARGM-PNC") return true;
          break;
      }
    }
  }
  return false;
}

bool self_pronoun(std::string_view w) {
  const auto l = to_lower(w);
  return (l.size() > 4 && l.ends_with("self")) || (l.size() > 6 && l.ends_with("selves"));
}

}  // namespace

std::optional<ClauseMatch> detect_adverbial_clause(const AnnotatedSentence& s) {
  s.validate();
  for (int c = 0; c < s.size(); ++c) {
    if (s.tokens[static_cast<std::size_t>(c)].dep != "advcl") continue;
    ClauseMatch m;
    m.root = c;
    m.span = s.subtree_span(c);
    int mark = -1, when = -1, to = -1;
    for (int k : s.children(c)) {
      const auto& t = s.tokens[static_cast<std::size_t>(k)];
      if (t.dep == "mark" && mark < 0) mark = k;
      if (t.dep == "advmod" && to_lower(t.text) == "when") when = k;
      if (t.tag == "TO") to = k;
    }
    const auto verb = lower_lemma(s.tokens[static_cast<std::size_t>(c)]);
    const auto marker = mark >= 0 ? lower_lemma(s.tokens[static_cast<std::size_t>(mark)]) : "";
    if (marker == "because") {
      if (verb == "have") m.kind = ClauseKind::CausePossessive;
      else if (verb == "be" || verb == "do" || verb == "can") continue;
      else m.kind = ClauseKind::CauseNonPossessive;
      m.marker = mark;
    } else if (marker == "as" || marker == "before" || marker == "after" || marker == "until" ||
               marker == "while") {
      m.kind = ClauseKind::Temporal;
      m.marker = mark;
    } else if (when >= 0) {
      m.kind = ClauseKind::Temporal;
      m.marker = when;
    } else if (to >= 0) {
      m.kind = ClauseKind::Purpose;
      m.marker = to;
    } else {
      continue;
    }
    if (srl_confirms(s, m.kind, m.span)) return m;
  }
  return std::nullopt;
}

Rewrite clause_to_noun_phrase(const AnnotatedSentence& s, const ClauseMatch& match,
                              const Lexicons& lexicons, Oracle& oracle) {
  const int r = match.root;
  int subject = -1, object = -1, negation = -1;
  std::set<int> dropped;
  for (int c : s.children(r)) {
    const auto& t = s.tokens[static_cast<std::size_t>(c)];
    if (c == match.marker) continue;
    if (t.dep == "nsubj" && subject < 0) subject = c;
    else if ((t.dep == "dobj" || t.dep == "obj") && object < 0) object = c;
    else if (t.dep == "neg") negation = c;
    else if (t.dep == "aux" || t.dep == "auxpass") dropped.insert(c);
  }
  const bool possessive = match.kind == ClauseKind::CausePossessive;
  if (negation >= 0 && !possessive) {
    fail(ErrorCode::UnsupportedPattern, "negated " + std::string(clause_kind_name(match.kind)) + " clause");
  }
  if (negation >= 0) dropped.insert(negation);

  std::optional<std::string> noun;
  if (possessive) {
    dropped.insert(r);
    if (object >= 0) {
      for (int c : s.children(object)) {
        if (s.tokens[static_cast<std::size_t>(c)].dep == "det") dropped.insert(c);
      }
    }
  } else {
    Words context;
    for (int i = 0; i < s.size(); ++i) {
      if (i != r) context.push_back(s.tokens[static_cast<std::size_t>(i)].text);
    }
    const auto& verb = s.tokens[static_cast<std::size_t>(r)];
    noun = noun_derivation(verb.lemma, lexicons, oracle, context, static_cast<std::size_t>(r));
    if (!noun) fail(ErrorCode::MissingLexiconEntry, "no noun form for: " + verb.lemma);
  }
  const bool self_object = match.kind == ClauseKind::CauseNonPossessive && object >= 0 &&
                           s.subtree_span(object).first == s.subtree_span(object).second &&
                           self_pronoun(s.tokens[static_cast<std::size_t>(object)].text);
  const Span subject_span = subject >= 0 ? s.subtree_span(subject) : Span{-1, -2};
  const Span object_span = object >= 0 ? s.subtree_span(object) : Span{-1, -2};
  const std::string marker = to_lower(s.tokens[static_cast<std::size_t>(match.marker)].text);

  std::vector<Out> out;
  std::optional<std::size_t> temporal_at, object_at;
  for (int i = 0; i < s.size(); ++i) {
    const auto& t = s.tokens[static_cast<std::size_t>(i)];
    if (!in_span(i, match.span) || dropped.count(i) != 0) {
      if (!in_span(i, match.span)) out.push_back({t.text, i});
      continue;
    }
    if (i == match.marker) {
      if (match.kind == ClauseKind::Purpose) {
        out.push_back({"for", -1});
      } else if (marker == "because") {
        out.push_back({t.text, i});
        out.push_back({"of", -1});
      } else if (marker == "as" || marker == "while" || marker == "when") {
        temporal_at = out.size();
      } else {
        out.push_back({t.text, i});
      }
    } else if (i == subject_span.first) {
      const auto& h = s.tokens[static_cast<std::size_t>(subject)];
      const auto form = subject_span.first == subject_span.second && h.tag == "PRP"
                            ? lexicons.possessive_form(h.text)
                            : std::nullopt;
      if (form) {
        out.push_back({*form, -1});
      } else {
        for (int k = subject_span.first; k <= subject_span.second; ++k) {
          out.push_back({s.tokens[static_cast<std::size_t>(k)].text, k});
        }
        out.push_back({"'s", -1});
      }
      i = subject_span.second;
    } else if (i == r) {
      if (self_object) out.push_back({"self", -1});
      out.push_back({*noun, -1});
    } else if (i == object_span.first) {
      if (self_object) {
        i = object_span.second;
        continue;
      }
      if (possessive && negation >= 0) {
        out.push_back({"lack", -1});
        out.push_back({"of", -1});
      }
      if (!possessive) object_at = out.size();
      for (int k = object_span.first; k <= object_span.second; ++k) {
        if (dropped.count(k) == 0) out.push_back({s.tokens[static_cast<std::size_t>(k)].text, k});
      }
      i = object_span.second;
    } else {
      out.push_back({t.text, i});
    }
  }
  if (temporal_at) {
    insert_into(out, *temporal_at, temporal_prepositions(), oracle, false);
    if (object_at && *object_at >= *temporal_at) ++*object_at;
  }
  if (object_at) insert_into(out, *object_at, general_prepositions(), oracle, true);
  return finish(s, std::move(out));
}

}  // namespace paralab::paragen
