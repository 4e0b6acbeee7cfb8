#include <doctest.h>

#include <fstream>
#include <string>

#include "paralab/common/error.hpp"
#include "paralab/paragen/engine.hpp"

using namespace paralab::paragen;
using paralab::ErrorCode;

namespace {

const Lexicons& lexicons() {
  static const Lexicons lex = Lexicons::load(std::string(PARALAB_DATA_DIR) + "/lexicons");
  return lex;
}

struct Golden {
  std::string kind;
  std::string expected;
  AnnotatedSentence sentence;
};

std::vector<Golden> goldens() {
  std::vector<Golden> out;
  std::ifstream in(std::string(PARALAB_TEST_DATA) + "/paragen/golden.jsonl");
  std::string line;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    out.push_back({j["kind"], j["expected"], annotation_from_json(j["sentence"])});
  }
  return out;
}

std::string paraphrase(const Golden& g, Oracle& oracle) {
  if (g.kind == "active_passive") return active_to_passive(g.sentence, lexicons(), oracle).text;
  auto m = detect_adverbial_clause(g.sentence);
  REQUIRE(m.has_value());
  return clause_to_noun_phrase(g.sentence, *m, lexicons(), oracle).text;
}

// Fails the test if consulted.
class RefusingOracle : public Oracle {
 public:
  std::string mask_fill_best(std::span<const std::string>, std::size_t,
                             std::span<const std::string>) override {
    FAIL("oracle consulted");
    return {};
  }
  double sentence_logprob(std::span<const std::string>) override {
    FAIL("oracle consulted");
    return 0.0;
  }
};

class FixedOracle : public Oracle {
 public:
  FixedOracle(double with, double without) : with_(with), without_(without) {}
  std::string mask_fill_best(std::span<const std::string>, std::size_t,
                             std::span<const std::string> c) override {
    return c.back();
  }
  double sentence_logprob(std::span<const std::string> t) override {
    return t.size() == base_ ? without_ : with_;
  }
  std::size_t base_ = 3;

 private:
  double with_, without_;
};

AnnotatedToken tok(std::string text, std::string lemma, std::string tag, int head, std::string dep) {
  AnnotatedToken t;
  t.text = std::move(text);
  t.lemma = std::move(lemma);
  t.pos = "X";
  t.tag = std::move(tag);
  t.head = head;
  t.dep = std::move(dep);
  return t;
}

AnnotatedSentence she_took_the_book() { return goldens()[0].sentence; }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const paralab::Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("worked examples reproduce byte-exactly with the fallback oracle") {
  FallbackOracle oracle;
  const auto gs = goldens();
  REQUIRE(gs.size() == 7);
  for (const auto& g : gs) {
    CAPTURE(g.expected);
    CHECK(paraphrase(g, oracle) == g.expected);
  }
}

TEST_CASE("the engine is deterministic for a fixed oracle") {
  FallbackOracle a, b;
  for (const auto& g : goldens()) CHECK(paraphrase(g, a) == paraphrase(g, b));
}

TEST_CASE("detect_active locates subject, object and root") {
  auto m = detect_active(she_took_the_book());
  REQUIRE(m.has_value());
  CHECK(m->root == 1);
  CHECK(m->subject_span == Span{0, 0});
  CHECK(m->object_span == Span{2, 3});
}

TEST_CASE("detect_active exclusions") {
  auto s = she_took_the_book();
  s.tokens[1].tag = "VBN";
  CHECK_FALSE(detect_active(s).has_value());

  s = she_took_the_book();
  s.tokens.push_back(tok("?", "?", ".", 1, "punct"));
  CHECK_FALSE(detect_active(s).has_value());

  s = she_took_the_book();
  s.tokens.push_back(tok("and", "and", "CC", 1, "cc"));
  CHECK_FALSE(detect_active(s).has_value());

  s = she_took_the_book();
  s.tokens.insert(s.tokens.begin() + 1, tok("to", "to", "TO", 2, "aux"));
  for (auto& t : s.tokens) {
    if (t.head >= 1) ++t.head;
  }
  s.tokens[1].head = 2;
  CHECK_FALSE(detect_active(s).has_value());
}

TEST_CASE("passive output grows by one to three tokens") {
  FallbackOracle oracle;
  for (const auto& g : goldens()) {
    if (g.kind != "active_passive") continue;
    auto r = active_to_passive(g.sentence, lexicons(), oracle);
    const int grow = static_cast<int>(r.words.size()) - g.sentence.size();
    CHECK(grow >= 1);
    CHECK(grow <= 3);
  }
}

TEST_CASE("plural subjects and tenses pick the auxiliary") {
  FallbackOracle oracle;
  auto s = she_took_the_book();
  s.tokens[3].text = "books";
  s.tokens[3].tag = "NNS";
  CHECK(active_to_passive(s, lexicons(), oracle).text == "The books were taken by her");
  s.tokens[1] = tok("takes", "take", "VBZ", -1, "ROOT");
  CHECK(active_to_passive(s, lexicons(), oracle).text == "The books are taken by her");
  s.tokens[3] = tok("book", "book", "NN", 1, "dobj");
  CHECK(active_to_passive(s, lexicons(), oracle).text == "The book is taken by her");
}

TEST_CASE("missing past participle is reported") {
  FallbackOracle oracle;
  auto s = she_took_the_book();
  s.tokens[1].lemma = "zorp";
  CHECK(code_of([&] { active_to_passive(s, lexicons(), oracle); }) ==
        ErrorCode::MissingLexiconEntry);
  s.tokens[1].tag = "VBN";
  CHECK(code_of([&] { active_to_passive(s, lexicons(), oracle); }) ==
        ErrorCode::UnsupportedPattern);
}

TEST_CASE("detect_adverbial_clause kinds") {
  const auto gs = goldens();
  CHECK(detect_adverbial_clause(gs[3].sentence)->kind == ClauseKind::Temporal);
  CHECK(detect_adverbial_clause(gs[4].sentence)->kind == ClauseKind::Purpose);
  CHECK(detect_adverbial_clause(gs[5].sentence)->kind == ClauseKind::CausePossessive);
  CHECK(detect_adverbial_clause(gs[6].sentence)->kind == ClauseKind::CauseNonPossessive);
  CHECK(detect_adverbial_clause(gs[5].sentence)->span == Span{9, 14});
  CHECK_FALSE(detect_adverbial_clause(she_took_the_book()).has_value());
}

TEST_CASE("SRL frames must agree with the clause when present") {
  auto s = goldens()[4].sentence;
  s.srl_frames[0].args[2].label = "ARGM-LOC";
  CHECK_FALSE(detect_adverbial_clause(s).has_value());
  s.srl_frames.clear();
  CHECK(detect_adverbial_clause(s)->kind == ClauseKind::Purpose);
}

TEST_CASE("active and clause detectors never claim the same span") {
  for (const auto& g : goldens()) {
    auto a = detect_active(g.sentence);
    auto c = detect_adverbial_clause(g.sentence);
    if (a && c) {
      CHECK_FALSE((c->span.first <= a->root && a->root <= c->span.second));
    }
  }
}

TEST_CASE("negated non-possessive clauses are skipped") {
  FallbackOracle oracle;
  auto s = goldens()[6].sentence;
  s.tokens.insert(s.tokens.begin() + 7, tok("not", "not", "RB", 8, "neg"));
  for (auto& t : s.tokens) {
    if (t.head >= 7) ++t.head;
  }
  s.tokens[7].head = 8;
  s.srl_frames.clear();
  auto m = detect_adverbial_clause(s);
  REQUIRE(m.has_value());
  CHECK(code_of([&] { clause_to_noun_phrase(s, *m, lexicons(), oracle); }) ==
        ErrorCode::UnsupportedPattern);
}

TEST_CASE("word insertion") {
  RefusingOracle refusing;
  Words w = {"a", "b"};
  std::vector<std::string> one = {"x"};
  CHECK(word_insertion(w, 1, one, refusing) == Words{"a", "x", "b"});
  FallbackOracle fallback;
  CHECK(word_insertion(w, 0, temporal_prepositions(), fallback) == Words{"upon", "a", "b"});
  CHECK(word_insertion(w, 2, general_prepositions(), fallback) == Words{"a", "b", "of"});
  std::vector<std::string> unlisted = {"zeta", "alpha"};
  CHECK(word_insertion(w, 0, unlisted, fallback).front() == "zeta");
  CHECK(code_of([&] { word_insertion(w, 3, one, fallback); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { word_insertion(w, 0, {}, fallback); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("optional word insertion") {
  Words w = {"a", "b", "c"};
  FallbackOracle::Options opts;
  opts.penalty = 0.0;
  FallbackOracle length(opts);
  CHECK(optional_word_insertion(w, 1, general_prepositions(), length) == w);
  FixedOracle prefers(-1.0, -2.0);
  CHECK(optional_word_insertion(w, 1, general_prepositions(), prefers).size() == 4);
  FixedOracle tie(-1.0, -1.0);
  CHECK(optional_word_insertion(w, 1, general_prepositions(), tie) == w);
}

TEST_CASE("fallback sentence score") {
  FallbackOracle oracle;
  Words plain = {"for", "enjoyment", "the", "warmth"};
  Words with_of = {"for", "enjoyment", "of", "the", "warmth"};
  CHECK(oracle.sentence_logprob(plain) == -6.0);
  CHECK(oracle.sentence_logprob(with_of) == -5.0);
}

TEST_CASE("noun derivation chain") {
  FallbackOracle oracle;
  CHECK(noun_derivation("arrive", lexicons(), oracle) == "arrival");
  CHECK(noun_derivation("Fly", lexicons(), oracle) == "flight");
  CHECK(noun_derivation("enjoy", lexicons(), oracle) == "enjoyment");
  CHECK(noun_derivation("walk", lexicons(), oracle) == "walking");
  CHECK_FALSE(noun_derivation("zorp", lexicons(), oracle).has_value());
}

TEST_CASE("lexicon tables") {
  const auto& lex = lexicons();
  CHECK(lex.object_form("She") == "her");
  CHECK(lex.subject_form("him") == "he");
  CHECK(lex.possessive_form("it") == "its");
  CHECK_FALSE(lex.object_form("book").has_value());
  REQUIRE(lex.verb("take") != nullptr);
  CHECK(lex.verb("take")->past_participle == "taken");
  CHECK(temporal_prepositions().size() == 9);
  CHECK(general_prepositions().size() == 59);
  CHECK(general_prepositions().front() == "as");
  CHECK(general_prepositions().back() == "without");
}

TEST_CASE("lexicon parse errors") {
  CHECK(code_of([] { Lexicons::parse("a\tb\tc\n", "", "", ""); }) == ErrorCode::MalformedLexicon);
  CHECK(code_of([] { Lexicons::parse("a\tb\na\tc\n", "", "", ""); }) ==
        ErrorCode::MalformedLexicon);
  CHECK(code_of([] { Lexicons::parse("", "", "go\twent\n", ""); }) == ErrorCode::MalformedLexicon);
  CHECK(code_of([] { Lexicons::load("/nonexistent/lexicons"); }) == ErrorCode::Io);
  auto lex = Lexicons::parse("# comment\n\nArrive\tArrival\r\n", "", "", "");
  CHECK(lex.amr_morph.at("arrive") == "arrival");
}
