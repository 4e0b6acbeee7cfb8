// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#include "paralab/evaluate/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "paralab/common/error.hpp"

namespace paralab::evaluate {

Tokens split_words(std::string_view text) {
  std::istringstream in{std::string(text)};
  Tokens out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

namespace {

std::map<std::vector<std::string>, int> ngram_counts(const Tokens& t, std::size_t n) {
  std::map<std::vector<std::string>, int> counts;
  for (std::size_t i = 0; i + n <= t.size(); ++i) {
    counts[std::vector<std::string>(t.begin() + static_cast<std::ptrdiff_t>(i),
                                    t.begin() + static_cast<std::ptrdiff_t>(i + n))]++;
  }
  return counts;
}

}  // namespace

double bleu(std::span<const Tokens> candidates, std::span<const Tokens> references) {
  if (candidates.size() != references.size()) {
    fail(ErrorCode::LengthMismatch, "candidate and reference counts differ");
  }
  if (candidates.empty()) fail(ErrorCode::EmptyInput, "BLEU of an empty corpus");
  double matches[5] = {0, 0, 0, 0, 0}, totals[5] = {0, 0, 0, 0, 0};
  double c = 0, r = 0;
  for (std::size_t s = 0; s < candidates.size(); ++s) {
    c += static_cast<double>(candidates[s].size());
    r += static_cast<double>(references[s].size());
    for (std::size_t n = 1; n <= 4; ++n) {
      const auto cand = ngram_counts(candidates[s], n);
      const auto ref = ngram_counts(references[s], n);
      for (const auto& [gram, count] : cand) {
        auto it = ref.find(gram);
        if (it != ref.end()) matches[n] += std::min(count, it->second);
        totals[n] += count;
      }
    }
  }
  if (c == 0) return 0.0;
  double log_sum = 0.0;
  int orders = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    if (totals[n] == 0) continue;
    const double p = matches[n] > 0 ? matches[n] / totals[n] : 1.0 / (2.0 * totals[n]);
    log_sum += std::log(p);
    ++orders;
  }
  const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return 100.0 * bp * std::exp(log_sum / orders);
}

bool is_passive(const paragen::AnnotatedSentence& s, const PassiveRule& rule) {
  for (const auto& t : s.tokens) {
    if (t.lemma.empty() || t.tag.empty() || t.dep.empty()) {
      fail(ErrorCode::MissingAnnotation, "token '" + t.text + "' lacks lemma, tag or dep");
    }
  }
  const int root = s.root();
  if (s.tokens[static_cast<std::size_t>(root)].lemma != rule.root_lemma) return false;
  for (int c : s.children(root)) {
    const auto& t = s.tokens[static_cast<std::size_t>(c)];
    if (t.dep == rule.child_dep &&
        std::find(rule.participle_tags.begin(), rule.participle_tags.end(), t.tag) !=
            rule.participle_tags.end()) {
      return true;
    }
  }
  return false;
}

double passive_score(std::span<const paragen::AnnotatedSentence> sentences,
                     const PassiveRule& rule) {
  if (sentences.empty()) fail(ErrorCode::EmptyInput, "no sentences to score");
  std::size_t hits = 0;
  for (const auto& s : sentences) hits += is_passive(s, rule);
  return static_cast<double>(hits) / static_cast<double>(sentences.size());
}

bool toy_is_passive(const Tokens& output) { return !output.empty() && output.front() == "pass"; }

std::vector<OverlapPoint> overlap_curve(std::span<const std::size_t> rank_a,
                                        std::span<const std::size_t> rank_b,
                                        std::span<const std::size_t> rank_c,
                                        std::span<const std::size_t> xs) {
  const std::set<std::size_t> ua(rank_a.begin(), rank_a.end());
  if (ua.size() != rank_a.size() || std::set<std::size_t>(rank_b.begin(), rank_b.end()) != ua ||
      std::set<std::size_t>(rank_c.begin(), rank_c.end()) != ua || rank_b.size() != ua.size() ||
      rank_c.size() != ua.size()) {
    fail(ErrorCode::InvalidArgument, "rankings must order the same set of ids");
  }
  std::vector<OverlapPoint> out;
  for (std::size_t x : xs) {
    if (x == 0 || x > ua.size()) {
      fail(ErrorCode::CutoffOutOfRange, "cutoff " + std::to_string(x) + " outside 1.." +
                                            std::to_string(ua.size()));
    }
    const std::set<std::size_t> a(rank_a.begin(), rank_a.begin() + static_cast<std::ptrdiff_t>(x));
    const std::set<std::size_t> b(rank_b.begin(), rank_b.begin() + static_cast<std::ptrdiff_t>(x));
    const std::set<std::size_t> c(rank_c.begin(), rank_c.begin() + static_cast<std::ptrdiff_t>(x));
    auto common = [](const std::set<std::size_t>& p, const std::set<std::size_t>& q) {
      std::size_t n = 0;
      for (auto v : p) n += q.count(v);
      return n;
    };
    std::size_t in_bc = 0;
    for (auto v : a) in_bc += b.count(v) || c.count(v);
    const double scale = 100.0 / static_cast<double>(x);
    out.push_back({x, in_bc * scale, common(a, b) * scale, common(a, c) * scale,
                   common(b, c) * scale});
  }
  return out;
}

}  // namespace paralab::evaluate
