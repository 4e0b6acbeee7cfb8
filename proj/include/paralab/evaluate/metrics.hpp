// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "paralab/paragen/annotation.hpp"

namespace paralab::evaluate {

using Tokens = std::vector<std::string>;

Tokens split_words(std::string_view text);

/// Corpus-level BLEU-4 on a 0-100 scale.
///
///   m_n = sum over sentences of clipped n-gram matches (n = 1..4)
///   t_n = sum over sentences of candidate n-gram counts
///   p_n = m_n / t_n, or 1 / (2 t_n) when m_n = 0; orders with t_n = 0
///         are left out of the mean
///   c, r = total candidate and reference lengths
///   BP = 1 if c > r, else exp(1 - r / c); BLEU = 0 when c = 0
///   BLEU = 100 * BP * exp(mean over kept orders of log p_n)
///
/// Throws Error(EmptyInput) for an empty corpus and Error(LengthMismatch)
/// when the lists differ in length.
double bleu(std::span<const Tokens> candidates, std::span<const Tokens> references);

/// The passive rule over dependency parses: the root has the configured
/// lemma and a child with the configured dependency label whose fine tag
/// is one of the participle tags.
struct PassiveRule {
  std::string root_lemma = "werden";
  std::string child_dep = "oc";
  std::vector<std::string> participle_tags = {"VVPP", "VAPP", "VMPP"};
};

bool is_passive(const paragen::AnnotatedSentence& s, const PassiveRule& rule = {});
/// Fraction of passive sentences. Throws Error(EmptyInput) and
/// Error(MissingAnnotation) when a token has no lemma, tag or dep.
double passive_score(std::span<const paragen::AnnotatedSentence> sentences,
                     const PassiveRule& rule = {});

/// Toy-language analogue of the passive rule: the output opens with "pass".
bool toy_is_passive(const Tokens& output);

struct OverlapPoint {
  std::size_t x = 0;
  double a_vs_bc = 0.0;  // |A ∩ (B ∪ C)| / x, percent
  double a_vs_b = 0.0;
  double a_vs_c = 0.0;
  double b_vs_c = 0.0;
};

/// Overlap of the top-x prefixes of three rankings over one id universe.
/// Throws Error(CutoffOutOfRange) for x = 0 or x beyond the universe and
/// Error(InvalidArgument) when the rankings are not permutations of the
/// same ids.
std::vector<OverlapPoint> overlap_curve(std::span<const std::size_t> rank_a,
                                        std::span<const std::size_t> rank_b,
                                        std::span<const std::size_t> rank_c,
                                        std::span<const std::size_t> xs);

}  // namespace paralab::evaluate
