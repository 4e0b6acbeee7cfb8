// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#include "paralab/correlate/experiment.hpp"

#include <numeric>

#include "paralab/common/error.hpp"
#include "paralab/common/rng.hpp"
#include "paralab/minimodel/activations.hpp"

namespace paralab::correlate {

using aggregate::SampleMatrix;
using tensorio::TokenSequence;

std::vector<TokenSequence> random_token_sequences(std::span<const TokenSequence> sentences,
                                                  int vocab_size, std::uint64_t seed) {
  if (vocab_size <= minimodel::kNumSpecials) {
    fail(ErrorCode::InvalidArgument, "vocabulary has no non-special tokens");
  }
  Rng rng(seed, 0x9a4d);
  const auto choices = static_cast<std::uint64_t>(vocab_size - minimodel::kNumSpecials);
  std::vector<TokenSequence> out(sentences.begin(), sentences.end());
  for (auto& s : out) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s.specials_mask[i]) continue;
      const auto id = static_cast<std::int32_t>(minimodel::kNumSpecials + rng.uniform_index(choices));
      s.token_ids[i] = id;
      s.surface[i] = "#" + std::to_string(id);
    }
  }
  return out;
}

std::vector<std::size_t> random_derangement(std::size_t n, std::uint64_t seed) {
  if (n < 2) fail(ErrorCode::TooFewSamples, "derangement needs at least two items");
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  Rng rng(seed, 0xde7a);
  for (std::size_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_index(i));
    std::swap(p[i], p[j]);
  }
  return p;
}

CorrelationMap run_experiment(ExperimentKind kind, const SampleMatrix& a, const SampleMatrix& b,
                              Method method, std::uint64_t seed) {
  if (a.rows() < 2) fail(ErrorCode::TooFewSamples, "experiments need at least two sentences");
  CorrelationMap map;
  if (kind == ExperimentKind::RandomPairControl) {
    const auto perm = random_derangement(b.rows(), seed);
    map = correlation_map(a.values, aggregate::select_rows(b, perm).values, method);
  } else {
    map = correlation_map(a.values, b.values, method);
  }
  map.kind = kind;
  map.taps_a = a.taps;
  map.taps_b = b.taps;
  map.seeds = {seed};
  return map;
}

SampleMatrix pooled_samples(const tensorio::ActivationDump& dump,
                            std::span<const TokenSequence> sentences, const ToyExperiment& spec) {
  return aggregate::build_sample_matrix(dump, sentences, 0, spec.taps, spec.pooling,
                                        spec.token_mode);
}

SamplePair toy_samples(const ToyExperiment& spec, const minimodel::ModelParams& model,
                       const minimodel::ModelParams* second,
                       const tensorio::ParallelCorpus& corpus) {
  if (spec.taps.empty()) fail(ErrorCode::InvalidArgument, "no taps selected");
  if (corpus.size() < 2) fail(ErrorCode::TooFewSamples, "experiments need at least two pairs");
  auto encode = [&](const minimodel::ModelParams& m, std::span<const TokenSequence> sents,
                    bool positions) {
    auto dump = minimodel::dump_activations(m, sents, spec.taps, positions);
    return pooled_samples(dump, sents, spec);
  };
  const ExperimentKind kind =
      spec.kind == ExperimentKind::RandomPairControl ? spec.base : spec.kind;
  if (kind == ExperimentKind::RandomPairControl) {
    fail(ErrorCode::InvalidArgument, "random-pair control needs a different base experiment");
  }
  const auto& S = corpus.source;
  SamplePair out;
  out.a = encode(model, S, true);
  switch (kind) {
    case ExperimentKind::ParaCorr:
      out.b = encode(model, corpus.paraphrase, true);
      break;
    case ExperimentKind::ModelCorr:
      if (!second) fail(ErrorCode::MissingModel, "model correlation needs a second model");
      out.b = encode(*second, S, true);
      break;
    case ExperimentKind::PosCorr:
      out.b = encode(model, random_token_sequences(S, model.config.vocab_size, spec.seed), true);
      break;
    case ExperimentKind::TokenCorr:
      out.b = encode(model, S, false);
      break;
    case ExperimentKind::FullRandomControl:
      out.b = encode(model, random_token_sequences(S, model.config.vocab_size, spec.seed), false);
      break;
    case ExperimentKind::RandomPairControl:
      break;
  }
  return out;
}

}  // namespace paralab::correlate
