// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "paralab/aggregate/sample_matrix.hpp"
#include "paralab/correlate/map.hpp"
#include "paralab/minimodel/model.hpp"
#include "paralab/tensorio/corpus.hpp"

namespace paralab::correlate {

/// Length- and mask-preserving copies of `sentences` whose non-special
/// tokens are drawn uniformly from the non-special ids [4, vocab_size).
std::vector<tensorio::TokenSequence> random_token_sequences(
    std::span<const tensorio::TokenSequence> sentences, int vocab_size, std::uint64_t seed);

/// A uniformly random permutation with no fixed point (Sattolo's cycle).
std::vector<std::size_t> random_derangement(std::size_t n, std::uint64_t seed);

/// Correlation map between two sample matrices whose row i describes the
/// same pair. RandomPairControl deranges the rows of `b` first (seeded);
/// every other kind correlates rows as given.
CorrelationMap run_experiment(ExperimentKind kind, const aggregate::SampleMatrix& a,
                              const aggregate::SampleMatrix& b, Method method,
                              std::uint64_t seed);

struct SamplePair {
  aggregate::SampleMatrix a;
  aggregate::SampleMatrix b;
};

struct ToyExperiment {
  ExperimentKind kind = ExperimentKind::ParaCorr;
  ExperimentKind base = ExperimentKind::ParaCorr;  // paired sets for RandomPairControl
  std::vector<tensorio::TapId> taps;
  aggregate::Pooling pooling = aggregate::Pooling::Mean;
  aggregate::TokenMode token_mode = aggregate::TokenMode::LastSubword;
  std::uint64_t seed = 1;  // random-token synthesis
};

/// Encodes the two conditions of an experiment with the toy model and pools
/// them. `second` is required for ModelCorr (and RandomPairControl over it).
/// Throws Error(MissingModel) when it is absent.
SamplePair toy_samples(const ToyExperiment& spec, const minimodel::ModelParams& model,
                       const minimodel::ModelParams* second,
                       const tensorio::ParallelCorpus& corpus);

/// Pools an already-encoded raw dump of `sentences`.
aggregate::SampleMatrix pooled_samples(const tensorio::ActivationDump& dump,
                                       std::span<const tensorio::TokenSequence> sentences,
                                       const ToyExperiment& spec);

}  // namespace paralab::correlate
