// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "paralab/aggregate/sample_matrix.hpp"
#include "paralab/evaluate/metrics.hpp"
#include "paralab/evaluate/report.hpp"
#include "paralab/manipulate/manipulate.hpp"
#include "paralab/minimodel/model.hpp"
#include "paralab/tensorio/corpus.hpp"

namespace paralab::evaluate {

/// Which neurons a selection ranks over: every block output, or only the
/// final one (the only block the decoder reads).
enum class Universe { AllBlocks, FinalBlock };

std::string_view universe_name(Universe u);
Universe parse_universe(std::string_view name);

/// Statistics estimated on a dev split of paired toy sentences.
struct ToyStudy {
  manipulate::DirectionSpec direction;  // c1 = paraphrase mean, c2 = source mean
  std::vector<double> paracorr;         // matched-neuron ParaCorr per neuron
  Universe universe = Universe::FinalBlock;
  std::size_t offset = 0;  // global id of the first neuron in the universe
};

/// Pools block-output activations of both sides of `dev`. With
/// `from_paraphrase`, c1 is the paraphrase side and c2 the source side;
/// otherwise the roles swap. Degenerate ParaCorr entries score 0.
ToyStudy toy_study(const minimodel::ModelParams& params, const tensorio::ParallelCorpus& dev,
                   Universe universe = Universe::FinalBlock, bool from_paraphrase = true,
                   aggregate::Pooling pooling = aggregate::Pooling::Mean);

struct CurveOptions {
  manipulate::SelectionKind selection = manipulate::SelectionKind::TopParaCorr;
  std::vector<std::size_t> ks;
  std::optional<double> alpha;  // defaults to the direction norm (mean transport)
  std::uint64_t seed = 1;       // random selections
  bool from_paraphrase = true;  // manipulate paraphrase-side inputs
  int max_len = 32;
};

/// Per-point decode scores of manipulated inputs.
struct DecodeScores {
  double bleu_source_form = 0.0;  // against the references of the input's own form
  double bleu_target_form = 0.0;  // against the references of the other form
  double target_form_rate = 0.0;  // outputs opening with the other form's marker
  double accuracy = 0.0;          // exact match with the input-form reference
};

/// Decodes `test` inputs of one side with an optional hook and scores them.
DecodeScores score_decodes(const minimodel::ModelParams& params,
                           const tensorio::ParallelCorpus& test, bool from_paraphrase,
                           const minimodel::EncoderHook& hook, int max_len = 32);

/// For each k, manipulates the first k selected neurons (study on `dev`,
/// decodes on the disjoint `test`) and records the four decode scores as
/// series "<selection>/<metric>". k = 0 is the unmanipulated baseline.
EvalReport curve_experiment(const minimodel::ModelParams& params, const ToyStudy& study,
                            const tensorio::ParallelCorpus& test, const CurveOptions& options);

struct ErasureOptions {
  std::vector<manipulate::SelectionKind> selections = {
      manipulate::SelectionKind::TopParaCorr, manipulate::SelectionKind::BottomParaCorr};
  std::vector<std::size_t> ks;
  std::uint64_t seed = 1;
  int max_len = 32;
};

/// Sequence accuracy on both sides of `test` after zeroing the first k
/// selected neurons; one "<selection>/accuracy" series per selection.
EvalReport erasure_curve(const minimodel::ModelParams& params, const ToyStudy& study,
                         const tensorio::ParallelCorpus& test, const ErasureOptions& options);

/// Median |matched-neuron correlation| of the confound experiments on a
/// randomly initialised toy encoder over `sentences` synthetic sources.
struct ConfoundMedians {
  double poscorr_blocks = 0.0;  // block-output taps
  double full_random_blocks = 0.0;
  double poscorr_attention0 = 0.0;  // block-0 post-attention tap
  double full_random_attention0 = 0.0;
  double tokencorr_blocks = 0.0;
  double random_pair_blocks = 0.0;  // token correlation with deranged pairing
};

ConfoundMedians confound_medians(std::uint64_t seed, std::size_t sentences = 200);

}  // namespace paralab::evaluate
