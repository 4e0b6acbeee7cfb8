// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "paralab/minimodel/model.hpp"
#include "paralab/tensorio/dump.hpp"

namespace paralab::minimodel {

/// Every tap of every encoder block, block-major.
std::vector<tensorio::TapId> all_taps(const ModelConfig& config);
/// The PostResidualNorm2 tap of each block.
std::vector<tensorio::TapId> block_output_taps(const ModelConfig& config);

/// Encodes `sentences` and stores the requested taps as a Raw dump.
/// Sentences are encoded in fixed chunks of 64 so results do not depend on
/// the caller's batching.
tensorio::ActivationDump dump_activations(const ModelParams& params,
                                          std::span<const tensorio::TokenSequence> sentences,
                                          std::span<const tensorio::TapId> taps,
                                          bool add_positions = true);

}  // namespace paralab::minimodel
