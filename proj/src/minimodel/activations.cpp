// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#include "paralab/minimodel/activations.hpp"

#include <algorithm>

#include "paralab/common/error.hpp"

namespace paralab::minimodel {

using tensorio::TapId;
using tensorio::TapSite;

std::vector<TapId> all_taps(const ModelConfig& config) {
  std::vector<TapId> taps;
  for (int b = 0; b < config.n_encoder_blocks; ++b) {
    for (int s = 0; s < tensorio::kSitesPerBlock; ++s) {
      taps.push_back({static_cast<std::uint32_t>(b), static_cast<TapSite>(s)});
    }
  }
  return taps;
}

std::vector<TapId> block_output_taps(const ModelConfig& config) {
  std::vector<TapId> taps;
  for (int b = 0; b < config.n_encoder_blocks; ++b) {
    taps.push_back({static_cast<std::uint32_t>(b), TapSite::PostResidualNorm2});
  }
  return taps;
}

tensorio::ActivationDump dump_activations(const ModelParams& params,
                                          std::span<const tensorio::TokenSequence> sentences,
                                          std::span<const TapId> taps, bool add_positions) {
  if (sentences.empty()) fail(ErrorCode::EmptyInput, "no sentences to encode");
  if (taps.empty()) fail(ErrorCode::InvalidArgument, "no taps requested");
  for (const auto& t : taps) {
    if (static_cast<int>(t.block_index) >= params.config.n_encoder_blocks) {
      fail(ErrorCode::TapMissing, "model has no " + tensorio::tap_label(t));
    }
  }
  tensorio::ActivationDump dump;
  dump.layout = tensorio::DumpLayout::Raw;
  dump.n_sentences = static_cast<std::uint32_t>(sentences.size());
  dump.n_taps = static_cast<std::uint32_t>(taps.size());
  dump.n_neurons = static_cast<std::uint32_t>(params.config.embed_dim);
  dump.taps.assign(taps.begin(), taps.end());
  std::size_t longest = 0;
  for (const auto& s : sentences) {
    longest = std::max(longest, s.size());
    dump.token_counts.push_back(static_cast<std::uint32_t>(s.size()));
  }
  dump.n_tokens = static_cast<std::uint32_t>(longest);
  dump.values.assign(dump.expected_values(), 0.0f);

  constexpr std::size_t kChunk = 64;
  for (std::size_t start = 0; start < sentences.size(); start += kChunk) {
    const std::size_t end = std::min(sentences.size(), start + kChunk);
    std::vector<std::vector<int>> ids;
    for (std::size_t i = start; i < end; ++i) {
      ids.emplace_back(sentences[i].token_ids.begin(), sentences[i].token_ids.end());
    }
    auto outs = forward_encode_batch(params, ids, add_positions);
    for (std::size_t i = start; i < end; ++i) {
      const EncodeOutput& out = outs[i - start];
      for (std::size_t t = 0; t < taps.size(); ++t) {
        const Mat& m = out.at(taps[t]);
        for (Eigen::Index tok = 0; tok < m.rows(); ++tok) {
          float* row = &dump.values[((i * dump.n_tokens + static_cast<std::size_t>(tok)) *
                                         dump.n_taps + t) * dump.n_neurons];
          for (Eigen::Index k = 0; k < m.cols(); ++k) row[k] = static_cast<float>(m(tok, k));
        }
      }
    }
  }
  return dump;
}

}  // namespace paralab::minimodel
