// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace paralab::tensorio {

/// Capture sites inside one post-norm encoder block, in execution order.
enum class TapSite : std::uint8_t {
  PostAttention = 0,      // attention sublayer output, before the residual add
  PostResidualNorm1 = 1,  // LayerNorm(x + attention)
  PostFFN = 2,            // feed-forward output, before the residual add
  PostResidualNorm2 = 3,  // LayerNorm(h + ffn): the block output
};

inline constexpr int kSitesPerBlock = 4;

struct TapId {
  std::uint32_t block_index = 0;
  TapSite site = TapSite::PostResidualNorm2;

  auto operator<=>(const TapId&) const = default;

  /// Index of this tap in block-major order (block * 4 + site).
  std::uint32_t ordinal() const {
    return block_index * kSitesPerBlock + static_cast<std::uint32_t>(site);
  }
};

std::string_view site_name(TapSite site);
/// "block{b}.{site}", e.g. "block3.post_residual_norm2".
std::string tap_label(TapId tap);
/// Inverse of tap_label; throws Error(InvalidArgument) on bad text.
TapId parse_tap(std::string_view label);

}  // namespace paralab::tensorio
