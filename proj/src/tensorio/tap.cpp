// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#include "paralab/tensorio/tap.hpp"

#include <array>
#include <charconv>

#include "paralab/common/error.hpp"

namespace paralab::tensorio {
namespace {

constexpr std::array<std::string_view, kSitesPerBlock> kSiteNames = {
    "post_attention", "post_residual_norm1", "post_ffn", "post_residual_norm2"};

}  // namespace

std::string_view site_name(TapSite site) {
  return kSiteNames[static_cast<std::size_t>(site)];
}

std::string tap_label(TapId tap) {
  return "block" + std::to_string(tap.block_index) + "." +
         std::string(site_name(tap.site));
}

TapId parse_tap(std::string_view label) {
  constexpr std::string_view prefix = "block";
  const auto dot = label.find('.');
  if (!label.starts_with(prefix) || dot == std::string_view::npos) {
    fail(ErrorCode::InvalidArgument, "bad tap label '" + std::string(label) + "'");
  }
  TapId tap;
  const auto digits = label.substr(prefix.size(), dot - prefix.size());
  const auto [ptr, ec] =
      std::from_chars(digits.data(), digits.data() + digits.size(), tap.block_index);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) {
    fail(ErrorCode::InvalidArgument, "bad block index in tap '" + std::string(label) + "'");
  }
  const auto site = label.substr(dot + 1);
  for (std::size_t i = 0; i < kSiteNames.size(); ++i) {
    if (site == kSiteNames[i]) {
      tap.site = static_cast<TapSite>(i);
      return tap;
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown tap site '" + std::string(site) + "'");
}

}  // namespace paralab::tensorio
