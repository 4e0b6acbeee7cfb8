// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "paralab/aggregate/sample_matrix.hpp"
#include "paralab/correlate/stats.hpp"
#include "paralab/tensorio/tap.hpp"

namespace paralab::correlate {

using aggregate::Matrix;

enum class ExperimentKind {
  ParaCorr,           // S vs P, one model
  ModelCorr,          // S in two differently seeded models
  PosCorr,            // S vs random tokens of the same lengths
  TokenCorr,          // S vs S encoded without positions
  RandomPairControl,  // a base experiment with its pairing deranged
  FullRandomControl,  // S vs random tokens encoded without positions
};

std::string_view kind_name(ExperimentKind k);
ExperimentKind parse_kind(std::string_view name);

/// Entry (i, j) correlates neuron i of condition A with neuron j of
/// condition B across sentences.
struct CorrelationMap {
  Matrix values;
  std::vector<std::uint8_t> degenerate;  // row-major, 1 where a side had zero variance
  ExperimentKind kind = ExperimentKind::ParaCorr;
  Method method = Method::Pearson;
  std::vector<tensorio::TapId> taps_a;
  std::vector<tensorio::TapId> taps_b;
  std::vector<std::uint64_t> seeds;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
  bool is_degenerate(std::size_t i, std::size_t j) const {
    return degenerate[i * cols() + j] != 0;
  }
  bool operator==(const CorrelationMap&) const = default;
};

/// Full map between every column of `a` and every column of `b`. Columns
/// are standardized once (Welford moments), then each entry is a single dot
/// product.
CorrelationMap correlation_map(const Matrix& a, const Matrix& b, Method method);

/// Only the matched-neuron correlations corr(a[:, l], b[:, l]).
std::vector<Correlation> paired_correlations(const Matrix& a, const Matrix& b, Method method);

/// map[i][i]. Throws Error(NonSquare) unless the map is square over the
/// same taps on both sides.
std::vector<double> diag(const CorrelationMap& map);

/// Binary layout ("CMAP", little-endian):
///   magic | u32 version = 1 | u8 kind | u8 method | u32 rows | u32 cols
///   | u32 n taps A + labels | u32 n taps B + labels | u32 n seeds + u64 seeds
///   | rows*cols f64 values | rows*cols u8 degenerate flags
std::string encode_map(const CorrelationMap& map);
CorrelationMap decode_map(std::string_view bytes);
void write_map(const CorrelationMap& map, const std::filesystem::path& path);
CorrelationMap read_map(const std::filesystem::path& path);

/// Matrix CSV: header "neuron,0,1,..." then one row per A-neuron.
std::string map_to_csv(const CorrelationMap& map);

/// SVG heatmap, diverging blue-white-red over [-1, 1], axes labelled with
/// the tap names of each side.
std::string render_heatmap_svg(const CorrelationMap& map, std::string_view title = "");
void render_heatmap(const CorrelationMap& map, const std::filesystem::path& path,
                    std::string_view title = "");

/// "#rrggbb" for a correlation value; NaN never reaches here.
std::string diverging_color(double v);

}  // namespace paralab::correlate
