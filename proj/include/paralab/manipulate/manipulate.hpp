// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "paralab/aggregate/sample_matrix.hpp"
#include "paralab/minimodel/model.hpp"

namespace paralab::manipulate {

using aggregate::Matrix;
using aggregate::SampleMatrix;

/// Column means. Throws Error(EmptyInput) for a matrix without rows.
Eigen::RowVectorXd mean_activation(const SampleMatrix& m);

/// Translation between two condition means: delta = mean_c1 - mean_c2.
struct DirectionSpec {
  Eigen::RowVectorXd mean_c1;
  Eigen::RowVectorXd mean_c2;
  Eigen::RowVectorXd delta;
  double norm = 0.0;
  bool random = false;
  std::uint64_t seed = 0;  // random directions only
};

DirectionSpec direction_between(const Eigen::RowVectorXd& mean_c1,
                                const Eigen::RowVectorXd& mean_c2);
DirectionSpec direction_between(const SampleMatrix& c1, const SampleMatrix& c2);
/// mean_c1 minus a vector drawn element-wise from N(0, 1) with `seed`.
DirectionSpec random_direction(const Eigen::RowVectorXd& mean_c1, std::uint64_t seed);

enum class SelectionKind { TopParaCorr, BottomParaCorr, RandomK, LayerStratifiedRandomK, Explicit };

std::string_view selection_name(SelectionKind k);
SelectionKind parse_selection(std::string_view name);

struct NeuronSelection {
  SelectionKind kind = SelectionKind::TopParaCorr;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> ids;  // Explicit only
};

enum class Order { Desc, Asc };

/// Stable ranking; ties go to the lower id first. Throws Error(NanScore).
std::vector<std::size_t> rank_neurons(std::span<const double> scores, Order order);

/// Concrete neuron ids for a selection over `total` neurons laid out as
/// consecutive layers of `per_layer` neurons. Top/Bottom and the stratified
/// variant need ParaCorr diagonal `scores`. Throws Error(InvalidSelection).
std::vector<std::size_t> resolve_selection(const NeuronSelection& sel,
                                           std::span<const double> scores, std::size_t total,
                                           std::size_t per_layer);

/// x_hat[i] = x[i] - beta * delta[i] on the selected neurons, beta = alpha / norm.
struct ManipulationPlan {
  DirectionSpec direction;
  std::vector<std::size_t> neurons;
  double alpha = 1.0;

  double beta() const;
};

/// Validates ids (in range, unique) and the zero-norm rule.
ManipulationPlan make_plan(DirectionSpec direction, std::vector<std::size_t> neurons,
                           double alpha);

/// Shifts every row of `activations` (tokens x all neurons).
void apply(const ManipulationPlan& plan, Matrix& activations);
/// Shifts the columns of one layer: `activations` holds neurons
/// [layer * per_layer, (layer + 1) * per_layer).
void apply_layer(const ManipulationPlan& plan, std::size_t layer, std::size_t per_layer,
                 Matrix& activations);

void erase(std::span<const std::size_t> ids, Matrix& activations);
void erase_layer(std::span<const std::size_t> ids, std::size_t layer, std::size_t per_layer,
                 Matrix& activations);

/// Decoder-facing hooks over block-output neuron ids (block * d + dim).
/// Only the final block output is rewritten: it is the only block the
/// decoder reads, so shifts of earlier blocks would not reach it.
minimodel::EncoderHook manipulation_hook(const ManipulationPlan& plan,
                                         const minimodel::ModelConfig& config);
minimodel::EncoderHook erasure_hook(std::vector<std::size_t> ids,
                                    const minimodel::ModelConfig& config);

struct GridRow {
  double alpha = 0.0;
  std::vector<std::pair<std::string, double>> metrics;
};

/// Evaluates `evaluate(plan)` for a copy of `base` at each alpha.
std::vector<GridRow> magnitude_grid(
    std::span<const double> alphas, const ManipulationPlan& base,
    const std::function<std::vector<std::pair<std::string, double>>(const ManipulationPlan&)>&
        evaluate);

struct Split {
  std::vector<std::size_t> source_rows;      // contribute only their source sentence
  std::vector<std::size_t> paraphrase_rows;  // contribute only their paraphrase
};

/// Seeded shuffle of the pair indices; the first floor(n/2) become the
/// source half. Throws Error(TooFewSamples) for n < 2.
Split unparalleled_split(std::size_t n, std::uint64_t seed);

}  // namespace paralab::manipulate
