// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#include "paralab/manipulate/manipulate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>

#include "paralab/common/error.hpp"
#include "paralab/common/rng.hpp"

namespace paralab::manipulate {

using tensorio::TapId;
using tensorio::TapSite;

Eigen::RowVectorXd mean_activation(const SampleMatrix& m) {
  if (m.rows() == 0) fail(ErrorCode::EmptyInput, "mean of an empty sample matrix");
  Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(m.values.cols());
  for (Eigen::Index r = 0; r < m.values.rows(); ++r) mean += m.values.row(r);
  return mean / static_cast<double>(m.rows());
}

DirectionSpec direction_between(const Eigen::RowVectorXd& mean_c1,
                                const Eigen::RowVectorXd& mean_c2) {
  if (mean_c1.size() != mean_c2.size()) {
    fail(ErrorCode::SizeMismatch, "condition means differ in length");
  }
  DirectionSpec d;
  d.mean_c1 = mean_c1;
  d.mean_c2 = mean_c2;
  d.delta = mean_c1 - mean_c2;
  d.norm = d.delta.norm();
  return d;
}

DirectionSpec direction_between(const SampleMatrix& c1, const SampleMatrix& c2) {
  return direction_between(mean_activation(c1), mean_activation(c2));
}

DirectionSpec random_direction(const Eigen::RowVectorXd& mean_c1, std::uint64_t seed) {
  Rng rng(seed, 0xd1ec);
  Eigen::RowVectorXd y(mean_c1.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = rng.normal();
  DirectionSpec d = direction_between(mean_c1, y);
  d.random = true;
  d.seed = seed;
  return d;
}

namespace {
constexpr std::array<std::string_view, 5> kSelectionNames = {
    "top-paracorr", "bottom-paracorr", "random", "layer-random", "explicit"};
}

std::string_view selection_name(SelectionKind k) {
  return kSelectionNames[static_cast<std::size_t>(k)];
}

SelectionKind parse_selection(std::string_view name) {
  for (std::size_t i = 0; i < kSelectionNames.size(); ++i) {
    if (kSelectionNames[i] == name) return static_cast<SelectionKind>(i);
  }
  fail(ErrorCode::InvalidArgument, "unknown selection '" + std::string(name) + "'");
}

std::vector<std::size_t> rank_neurons(std::span<const double> scores, Order order) {
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (std::isnan(scores[i])) fail(ErrorCode::NanScore, "NaN score for neuron " + std::to_string(i));
  }
  std::vector<std::size_t> ids(scores.size());
  std::iota(ids.begin(), ids.end(), 0);
  std::stable_sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
    return order == Order::Desc ? scores[a] > scores[b] : scores[a] < scores[b];
  });
  return ids;
}

std::vector<std::size_t> resolve_selection(const NeuronSelection& sel,
                                           std::span<const double> scores, std::size_t total,
                                           std::size_t per_layer) {
  if (sel.kind == SelectionKind::Explicit) {
    std::set<std::size_t> seen;
    for (auto id : sel.ids) {
      if (id >= total) fail(ErrorCode::InvalidSelection, "neuron id " + std::to_string(id) + " out of range");
      if (!seen.insert(id).second) fail(ErrorCode::InvalidSelection, "duplicate neuron id " + std::to_string(id));
    }
    return sel.ids;
  }
  if (sel.k > total) {
    fail(ErrorCode::InvalidSelection, "k = " + std::to_string(sel.k) + " exceeds " +
                                          std::to_string(total) + " neurons");
  }
  const bool needs_scores = sel.kind != SelectionKind::RandomK;
  if (needs_scores && scores.size() != total) {
    fail(ErrorCode::InvalidSelection, "selection needs one score per neuron");
  }
  switch (sel.kind) {
    case SelectionKind::TopParaCorr:
    case SelectionKind::BottomParaCorr: {
      auto ranked = rank_neurons(scores, sel.kind == SelectionKind::TopParaCorr ? Order::Desc : Order::Asc);
      ranked.resize(sel.k);
      return ranked;
    }
    case SelectionKind::RandomK: {
      std::vector<std::size_t> ids(total);
      std::iota(ids.begin(), ids.end(), 0);
      Rng rng(sel.seed, 0x5e1c);
      rng.shuffle(std::span<std::size_t>(ids));
      ids.resize(sel.k);
      return ids;
    }
    case SelectionKind::LayerStratifiedRandomK: {
      if (per_layer == 0 || total % per_layer != 0) {
        fail(ErrorCode::InvalidSelection, "neurons do not split into layers");
      }
      auto top = rank_neurons(scores, Order::Desc);
      top.resize(sel.k);
      std::vector<std::size_t> quota(total / per_layer, 0);
      for (auto id : top) quota[id / per_layer]++;
      Rng rng(sel.seed, 0x5e1d);
      std::vector<std::size_t> out;
      for (std::size_t layer = 0; layer < quota.size(); ++layer) {
        std::vector<std::size_t> ids(per_layer);
        std::iota(ids.begin(), ids.end(), layer * per_layer);
        rng.shuffle(std::span<std::size_t>(ids));
        out.insert(out.end(), ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(quota[layer]));
      }
      return out;
    }
    case SelectionKind::Explicit:
      break;
  }
  return {};
}

double ManipulationPlan::beta() const {
  if (alpha == 0.0) return 0.0;
  return alpha / direction.norm;
}

ManipulationPlan make_plan(DirectionSpec direction, std::vector<std::size_t> neurons,
                           double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    fail(ErrorCode::InvalidArgument, "alpha must be a finite non-negative number");
  }
  if (alpha > 0.0 && direction.norm == 0.0) {
    fail(ErrorCode::ZeroNorm, "condition means coincide; the direction has zero norm");
  }
  std::set<std::size_t> seen;
  for (auto id : neurons) {
    if (id >= static_cast<std::size_t>(direction.delta.size())) {
      fail(ErrorCode::InvalidSelection, "neuron id " + std::to_string(id) + " out of range");
    }
    if (!seen.insert(id).second) fail(ErrorCode::InvalidSelection, "duplicate neuron id");
  }
  return ManipulationPlan{std::move(direction), std::move(neurons), alpha};
}

void apply(const ManipulationPlan& plan, Matrix& activations) {
  if (activations.cols() != plan.direction.delta.size()) {
    fail(ErrorCode::SizeMismatch, "activation width differs from the direction");
  }
  apply_layer(plan, 0, static_cast<std::size_t>(activations.cols()), activations);
}

void apply_layer(const ManipulationPlan& plan, std::size_t layer, std::size_t per_layer,
                 Matrix& activations) {
  const double beta = plan.beta();
  if (beta == 0.0) return;
  const std::size_t lo = layer * per_layer, hi = lo + per_layer;
  for (auto id : plan.neurons) {
    if (id < lo || id >= hi) continue;
    const double shift = beta * plan.direction.delta[static_cast<Eigen::Index>(id)];
    activations.col(static_cast<Eigen::Index>(id - lo)).array() -= shift;
  }
}

void erase(std::span<const std::size_t> ids, Matrix& activations) {
  erase_layer(ids, 0, static_cast<std::size_t>(activations.cols()), activations);
}

void erase_layer(std::span<const std::size_t> ids, std::size_t layer, std::size_t per_layer,
                 Matrix& activations) {
  const std::size_t lo = layer * per_layer, hi = lo + per_layer;
  for (auto id : ids) {
    if (id >= lo && id < hi) activations.col(static_cast<Eigen::Index>(id - lo)).setZero();
  }
}

minimodel::EncoderHook manipulation_hook(const ManipulationPlan& plan,
                                         const minimodel::ModelConfig& config) {
  const std::size_t d = static_cast<std::size_t>(config.embed_dim);
  const auto last = static_cast<std::uint32_t>(config.n_encoder_blocks - 1);
  if (static_cast<std::size_t>(plan.direction.delta.size()) != d * (last + 1) &&
      static_cast<std::size_t>(plan.direction.delta.size()) != d) {
    fail(ErrorCode::SizeMismatch, "direction must cover the final block or every block output");
  }
  // A direction over the final block alone indexes it as layer 0.
  const std::size_t layer = plan.direction.delta.size() == static_cast<Eigen::Index>(d) ? 0 : last;
  return [plan, d, last, layer](TapId tap, minimodel::Mat& m) {
    if (tap != TapId{last, TapSite::PostResidualNorm2}) return;
    apply_layer(plan, layer, d, m);
  };
}

minimodel::EncoderHook erasure_hook(std::vector<std::size_t> ids,
                                    const minimodel::ModelConfig& config) {
  const std::size_t d = static_cast<std::size_t>(config.embed_dim);
  const auto last = static_cast<std::uint32_t>(config.n_encoder_blocks - 1);
  for (auto id : ids) {
    if (id >= d * (last + 1)) fail(ErrorCode::InvalidSelection, "neuron id out of range");
  }
  return [ids = std::move(ids), d, last](TapId tap, minimodel::Mat& m) {
    if (tap != TapId{last, TapSite::PostResidualNorm2}) return;
    erase_layer(ids, last, d, m);
  };
}

std::vector<GridRow> magnitude_grid(
    std::span<const double> alphas, const ManipulationPlan& base,
    const std::function<std::vector<std::pair<std::string, double>>(const ManipulationPlan&)>&
        evaluate) {
  std::vector<GridRow> rows;
  for (double a : alphas) {
    ManipulationPlan plan = make_plan(base.direction, base.neurons, a);
    rows.push_back({a, evaluate(plan)});
  }
  return rows;
}

Split unparalleled_split(std::size_t n, std::uint64_t seed) {
  if (n < 2) fail(ErrorCode::TooFewSamples, "a split needs at least two pairs");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed, 0x5b17);
  rng.shuffle(std::span<std::size_t>(idx));
  Split s;
  s.source_rows.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n / 2));
  s.paraphrase_rows.assign(idx.begin() + static_cast<std::ptrdiff_t>(n / 2), idx.end());
  return s;
}

}  // namespace paralab::manipulate
