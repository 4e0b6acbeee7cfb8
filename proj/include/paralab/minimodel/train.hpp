// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <json.hpp>

#include "paralab/minimodel/model.hpp"

namespace paralab::minimodel {

/// Adam with linear warmup followed by cosine decay to zero.
struct TrainOptions {
  int steps = 2000;
  int batch_size = 32;
  double learning_rate = 3e-3;
  int warmup_steps = 200;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double epsilon = 1e-9;
  double clip_norm = 1.0;  // global gradient norm; <= 0 disables
  std::uint64_t seed = 1;  // batch sampling

  nlohmann::json to_json() const;
  static TrainOptions from_json(const nlohmann::json& j);
};

double learning_rate_at(const TrainOptions& options, int step);

struct TrainResult {
  ModelParams params;
  std::vector<double> loss_trace;  // one entry per step
};

using TrainProgress = std::function<void(int step, double loss)>;

/// Throws Error(Divergence) naming the step when the loss stops being finite.
TrainResult train(ModelParams params, std::span<const TrainExample> data,
                  const TrainOptions& options, const TrainProgress& progress = {});

/// Fraction of examples whose greedy decode equals the target exactly.
double sequence_accuracy(const ModelParams& params, std::span<const TrainExample> data,
                         const EncoderHook& hook = {});

}  // namespace paralab::minimodel
