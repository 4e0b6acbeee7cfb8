// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#include "paralab/minimodel/train.hpp"

#include <cmath>
#include <numbers>

#include "paralab/common/error.hpp"
#include "paralab/common/rng.hpp"

namespace paralab::minimodel {

nlohmann::json TrainOptions::to_json() const {
  return {{"steps", steps},         {"batch_size", batch_size}, {"learning_rate", learning_rate},
          {"warmup_steps", warmup_steps}, {"beta1", beta1},     {"beta2", beta2},
          {"epsilon", epsilon},     {"clip_norm", clip_norm},   {"seed", seed}};
}

TrainOptions TrainOptions::from_json(const nlohmann::json& j) {
  TrainOptions o;
  try {
    o.steps = j.value("steps", o.steps);
    o.batch_size = j.value("batch_size", o.batch_size);
    o.learning_rate = j.value("learning_rate", o.learning_rate);
    o.warmup_steps = j.value("warmup_steps", o.warmup_steps);
    o.beta1 = j.value("beta1", o.beta1);
    o.beta2 = j.value("beta2", o.beta2);
    o.epsilon = j.value("epsilon", o.epsilon);
    o.clip_norm = j.value("clip_norm", o.clip_norm);
    o.seed = j.value("seed", o.seed);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::BadConfig, std::string("train options: ") + e.what());
  }
  return o;
}

double learning_rate_at(const TrainOptions& o, int step) {
  if (o.warmup_steps > 0 && step < o.warmup_steps) {
    return o.learning_rate * static_cast<double>(step + 1) / o.warmup_steps;
  }
  const int decay = std::max(1, o.steps - o.warmup_steps);
  const double t = static_cast<double>(step - o.warmup_steps) / decay;
  return o.learning_rate * 0.5 * (1.0 + std::cos(std::numbers::pi * std::min(t, 1.0)));
}

TrainResult train(ModelParams params, std::span<const TrainExample> data,
                  const TrainOptions& o, const TrainProgress& progress) {
  if (o.steps < 0 || o.batch_size < 1) fail(ErrorCode::BadConfig, "steps >= 0 and batch_size >= 1");
  TrainResult result;
  if (o.steps > 0 && data.empty()) fail(ErrorCode::EmptyInput, "no training examples");
  Rng rng(o.seed, 0x7a11);
  ModelParams m = zero_params(params.config);
  ModelParams v = zero_params(params.config);
  ModelParams grads = zero_params(params.config);
  auto p_t = params.tensors();
  auto m_t = m.tensors();
  auto v_t = v.tensors();
  auto g_t = grads.tensors();
  std::vector<TrainExample> batch(static_cast<size_t>(o.batch_size));
  for (int step = 0; step < o.steps; ++step) {
    for (auto& ex : batch) ex = data[rng.uniform_index(data.size())];
    for (auto& g : g_t) g.tensor->setZero();
    const double loss = batch_loss(params, batch, &grads);
    if (!std::isfinite(loss)) {
      fail(ErrorCode::Divergence, "loss became non-finite at step " + std::to_string(step));
    }
    result.loss_trace.push_back(loss);
    double scale = 1.0;
    if (o.clip_norm > 0) {
      double sq = 0.0;
      for (auto& g : g_t) sq += g.tensor->squaredNorm();
      const double norm = std::sqrt(sq);
      if (norm > o.clip_norm) scale = o.clip_norm / norm;
    }
    const double lr = learning_rate_at(o, step);
    const double c1 = 1.0 - std::pow(o.beta1, step + 1);
    const double c2 = 1.0 - std::pow(o.beta2, step + 1);
    for (size_t t = 0; t < p_t.size(); ++t) {
      auto g = g_t[t].tensor->array() * scale;
      auto& mt = *m_t[t].tensor;
      auto& vt = *v_t[t].tensor;
      mt.array() = o.beta1 * mt.array() + (1.0 - o.beta1) * g;
      vt.array() = o.beta2 * vt.array() + (1.0 - o.beta2) * g.square();
      p_t[t].tensor->array() -=
          lr * (mt.array() / c1) / ((vt.array() / c2).sqrt() + o.epsilon);
    }
    if (progress) progress(step, loss);
  }
  result.params = std::move(params);
  return result;
}

double sequence_accuracy(const ModelParams& params, std::span<const TrainExample> data,
                         const EncoderHook& hook) {
  if (data.empty()) fail(ErrorCode::EmptyInput, "no examples to score");
  constexpr size_t kChunk = 64;
  size_t correct = 0;
  for (size_t start = 0; start < data.size(); start += kChunk) {
    const size_t end = std::min(data.size(), start + kChunk);
    std::vector<std::vector<int>> sources;
    for (size_t i = start; i < end; ++i) sources.push_back(data[i].source);
    auto decoded = greedy_decode_batch(params, sources, params.config.max_positions, hook);
    for (size_t i = start; i < end; ++i) {
      if (!decoded[i - start].truncated && decoded[i - start].token_ids == data[i].target) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace paralab::minimodel
