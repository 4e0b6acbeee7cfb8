// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "paralab/minimodel/tape.hpp"
#include "paralab/tensorio/corpus.hpp"
#include "paralab/tensorio/tap.hpp"

namespace paralab::minimodel {

inline constexpr int kPadId = 0;
inline constexpr int kBosId = 1;
inline constexpr int kEosId = 2;
inline constexpr int kUnkId = 3;
inline constexpr int kNumSpecials = 4;

struct ModelConfig {
  int vocab_size = 64;
  int embed_dim = 32;
  int n_encoder_blocks = 4;
  int n_decoder_blocks = 2;
  int n_heads = 2;
  int ffn_dim = 64;
  int max_positions = 32;
  std::uint64_t seed = 1;

  /// Throws Error(BadConfig).
  void validate() const;
  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
  bool operator==(const ModelConfig&) const = default;
};

struct AttentionParams {
  Mat wq, bq, wk, bk, wv, bv, wo, bo;
};
struct NormParams {
  Mat gain, bias;
};
struct FfnParams {
  Mat w1, b1, w2, b2;
};
struct EncoderBlockParams {
  AttentionParams attention;
  NormParams norm1;
  FfnParams ffn;
  NormParams norm2;
};
struct DecoderBlockParams {
  AttentionParams self_attention;
  NormParams norm1;
  AttentionParams cross_attention;
  NormParams norm2;
  FfnParams ffn;
  NormParams norm3;
};

struct NamedTensor {
  std::string name;
  Mat* tensor;
};
struct ConstNamedTensor {
  std::string name;
  const Mat* tensor;
};

/// All weights of the encoder-decoder. Biases and gains are 1 x n rows;
/// projection weights are (in x out) so layers compute x W + b.
struct ModelParams {
  ModelConfig config;
  Mat source_embedding;  // vocab x d
  Mat target_embedding;  // vocab x d
  std::vector<EncoderBlockParams> encoder;
  std::vector<DecoderBlockParams> decoder;
  Mat output_weight;  // d x vocab
  Mat output_bias;

  /// Every tensor in a fixed canonical order.
  std::vector<NamedTensor> tensors();
  std::vector<ConstNamedTensor> tensors() const;
  std::size_t parameter_count() const;
  bool operator==(const ModelParams& other) const;
};

/// Tensors shaped like `config` describes, all zero.
ModelParams zero_params(const ModelConfig& config);
/// Projection weights and embeddings ~ N(0, 0.02) drawn with normal_at(seed,
/// tensor index, element index); gains 1, biases 0.
ModelParams init_model(const ModelConfig& config);

inline constexpr double kInitStd = 0.02;

double sinusoidal_pe(std::size_t position, std::size_t dim, std::size_t d);
/// n x d matrix of sinusoidal_pe values.
Mat positional_encoding(std::size_t n, std::size_t d);

/// Rewrites one sentence's activations (token x d) at a tap. Called for
/// every tap in execution order; changes propagate to later layers.
using EncoderHook = std::function<void(tensorio::TapId, Mat&)>;

struct EncodeOutput {
  std::vector<Mat> taps;  // indexed by TapId::ordinal(), each token x d

  const Mat& at(tensorio::TapId tap) const { return taps[tap.ordinal()]; }
  const Mat& final_states() const { return taps.back(); }
};

EncodeOutput forward_encode(const ModelParams& params, const tensorio::TokenSequence& tokens,
                            bool add_positions = true, const EncoderHook& hook = {});
/// Batched forward_encode; sentences are stacked along the row axis.
std::vector<EncodeOutput> forward_encode_batch(const ModelParams& params,
                                               std::span<const std::vector<int>> sentences,
                                               bool add_positions = true,
                                               const EncoderHook& hook = {});

struct TrainExample {
  std::vector<int> source;  // encoder input, including the trailing EOS
  std::vector<int> target;  // decoder output without BOS/EOS
};

/// Mean token cross-entropy of the batch (teacher forcing). When `grads`
/// is given it must be shaped like `params` and receives d loss / d param.
double batch_loss(const ModelParams& params, std::span<const TrainExample> batch,
                  ModelParams* grads = nullptr);

struct DecodeResult {
  std::vector<int> token_ids;  // without BOS/EOS
  bool truncated = false;      // max_len reached before EOS
};

/// Greedy argmax decoding. The hook, when given, rewrites encoder
/// activations before the decoder cross-attends to the final states.
DecodeResult greedy_decode(const ModelParams& params, std::span<const int> source, int max_len,
                           const EncoderHook& hook = {});
std::vector<DecodeResult> greedy_decode_batch(const ModelParams& params,
                                              std::span<const std::vector<int>> sources,
                                              int max_len, const EncoderHook& hook = {});

}  // namespace paralab::minimodel
