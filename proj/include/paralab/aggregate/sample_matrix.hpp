// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "paralab/tensorio/corpus.hpp"
#include "paralab/tensorio/dump.hpp"

// Sentence-level samples: each sentence contributes one value per neuron,
// obtained by pooling its token activations. Position-wise alignment and
// functional-correspondence alignment of tokens across sentences are not
// offered; they assume a token-level correspondence paraphrases lack.
namespace paralab::aggregate {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Pooling { Mean, Min, Max };
enum class TokenMode { LastSubword, AllSubwords };

std::string_view pooling_name(Pooling p);
Pooling parse_pooling(std::string_view name);
std::string_view token_mode_name(TokenMode m);
TokenMode parse_token_mode(std::string_view name);

/// Token positions that take part in pooling. Specials never do.
/// Throws Error(EmptySelection) when nothing is selected.
std::vector<std::size_t> select_tokens(const tensorio::TokenSequence& seq, TokenMode mode);

/// Element-wise pooling over the rows of `tokens` named by `indices`.
Eigen::RowVectorXd pool(const Matrix& tokens, std::span<const std::size_t> indices,
                        Pooling method);

/// n_sentences x n_neurons samples. When several taps are selected their
/// neurons are concatenated in tap order, so with the block-output taps the
/// column of (block b, dim k) is b * d + k.
struct SampleMatrix {
  Matrix values;
  std::vector<tensorio::TapId> taps;
  Pooling pooling = Pooling::Mean;
  TokenMode token_mode = TokenMode::LastSubword;
  std::string corpus_hash;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
};

/// Token activations (tokens x neurons) of one sentence at one tap.
Matrix sentence_tokens(const tensorio::ActivationDump& dump, std::size_t sentence,
                       std::size_t tap_index);

/// Pools dump rows [first_row, first_row + sentences.size()); `sentences`
/// supplies the masks of those rows. Requires a Raw dump.
SampleMatrix build_sample_matrix(const tensorio::ActivationDump& dump,
                                 std::span<const tensorio::TokenSequence> sentences,
                                 std::size_t first_row, std::span<const tensorio::TapId> taps,
                                 Pooling pooling = Pooling::Mean,
                                 TokenMode mode = TokenMode::LastSubword);

/// Row subset in the given order.
SampleMatrix select_rows(const SampleMatrix& m, std::span<const std::size_t> rows);

/// Serialized as a Pooled ActivationDump (one tap slot per selected tap).
tensorio::ActivationDump to_pooled_dump(const SampleMatrix& m);
SampleMatrix from_pooled_dump(const tensorio::ActivationDump& dump);

}  // namespace paralab::aggregate
