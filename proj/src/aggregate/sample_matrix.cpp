// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#include "paralab/aggregate/sample_matrix.hpp"

#include "paralab/common/error.hpp"

namespace paralab::aggregate {

using tensorio::ActivationDump;
using tensorio::DumpLayout;

std::string_view pooling_name(Pooling p) {
  switch (p) {
    case Pooling::Mean: return "mean";
    case Pooling::Min: return "min";
    case Pooling::Max: return "max";
  }
  return "mean";
}

Pooling parse_pooling(std::string_view name) {
  if (name == "mean") return Pooling::Mean;
  if (name == "min") return Pooling::Min;
  if (name == "max") return Pooling::Max;
  fail(ErrorCode::InvalidArgument, "unknown pooling '" + std::string(name) + "'");
}

std::string_view token_mode_name(TokenMode m) {
  return m == TokenMode::LastSubword ? "last-subword" : "all-subwords";
}

TokenMode parse_token_mode(std::string_view name) {
  if (name == "last-subword") return TokenMode::LastSubword;
  if (name == "all-subwords") return TokenMode::AllSubwords;
  fail(ErrorCode::InvalidArgument, "unknown token mode '" + std::string(name) + "'");
}

std::vector<std::size_t> select_tokens(const tensorio::TokenSequence& seq, TokenMode mode) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq.specials_mask[i]) continue;
    if (mode == TokenMode::AllSubwords || seq.last_subword_mask[i]) out.push_back(i);
  }
  if (out.empty()) fail(ErrorCode::EmptySelection, "sentence has no poolable token");
  return out;
}

Eigen::RowVectorXd pool(const Matrix& tokens, std::span<const std::size_t> indices,
                        Pooling method) {
  if (indices.empty()) fail(ErrorCode::EmptySelection, "nothing to pool");
  Eigen::RowVectorXd acc = tokens.row(static_cast<Eigen::Index>(indices[0]));
  for (std::size_t i = 1; i < indices.size(); ++i) {
    auto row = tokens.row(static_cast<Eigen::Index>(indices[i]));
    switch (method) {
      case Pooling::Mean: acc += row; break;
      case Pooling::Min: acc = acc.cwiseMin(row); break;
      case Pooling::Max: acc = acc.cwiseMax(row); break;
    }
  }
  if (method == Pooling::Mean) acc /= static_cast<double>(indices.size());
  return acc;
}

Matrix sentence_tokens(const ActivationDump& dump, std::size_t sentence, std::size_t tap_index) {
  if (dump.layout != DumpLayout::Raw) fail(ErrorCode::NeedRawDump, "token access needs a raw dump");
  const std::size_t n = dump.token_counts.at(sentence);
  Matrix m(static_cast<Eigen::Index>(n), dump.n_neurons);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t k = 0; k < dump.n_neurons; ++k) {
      m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) =
          dump.raw_at(sentence, t, tap_index, k);
    }
  }
  return m;
}

SampleMatrix build_sample_matrix(const ActivationDump& dump,
                                 std::span<const tensorio::TokenSequence> sentences,
                                 std::size_t first_row, std::span<const tensorio::TapId> taps,
                                 Pooling pooling, TokenMode mode) {
  if (dump.layout != DumpLayout::Raw) {
    fail(ErrorCode::NeedRawDump, "pooling needs a raw (per-token) dump");
  }
  if (taps.empty()) fail(ErrorCode::InvalidArgument, "no taps selected");
  if (first_row + sentences.size() > dump.n_sentences) {
    fail(ErrorCode::SizeMismatch, "dump has " + std::to_string(dump.n_sentences) +
                                      " sentences, need rows up to " +
                                      std::to_string(first_row + sentences.size()));
  }
  std::vector<std::size_t> tap_index;
  for (const auto& t : taps) {
    const int idx = dump.find_tap(t);
    if (idx < 0) fail(ErrorCode::TapMissing, "dump has no tap " + tensorio::tap_label(t));
    tap_index.push_back(static_cast<std::size_t>(idx));
  }
  SampleMatrix out;
  out.taps.assign(taps.begin(), taps.end());
  out.pooling = pooling;
  out.token_mode = mode;
  out.corpus_hash = dump.meta.corpus_hash;
  const Eigen::Index d = dump.n_neurons;
  out.values.resize(static_cast<Eigen::Index>(sentences.size()),
                    d * static_cast<Eigen::Index>(taps.size()));
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const std::size_t row = first_row + s;
    if (dump.token_counts[row] != sentences[s].size()) {
      fail(ErrorCode::LengthMismatch, "sentence " + std::to_string(s) + " has " +
                                          std::to_string(sentences[s].size()) +
                                          " tokens but dump row " + std::to_string(row) +
                                          " has " + std::to_string(dump.token_counts[row]));
    }
    const auto idx = select_tokens(sentences[s], mode);
    for (std::size_t t = 0; t < tap_index.size(); ++t) {
      out.values.block(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t) * d, 1, d) =
          pool(sentence_tokens(dump, row, tap_index[t]), idx, pooling);
    }
  }
  return out;
}

SampleMatrix select_rows(const SampleMatrix& m, std::span<const std::size_t> rows) {
  SampleMatrix out = m;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), m.values.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.values.row(static_cast<Eigen::Index>(i)) = m.values.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

ActivationDump to_pooled_dump(const SampleMatrix& m) {
  if (m.taps.empty() || m.cols() % m.taps.size() != 0) {
    fail(ErrorCode::SizeMismatch, "sample columns do not split evenly over taps");
  }
  ActivationDump d;
  d.layout = DumpLayout::Pooled;
  d.n_sentences = static_cast<std::uint32_t>(m.rows());
  d.n_taps = static_cast<std::uint32_t>(m.taps.size());
  d.n_neurons = static_cast<std::uint32_t>(m.cols() / m.taps.size());
  d.taps = m.taps;
  d.values.resize(m.rows() * m.cols());
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    d.values[i] = static_cast<float>(m.values.data()[i]);
  }
  d.meta.pooling = std::string(pooling_name(m.pooling));
  d.meta.corpus_hash = m.corpus_hash;
  d.meta.extra["token_mode"] = std::string(token_mode_name(m.token_mode));
  return d;
}

SampleMatrix from_pooled_dump(const ActivationDump& d) {
  if (d.layout != DumpLayout::Pooled) fail(ErrorCode::InvalidArgument, "expected a pooled dump");
  SampleMatrix m;
  m.taps = d.taps;
  m.values.resize(d.n_sentences, static_cast<Eigen::Index>(d.n_taps) * d.n_neurons);
  for (std::size_t i = 0; i < d.values.size(); ++i) m.values.data()[i] = d.values[i];
  if (!d.meta.pooling.empty()) m.pooling = parse_pooling(d.meta.pooling);
  if (d.meta.extra.contains("token_mode")) {
    m.token_mode = parse_token_mode(d.meta.extra["token_mode"].get<std::string>());
  }
  m.corpus_hash = d.meta.corpus_hash;
  return m;
}

}  // namespace paralab::aggregate
