// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "paralab/tensorio/tap.hpp"

namespace paralab::tensorio {

enum class DumpLayout : std::uint8_t {
  Raw = 0,     // sentence x token x tap x neuron (tokens zero-padded)
  Pooled = 1,  // sentence x tap x neuron
};

/// Sidecar metadata, stored next to the binary as "<stem>.meta.json".
struct DumpMeta {
  std::string model_id;
  std::uint64_t seed = 0;
  std::string pooling;  // "none" for raw dumps
  std::string corpus_hash;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const DumpMeta&) const = default;
};

/// Activation tensor exchanged between the model (toy or exporter) and the
/// analysis code.
///
/// Binary layout ("ACTD", all little-endian):
///   magic "ACTD" | u32 version = 1 | u8 layout
///   | u32 dims (Raw: sentences, tokens, taps, neurons;
///               Pooled: sentences, taps, neurons)
///   | n_taps x (u32 length + UTF-8 tap label)
///   | Raw only: n_sentences x u32 token count
///   | u64 value count | value count x f32
struct ActivationDump {
  DumpLayout layout = DumpLayout::Pooled;
  std::uint32_t n_sentences = 0;
  std::uint32_t n_tokens = 0;  // padded token axis; Raw only
  std::uint32_t n_taps = 0;
  std::uint32_t n_neurons = 0;
  std::vector<TapId> taps;
  std::vector<std::uint32_t> token_counts;  // Raw only; each <= n_tokens
  std::vector<float> values;
  DumpMeta meta;

  std::size_t expected_values() const;
  /// Index of `tap` in `taps`, or -1.
  int find_tap(TapId tap) const;

  float raw_at(std::size_t sentence, std::size_t token, std::size_t tap,
               std::size_t neuron) const {
    return values[((sentence * n_tokens + token) * n_taps + tap) * n_neurons + neuron];
  }
  float pooled_at(std::size_t sentence, std::size_t tap, std::size_t neuron) const {
    return values[(sentence * n_taps + tap) * n_neurons + neuron];
  }

  /// Throws SizeMismatch / NonFiniteValue / InvalidArgument on violations.
  void validate() const;

  bool operator==(const ActivationDump&) const = default;
};

std::string encode_dump(const ActivationDump& dump);
ActivationDump decode_dump(std::string_view bytes);

std::filesystem::path meta_path_for(const std::filesystem::path& dump_path);
void write_dump(const ActivationDump& dump, const std::filesystem::path& path);
/// Reads the binary and, when present, its metadata sidecar.
ActivationDump read_dump(const std::filesystem::path& path);

nlohmann::json meta_to_json(const DumpMeta& meta);
DumpMeta meta_from_json(const nlohmann::json& j);

}  // namespace paralab::tensorio
