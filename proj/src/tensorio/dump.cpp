// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#include "paralab/tensorio/dump.hpp"

#include <cmath>

#include "paralab/common/error.hpp"
#include "paralab/common/hash.hpp"
#include "paralab/tensorio/binary_io.hpp"

namespace paralab::tensorio {
namespace {

constexpr std::string_view kMagic = "ACTD";
constexpr std::uint32_t kVersion = 1;

}  // namespace

std::size_t ActivationDump::expected_values() const {
  std::size_t n = static_cast<std::size_t>(n_sentences) * n_taps * n_neurons;
  if (layout == DumpLayout::Raw) n *= n_tokens;
  return n;
}

int ActivationDump::find_tap(TapId tap) const {
  for (std::size_t i = 0; i < taps.size(); ++i) {
    if (taps[i] == tap) return static_cast<int>(i);
  }
  return -1;
}

void ActivationDump::validate() const {
  if (taps.size() != n_taps) {
    fail(ErrorCode::SizeMismatch, "tap label count " + std::to_string(taps.size()) +
                                      " differs from n_taps " + std::to_string(n_taps));
  }
  if (values.size() != expected_values()) {
    fail(ErrorCode::SizeMismatch, "dump declares " + std::to_string(expected_values()) +
                                      " values but holds " + std::to_string(values.size()));
  }
  if (layout == DumpLayout::Raw) {
    if (token_counts.size() != n_sentences) {
      fail(ErrorCode::SizeMismatch, "raw dump needs one token count per sentence");
    }
    for (auto count : token_counts) {
      if (count > n_tokens) fail(ErrorCode::SizeMismatch, "token count exceeds token axis");
    }
  } else if (!token_counts.empty()) {
    fail(ErrorCode::InvalidArgument, "pooled dump must not carry token counts");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      fail(ErrorCode::NonFiniteValue, "non-finite activation at flat index " + std::to_string(i));
    }
  }
}

std::string encode_dump(const ActivationDump& dump) {
  dump.validate();
  ByteWriter w;
  w.bytes(kMagic);
  w.u32(kVersion);
  w.u8(static_cast<std::uint8_t>(dump.layout));
  w.u32(dump.n_sentences);
  if (dump.layout == DumpLayout::Raw) w.u32(dump.n_tokens);
  w.u32(dump.n_taps);
  w.u32(dump.n_neurons);
  for (const auto& tap : dump.taps) w.string(tap_label(tap));
  for (auto count : dump.token_counts) w.u32(count);
  w.u64(dump.values.size());
  for (float v : dump.values) w.f32(v);
  return w.take();
}

ActivationDump decode_dump(std::string_view bytes) {
  ByteReader r(bytes);
  if (bytes.size() < kMagic.size() || r.bytes(kMagic.size()) != kMagic) {
    fail(ErrorCode::BadMagic, "not an ACTD file");
  }
  if (const auto version = r.u32(); version != kVersion) {
    fail(ErrorCode::UnsupportedVersion, "ACTD version " + std::to_string(version));
  }
  ActivationDump dump;
  const auto layout = r.u8();
  if (layout > 1) fail(ErrorCode::SizeMismatch, "unknown layout " + std::to_string(layout));
  dump.layout = static_cast<DumpLayout>(layout);
  dump.n_sentences = r.u32();
  if (dump.layout == DumpLayout::Raw) dump.n_tokens = r.u32();
  dump.n_taps = r.u32();
  dump.n_neurons = r.u32();
  for (std::uint32_t i = 0; i < dump.n_taps; ++i) dump.taps.push_back(parse_tap(r.string()));
  if (dump.layout == DumpLayout::Raw) {
    dump.token_counts.resize(dump.n_sentences);
    for (auto& count : dump.token_counts) count = r.u32();
  }
  const auto n_values = r.u64();
  if (n_values != dump.expected_values()) {
    fail(ErrorCode::SizeMismatch, "declared dimensions give " +
                                      std::to_string(dump.expected_values()) +
                                      " values, header says " + std::to_string(n_values));
  }
  if (r.remaining() != n_values * 4) {
    fail(ErrorCode::SizeMismatch, "payload holds " + std::to_string(r.remaining() / 4) +
                                      " floats, expected " + std::to_string(n_values));
  }
  dump.values.resize(n_values);
  for (auto& v : dump.values) v = r.f32();
  dump.validate();
  return dump;
}

nlohmann::json meta_to_json(const DumpMeta& meta) {
  return nlohmann::json{{"model_id", meta.model_id},
                        {"seed", meta.seed},
                        {"pooling", meta.pooling},
                        {"corpus_hash", meta.corpus_hash},
                        {"extra", meta.extra}};
}

DumpMeta meta_from_json(const nlohmann::json& j) {
  DumpMeta meta;
  try {
    meta.model_id = j.value("model_id", "");
    meta.seed = j.value("seed", std::uint64_t{0});
    meta.pooling = j.value("pooling", "");
    meta.corpus_hash = j.value("corpus_hash", "");
    meta.extra = j.value("extra", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::MalformedJson, std::string("bad dump metadata: ") + e.what());
  }
  return meta;
}

std::filesystem::path meta_path_for(const std::filesystem::path& dump_path) {
  auto meta = dump_path;
  meta.replace_extension(".meta.json");
  return meta;
}

void write_dump(const ActivationDump& dump, const std::filesystem::path& path) {
  write_file(path, encode_dump(dump));
  write_file(meta_path_for(path), meta_to_json(dump.meta).dump(2) + "\n");
}

ActivationDump read_dump(const std::filesystem::path& path) {
  auto dump = decode_dump(read_file(path));
  const auto meta_path = meta_path_for(path);
  if (std::filesystem::exists(meta_path)) {
    try {
      dump.meta = meta_from_json(nlohmann::json::parse(read_file(meta_path)));
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorCode::MalformedJson, meta_path.string() + ": " + e.what());
    }
  }
  return dump;
}

}  // namespace paralab::tensorio
