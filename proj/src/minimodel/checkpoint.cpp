// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#include "paralab/minimodel/checkpoint.hpp"

#include <cmath>

#include "paralab/common/error.hpp"
#include "paralab/common/hash.hpp"
#include "paralab/tensorio/binary_io.hpp"

namespace paralab::minimodel {

namespace {
constexpr std::string_view kMagic = "MPAR";
constexpr std::uint32_t kVersion = 1;
}  // namespace

std::string encode_params(const ModelParams& params) {
  tensorio::ByteWriter w;
  w.bytes(kMagic);
  w.u32(kVersion);
  auto all = params.tensors();
  w.u32(static_cast<std::uint32_t>(all.size()));
  for (const auto& t : all) {
    w.string(t.name);
    w.u32(static_cast<std::uint32_t>(t.tensor->rows()));
    w.u32(static_cast<std::uint32_t>(t.tensor->cols()));
    for (Eigen::Index i = 0; i < t.tensor->size(); ++i) w.f64(t.tensor->data()[i]);
  }
  return w.take();
}

ModelParams decode_params(const std::string& bytes, const ModelConfig& config) {
  tensorio::ByteReader r(bytes);
  if (bytes.size() < 4 || r.bytes(4) != kMagic) fail(ErrorCode::BadMagic, "not an MPAR checkpoint");
  const std::uint32_t version = r.u32();
  if (version != kVersion) {
    fail(ErrorCode::UnsupportedVersion, "checkpoint version " + std::to_string(version));
  }
  ModelParams params = zero_params(config);
  auto all = params.tensors();
  if (r.u32() != all.size()) fail(ErrorCode::SizeMismatch, "tensor count differs from config");
  for (auto& t : all) {
    const std::string name = r.string();
    if (name != t.name) fail(ErrorCode::SizeMismatch, "expected tensor " + t.name + ", found " + name);
    const std::uint32_t rows = r.u32(), cols = r.u32();
    if (rows != t.tensor->rows() || cols != t.tensor->cols()) {
      fail(ErrorCode::SizeMismatch, "shape of " + name + " differs from config");
    }
    for (Eigen::Index i = 0; i < t.tensor->size(); ++i) {
      const double v = r.f64();
      if (!std::isfinite(v)) fail(ErrorCode::NonFiniteValue, "non-finite weight in " + name);
      t.tensor->data()[i] = v;
    }
  }
  if (r.remaining() != 0) fail(ErrorCode::SizeMismatch, "trailing bytes in checkpoint");
  return params;
}

std::filesystem::path config_path_for(const std::filesystem::path& checkpoint) {
  std::filesystem::path p = checkpoint;
  p.replace_extension(".config.json");
  return p;
}

void save_checkpoint(const ModelParams& params, const std::filesystem::path& path) {
  write_file(path, encode_params(params));
  write_file(config_path_for(path), params.config.to_json().dump(2) + "\n");
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
  const std::string cfg_text = read_file(config_path_for(path));
  nlohmann::json cfg = nlohmann::json::parse(cfg_text, nullptr, false);
  if (cfg.is_discarded()) fail(ErrorCode::MalformedJson, "bad model config next to " + path.string());
  return decode_params(read_file(path), ModelConfig::from_json(cfg));
}

}  // namespace paralab::minimodel
