// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include "paralab/minimodel/model.hpp"

namespace paralab::minimodel {

/// Checkpoint layout (little-endian):
///   magic "MPAR" | u32 version = 1 | u32 tensor count
///   | per tensor: u32 name length + name | u32 rows | u32 cols | f64 values
/// The model config lives in "<stem>.config.json" next to the binary.
std::string encode_params(const ModelParams& params);
ModelParams decode_params(const std::string& bytes, const ModelConfig& config);

std::filesystem::path config_path_for(const std::filesystem::path& checkpoint);
void save_checkpoint(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_checkpoint(const std::filesystem::path& path);

}  // namespace paralab::minimodel
