// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include <json.hpp>

#include "paralab/cli/config.hpp"

namespace paralab::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr std::string_view kManifestName = "manifest.json";

/// Creates `<root>/<command>-NNNN` with the next unused number.
std::filesystem::path create_run_dir(const std::filesystem::path& root, std::string_view command);

/// Git blob hash of a file, or {relative path: hash} for a directory.
nlohmann::json content_hash(const std::filesystem::path& path);

/// {relative path: hash} of every file under `dir` except the manifest.
nlohmann::json output_hashes(const std::filesystem::path& dir);

/// {key: {"path", "hash"}} for the command's input options that are set.
nlohmann::json input_hashes(const CommandDef& cmd, const nlohmann::json& config);

/// Runs the command in a fresh run directory and writes its manifest.
/// A failed run leaves no directory behind.
std::filesystem::path execute(const CommandDef& cmd, const nlohmann::json& config,
                              std::ostream& log, const nlohmann::json& provenance = nullptr);

}  // namespace paralab::cli
