// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "paralab/cli/config.hpp"

namespace paralab::cli {

inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;

const std::vector<CommandDef>& commands();
const CommandDef* find_command(std::string_view name);

/// Replays a manifest into a new run directory and checks that every CSV
/// output is byte-identical.
std::filesystem::path replay(const std::filesystem::path& manifest,
                             const std::filesystem::path& out_root, std::ostream& log);

/// `args` excludes the program name. Errors go to `err` as one JSON line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace paralab::cli
