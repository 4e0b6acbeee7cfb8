// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace paralab::cli {

enum class OptionType { String, Path, Int, Double, Bool, StringList, IntList };

struct OptionDef {
  std::string key;  // also the flag name: --key
  OptionType type = OptionType::String;
  nlohmann::json fallback;  // null leaves the key unset
  std::string help;
  bool required = false;
  bool input = false;  // content-hashed into the manifest; must exist
};

struct RunContext {
  std::filesystem::path dir;
  std::ostream& log;

  std::filesystem::path file(const std::string& name) const { return dir / name; }
};

struct CommandDef {
  std::string name;
  std::string help;
  std::vector<OptionDef> options;
  std::function<void(const nlohmann::json& config, RunContext& run)> execute;
};

/// Defaults, then the config file, then explicit flag values. Relative paths
/// resolve against `base`. Throws Error(Usage) on unknown keys, type errors and
/// missing required keys.
void merge_config(const CommandDef& cmd, nlohmann::json& config, const nlohmann::json& values,
                  const std::filesystem::path& base);
nlohmann::json default_config(const CommandDef& cmd);
void check_required(const CommandDef& cmd, const nlohmann::json& config);

/// Converts one flag's raw strings into the option's JSON value.
nlohmann::json parse_flag(const OptionDef& opt, const std::vector<std::string>& raw);

}  // namespace paralab::cli
