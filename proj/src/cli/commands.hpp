// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "paralab/cli/config.hpp"
#include "paralab/evaluate/report.hpp"
#include "paralab/tensorio/tap.hpp"

namespace paralab::cli {

CommandDef gen_paraphrases_command();
CommandDef evaluate_command();
CommandDef train_toy_command();
CommandDef dump_activations_command();
CommandDef manipulate_command();
CommandDef erase_command();
CommandDef correlate_command();
CommandDef overlap_command();
CommandDef plot_command();

OptionDef path_option(std::string key, std::string help, bool required = true);
OptionDef string_option(std::string key, std::string fallback, std::string help);
OptionDef int_option(std::string key, long long fallback, std::string help);
OptionDef flag_option(std::string key, std::string help);

std::string str(const nlohmann::json& config, const std::string& key);
bool is_set(const nlohmann::json& config, const std::string& key);
std::vector<std::size_t> size_list(const nlohmann::json& config, const std::string& key);

/// "block-outputs", "all" or explicit tap labels, resolved against `available`.
std::vector<tensorio::TapId> resolve_taps(const nlohmann::json& names,
                                          std::span<const tensorio::TapId> available);

/// k = 0, n/4, n/2, 3n/4, n.
std::vector<std::size_t> quartile_ks(std::size_t n);

/// report.csv, report.json and curves.svg.
void write_report(const evaluate::EvalReport& report, RunContext& run, const std::string& title,
                  const std::string& x_label, const std::string& y_label);

std::vector<std::string> read_lines(const std::filesystem::path& path);

}  // namespace paralab::cli
