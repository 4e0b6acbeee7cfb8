// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <sstream>

#include "commands.hpp"
#include "paralab/common/error.hpp"
#include "paralab/common/hash.hpp"

namespace paralab::cli {

using nlohmann::json;

OptionDef path_option(std::string key, std::string help, bool required) {
  return OptionDef{std::move(key), OptionType::Path, nullptr, std::move(help), required, true};
}

OptionDef string_option(std::string key, std::string fallback, std::string help) {
  return OptionDef{std::move(key), OptionType::String, std::move(fallback), std::move(help)};
}

OptionDef int_option(std::string key, long long fallback, std::string help) {
  return OptionDef{std::move(key), OptionType::Int, fallback, std::move(help)};
}

OptionDef flag_option(std::string key, std::string help) {
  return OptionDef{std::move(key), OptionType::Bool, false, std::move(help)};
}

std::string str(const json& config, const std::string& key) {
  return config.at(key).get<std::string>();
}

bool is_set(const json& config, const std::string& key) {
  return config.contains(key) && !config.at(key).is_null();
}

std::vector<std::size_t> size_list(const json& config, const std::string& key) {
  std::vector<std::size_t> out;
  for (const auto& v : config.at(key)) {
    const auto i = v.get<long long>();
    if (i < 0) fail(ErrorCode::InvalidArgument, "--" + key + " values must be non-negative");
    out.push_back(static_cast<std::size_t>(i));
  }
  return out;
}

std::vector<tensorio::TapId> resolve_taps(const json& names,
                                          std::span<const tensorio::TapId> available) {
  std::vector<tensorio::TapId> out;
  for (const auto& n : names) {
    const auto name = n.get<std::string>();
    if (name == "all") {
      out.insert(out.end(), available.begin(), available.end());
    } else if (name == "block-outputs") {
      for (auto t : available) {
        if (t.site == tensorio::TapSite::PostResidualNorm2) out.push_back(t);
      }
    } else {
      const auto tap = tensorio::parse_tap(name);
      if (std::find(available.begin(), available.end(), tap) == available.end()) {
        fail(ErrorCode::TapMissing, "tap " + name + " is not available");
      }
      out.push_back(tap);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) fail(ErrorCode::InvalidArgument, "no taps selected");
  return out;
}

std::vector<std::size_t> quartile_ks(std::size_t n) {
  std::vector<std::size_t> ks = {0, n / 4, n / 2, 3 * n / 4, n};
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

void write_report(const evaluate::EvalReport& report, RunContext& run, const std::string& title,
                  const std::string& x_label, const std::string& y_label) {
  write_file(run.file("report.csv"), report.to_csv());
  write_file(run.file("report.json"), report.to_json().dump(2) + "\n");
  evaluate::render_curves(report, run.file("curves.svg"), title, x_label, y_label);
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace paralab::cli
