// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#include "paralab/cli/config.hpp"

#include <charconv>
#include <cstdint>

#include "paralab/common/error.hpp"

namespace paralab::cli {

namespace {

using nlohmann::json;

const OptionDef* find_option(const CommandDef& cmd, std::string_view key) {
  for (const auto& o : cmd.options) {
    if (o.key == key) return &o;
  }
  return nullptr;
}

[[noreturn]] void bad_value(const OptionDef& opt, const std::string& what) {
  fail(ErrorCode::Usage, "--" + opt.key + ": " + what);
}

std::int64_t parse_int(const OptionDef& opt, std::string_view s) {
  std::int64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    bad_value(opt, "expected an integer, got '" + std::string(s) + "'");
  }
  return v;
}

double parse_double(const OptionDef& opt, std::string_view s) {
  double v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    bad_value(opt, "expected a number, got '" + std::string(s) + "'");
  }
  return v;
}

json typed(const OptionDef& opt, const json& v, const std::filesystem::path& base) {
  if (v.is_null()) return v;
  switch (opt.type) {
    case OptionType::String:
      if (!v.is_string()) bad_value(opt, "expected a string");
      return v;
    case OptionType::Path: {
      if (!v.is_string()) bad_value(opt, "expected a path");
      std::filesystem::path p = v.get<std::string>();
      if (p.empty()) bad_value(opt, "empty path");
      if (p.is_relative()) p = base / p;
      return p.lexically_normal().string();
    }
    case OptionType::Int:
      if (!v.is_number_integer()) bad_value(opt, "expected an integer");
      return v;
    case OptionType::Double:
      if (!v.is_number()) bad_value(opt, "expected a number");
      return v.get<double>();
    case OptionType::Bool:
      if (!v.is_boolean()) bad_value(opt, "expected true or false");
      return v;
    case OptionType::StringList:
    case OptionType::IntList: {
      const bool ints = opt.type == OptionType::IntList;
      const json items = v.is_array() ? v : json::array({v});
      for (const auto& item : items) {
        if (ints ? !item.is_number_integer() : !item.is_string()) {
          bad_value(opt, ints ? "expected a list of integers" : "expected a list of strings");
        }
      }
      return items;
    }
  }
  return v;
}

}  // namespace

json default_config(const CommandDef& cmd) {
  json config = json::object();
  for (const auto& o : cmd.options) config[o.key] = o.fallback;
  return config;
}

void merge_config(const CommandDef& cmd, json& config, const json& values,
                  const std::filesystem::path& base) {
  if (!values.is_object()) fail(ErrorCode::Usage, "config must be a JSON object");
  for (const auto& [key, value] : values.items()) {
    const auto* opt = find_option(cmd, key);
    if (!opt) fail(ErrorCode::Usage, "unknown config key '" + key + "' for " + cmd.name);
    config[key] = typed(*opt, value, base);
  }
}

void check_required(const CommandDef& cmd, const json& config) {
  for (const auto& o : cmd.options) {
    if (o.required && config.value(o.key, json()).is_null()) {
      fail(ErrorCode::Usage, "--" + o.key + " is required");
    }
  }
}

json parse_flag(const OptionDef& opt, const std::vector<std::string>& raw) {
  switch (opt.type) {
    case OptionType::String:
    case OptionType::Path:
      return raw.back();
    case OptionType::Int:
      return parse_int(opt, raw.back());
    case OptionType::Double:
      return parse_double(opt, raw.back());
    case OptionType::Bool:
      return true;
    case OptionType::StringList:
      return raw;
    case OptionType::IntList: {
      json out = json::array();
      for (const auto& s : raw) out.push_back(parse_int(opt, s));
      return out;
    }
  }
  return nullptr;
}

}  // namespace paralab::cli
