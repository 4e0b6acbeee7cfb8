// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace paralab::evaluate {

struct Series {
  std::string name;    // e.g. "top-paracorr/target-form"
  std::string metric;  // e.g. "bleu", "target_form_rate"
  std::uint64_t seed = 0;
  std::vector<double> x;  // strictly increasing
  std::vector<double> y;
};

struct EvalReport {
  std::vector<Series> series;
  nlohmann::json metadata = nlohmann::json::object();

  /// Throws Error(InvalidArgument) on ragged or non-increasing series.
  void validate() const;
  const Series* find(std::string_view name) const;

  /// Long format: "series,metric,x,seed,value".
  std::string to_csv() const;
  nlohmann::json to_json() const;
  static EvalReport from_json(const nlohmann::json& j);
};

/// Line chart, one polyline per series, legend built from series names.
std::string render_curves_svg(const EvalReport& report, std::string_view title = "",
                              std::string_view x_label = "x", std::string_view y_label = "value");
void render_curves(const EvalReport& report, const std::filesystem::path& path,
                   std::string_view title = "", std::string_view x_label = "x",
                   std::string_view y_label = "value");

}  // namespace paralab::evaluate
