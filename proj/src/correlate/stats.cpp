// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#include "paralab/correlate/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "paralab/common/error.hpp"

namespace paralab::correlate {

std::string_view method_name(Method m) { return m == Method::Pearson ? "pearson" : "spearman"; }

Method parse_method(std::string_view name) {
  if (name == "pearson") return Method::Pearson;
  if (name == "spearman") return Method::Spearman;
  fail(ErrorCode::InvalidArgument, "unknown correlation method '" + std::string(name) + "'");
}

namespace {

void check(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    fail(ErrorCode::LengthMismatch, "vectors of length " + std::to_string(x.size()) + " and " +
                                        std::to_string(y.size()));
  }
  if (x.size() < 2) fail(ErrorCode::TooFewSamples, "correlation needs at least two samples");
}

}  // namespace

Correlation pearson(std::span<const double> x, std::span<const double> y) {
  check(x, y);
  Moments mx, my;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx.add(x[i]);
    my.add(y[i]);
  }
  if (mx.m2 <= 0.0 || my.m2 <= 0.0) return {0.0, true};
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx.mean) * (y[i] - my.mean);
  const double r = sxy / std::sqrt(mx.m2 * my.m2);
  return {std::clamp(r, -1.0, 1.0), false};
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

Correlation spearman(std::span<const double> x, std::span<const double> y) {
  check(x, y);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

Correlation correlate(Method m, std::span<const double> x, std::span<const double> y) {
  return m == Method::Pearson ? pearson(x, y) : spearman(x, y);
}

}  // namespace paralab::correlate
