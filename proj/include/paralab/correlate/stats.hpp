// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace paralab::correlate {

enum class Method { Pearson, Spearman };

std::string_view method_name(Method m);
Method parse_method(std::string_view name);

/// A correlation coefficient. When either input has zero variance the value
/// is 0 and `degenerate` is set.
struct Correlation {
  double value = 0.0;
  bool degenerate = false;
};

/// Running mean and sum of squared deviations (Welford). A constant input
/// yields exactly zero spread.
struct Moments {
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t n = 0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
};

/// Throws Error(LengthMismatch) for unequal lengths and
/// Error(TooFewSamples) below two elements.
Correlation pearson(std::span<const double> x, std::span<const double> y);
Correlation spearman(std::span<const double> x, std::span<const double> y);
Correlation correlate(Method m, std::span<const double> x, std::span<const double> y);

/// 1-based ranks; tied values share the average of their ranks.
std::vector<double> average_ranks(std::span<const double> x);

}  // namespace paralab::correlate
