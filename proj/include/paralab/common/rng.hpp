// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

namespace paralab {

/// Philox4x32-10 block function (Salmon et al., Random123). Counter-based, so
/// any element of any stream can be generated independently of the others.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// N(0, 1) sample addressed by (seed, stream, index); used for parameter
/// initialization so each weight is a pure function of its coordinates.
double normal_at(std::uint64_t seed, std::uint32_t stream, std::uint64_t index);

/// Sequential generator over one Philox stream. Every distribution is
/// implemented here rather than via <random> so outputs are identical on
/// every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint32_t stream = 0);

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double normal();
  /// Uniform integer in [0, bound); bound must be > 0.
  std::uint64_t uniform_index(std::uint64_t bound);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t block_ = 0;
  std::uint32_t stream_;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace paralab
