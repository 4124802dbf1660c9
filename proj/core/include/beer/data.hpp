// Copyright 2026 The beerlab Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "beer/linalg.hpp"
#include "beer/oracles.hpp"

namespace beer {

// Dense labelled dataset; labels are +1/-1.
struct Dataset {
  Matrix features;
  Vector labels;

  std::size_t size() const noexcept { return features.rows(); }
  std::size_t dim() const noexcept { return features.cols(); }
  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// LIBSVM text: "label idx:val idx:val ..." with 1-based strictly increasing
// indices. Labels +1/1 map to +1, -1/0 map to -1; anything else is an error.
// Blank lines are skipped. d = max(d_hint, largest index). Errors carry the
// 1-based line number.
Dataset parse_libsvm(std::istream& in, std::optional<std::size_t> d_hint = {});
Dataset parse_libsvm(std::string_view text, std::optional<std::size_t> d_hint = {});
Dataset load_libsvm(const std::filesystem::path& path, std::optional<std::size_t> d_hint = {});

// Zero entries are omitted; reals use the shortest round-trip form.
void write_libsvm(std::ostream& out, const Dataset& ds);

// First min(m, size) rows.
Dataset take_first(const Dataset& ds, std::size_t m);

// Stable sort by (label, original index), then contiguous split. The first
// m mod n shards get one extra sample.
std::vector<Shard> partition_unshuffled(const Dataset& ds, std::size_t n);

// Seeded random permutation, then the same contiguous split (homogeneous
// baseline for heterogeneity comparisons).
std::vector<Shard> partition_shuffled(const Dataset& ds, std::size_t n, std::uint64_t seed);

// max_i ||grad f_i(x) - grad f(x)||.
double heterogeneity(const Objective& obj, std::span<const Shard> shards,
                     std::span<const double> x);

struct QuadraticProblem {
  Objective objective;
  std::vector<Shard> shards;
  SmoothnessInfo smoothness;
  Vector minimizer;
  double fstar = 0.0;
};

// Every client shares the Hessian H = Q^T S^2 Q, with the eigenvalues of H
// log-spaced on [1/cond, 1] (so L = 1 and mu = 1/cond exactly), and has its
// own minimizer c_i; c_i are drawn at pairwise distance >= 1. f_i(x) =
// 0.5 (x - c_i)^T H (x - c_i).
QuadraticProblem synth_quadratic(std::size_t n, std::size_t d, std::uint64_t seed, double cond);

// Synthetic stand-in shaped like the a9a (Adult) binary dataset: 123 binary
// features in 14 one-hot groups, about 24% positive labels, with
// label-dependent category frequencies.
inline constexpr std::size_t kA9aDim = 123;
Dataset synth_a9a_like(std::size_t m, std::uint64_t seed);

}  // namespace beer
