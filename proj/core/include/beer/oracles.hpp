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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "beer/linalg.hpp"
#include "beer/rng.hpp"

namespace beer {

// One client's local data: m_i samples as rows of `features`.
struct Shard {
  Matrix features;
  Vector labels;
  std::size_t owner = 0;

  std::size_t size() const noexcept { return features.rows(); }
  std::size_t dim() const noexcept { return features.cols(); }
};

// Local objective f_i(x) = (1/m_i) sum_j loss(x; a_j, b_j) + reg * R(x).
//
// kLogisticNonconvex: loss = log(1 + exp(-b a^T x)),
//                     R(x) = sum_k x_k^2 / (1 + x_k^2) (added once per client)
// kQuadratic:         loss = (m_i / 2) (a^T x - b)^2, so that
//                     f_i(x) = 0.5 ||A_i x - b_i||^2 with Hessian A_i^T A_i.
struct Objective {
  enum class Kind { kLogisticNonconvex, kQuadratic };

  Kind kind = Kind::kLogisticNonconvex;
  double reg = 0.0;
  std::size_t dim = 0;

  static Objective logistic(std::size_t dim, double reg);
  static Objective quadratic(std::size_t dim);
};

struct SmoothnessInfo {
  double L = 0.0;
  std::optional<double> mu;
  std::optional<double> sigma;
};

double value(const Objective& obj, const Shard& shard, std::span<const double> x);
Vector full_gradient(const Objective& obj, const Shard& shard, std::span<const double> x);

struct MinibatchGradient {
  Vector gradient;
  std::vector<std::size_t> indices;
};

// `batch` sample indices drawn i.i.d. with replacement. The returned indices
// let callers re-evaluate the same minibatch at a different point.
MinibatchGradient minibatch_gradient(const Objective& obj, const Shard& shard,
                                     std::span<const double> x, std::size_t batch,
                                     RngStream& rng);

Vector gradient_at_same_batch(const Objective& obj, const Shard& shard,
                              std::span<const double> x,
                              std::span<const std::size_t> indices);

SmoothnessInfo smoothness_estimate(const Objective& obj, std::span<const Shard> shards);

// (1/n) sum_i f_i(x) and its gradient.
double global_value(const Objective& obj, std::span<const Shard> shards, std::span<const double> x);
Vector global_gradient(const Objective& obj, std::span<const Shard> shards,
                       std::span<const double> x);

// Largest per-client single-sample gradient variance at x; an estimate of
// sigma^2 from the bounded-variance assumption.
double gradient_variance(const Objective& obj, std::span<const Shard> shards,
                         std::span<const double> x);

// Fraction of rows with sign(a^T x) == label, sign(0) counted as +1.
// Logistic objectives only.
double accuracy(const Objective& obj, const Matrix& features, std::span<const double> labels,
                std::span<const double> x);

struct ReferenceMinimum {
  Vector x;
  double fstar = 0.0;
  double grad_norm = 0.0;
  std::size_t iterations = 0;
};

// Full-gradient descent with step 1/L until ||grad f|| <= tol or max_iter.
ReferenceMinimum reference_minimum(const Objective& obj, std::span<const Shard> shards,
                                   std::span<const double> x0, double tol = 1e-10,
                                   std::size_t max_iter = 200000);

}  // namespace beer
