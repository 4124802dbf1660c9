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

#include "beer/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "beer/errors.hpp"

namespace beer {
namespace {

constexpr double kMinSmoothness = 1e-12;

void require_dim(const Objective& obj, std::span<const double> x, const Shard& shard) {
  if (x.size() != obj.dim || shard.dim() != obj.dim) {
    throw DimensionError("objective dimension " + std::to_string(obj.dim) +
                         " does not match x (" + std::to_string(x.size()) + ") or shard (" +
                         std::to_string(shard.dim()) + ")");
  }
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double sample_loss(const Objective& obj, const Shard& shard, std::size_t j, std::span<const double> x) {
  const double margin = dot(shard.features.row(j), x);
  const double b = shard.labels[j];
  if (obj.kind == Objective::Kind::kLogisticNonconvex) return softplus(-b * margin);
  const double r = margin - b;
  return 0.5 * static_cast<double>(shard.size()) * r * r;
}

// out += weight * grad loss_j(x)
void add_sample_gradient(const Objective& obj, const Shard& shard, std::size_t j,
                         std::span<const double> x, double weight, Vector& out) {
  auto a = shard.features.row(j);
  const double margin = dot(a, x);
  const double b = shard.labels[j];
  double coeff = 0.0;
  if (obj.kind == Objective::Kind::kLogisticNonconvex) {
    coeff = -b * sigmoid(-b * margin);
  } else {
    coeff = static_cast<double>(shard.size()) * (margin - b);
  }
  coeff *= weight;
  if (coeff == 0.0) return;
  for (std::size_t k = 0; k < a.size(); ++k) out[k] += coeff * a[k];
}

double regularizer(const Objective& obj, std::span<const double> x) {
  if (obj.reg == 0.0) return 0.0;
  double r = 0.0;
  for (double v : x) r += v * v / (1.0 + v * v);
  return obj.reg * r;
}

void add_regularizer_gradient(const Objective& obj, std::span<const double> x, Vector& out) {
  if (obj.reg == 0.0) return;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double denom = 1.0 + x[k] * x[k];
    out[k] += 2.0 * obj.reg * x[k] / (denom * denom);
  }
}

}  // namespace

Objective Objective::logistic(std::size_t dim, double reg) {
  if (!(reg >= 0.0)) throw std::invalid_argument("logistic objective: reg must be >= 0");
  return Objective{Kind::kLogisticNonconvex, reg, dim};
}

Objective Objective::quadratic(std::size_t dim) { return Objective{Kind::kQuadratic, 0.0, dim}; }

double value(const Objective& obj, const Shard& shard, std::span<const double> x) {
  require_dim(obj, x, shard);
  double total = 0.0;
  for (std::size_t j = 0; j < shard.size(); ++j) total += sample_loss(obj, shard, j, x);
  return total / static_cast<double>(shard.size()) + regularizer(obj, x);
}

Vector full_gradient(const Objective& obj, const Shard& shard, std::span<const double> x) {
  require_dim(obj, x, shard);
  Vector g(obj.dim, 0.0);
  const double w = 1.0 / static_cast<double>(shard.size());
  for (std::size_t j = 0; j < shard.size(); ++j) add_sample_gradient(obj, shard, j, x, w, g);
  add_regularizer_gradient(obj, x, g);
  return g;
}

MinibatchGradient minibatch_gradient(const Objective& obj, const Shard& shard,
                                     std::span<const double> x, std::size_t batch,
                                     RngStream& rng) {
  if (batch < 1) throw std::invalid_argument("minibatch_gradient: batch must be >= 1");
  std::vector<std::size_t> indices(batch);
  for (auto& idx : indices) idx = static_cast<std::size_t>(rng.below(shard.size()));
  Vector g = gradient_at_same_batch(obj, shard, x, indices);
  return {std::move(g), std::move(indices)};
}

Vector gradient_at_same_batch(const Objective& obj, const Shard& shard,
                              std::span<const double> x,
                              std::span<const std::size_t> indices) {
  require_dim(obj, x, shard);
  if (indices.empty()) throw std::invalid_argument("gradient_at_same_batch: empty batch");
  Vector g(obj.dim, 0.0);
  const double w = 1.0 / static_cast<double>(indices.size());
  for (std::size_t j : indices) {
    if (j >= shard.size()) {
      throw std::out_of_range("gradient_at_same_batch: sample index " + std::to_string(j) +
                              " out of range for shard of size " + std::to_string(shard.size()));
    }
    add_sample_gradient(obj, shard, j, x, w, g);
  }
  add_regularizer_gradient(obj, x, g);
  return g;
}

SmoothnessInfo smoothness_estimate(const Objective& obj, std::span<const Shard> shards) {
  SmoothnessInfo info;
  double max_curv = 0.0;
  Matrix avg_hessian(obj.dim, obj.dim);
  for (const Shard& s : shards) {
    const Matrix gram = matmul(s.features.transpose(), s.features);
    const Vector ev = symmetric_eigenvalues(gram);
    if (obj.kind == Objective::Kind::kLogisticNonconvex) {
      max_curv = std::max(max_curv, ev.front() / static_cast<double>(s.size()));
    } else {
      max_curv = std::max(max_curv, ev.front());
      avg_hessian.add_scaled(1.0 / static_cast<double>(shards.size()), gram);
    }
  }
  if (obj.kind == Objective::Kind::kLogisticNonconvex) {
    info.L = 0.25 * max_curv + 2.0 * obj.reg;
  } else {
    info.L = max_curv;
    if (!shards.empty()) {
      const double mu = symmetric_eigenvalues(avg_hessian).back();
      if (mu > 0.0) info.mu = mu;
    }
  }
  info.L = std::max(info.L, kMinSmoothness);
  return info;
}

double global_value(const Objective& obj, std::span<const Shard> shards, std::span<const double> x) {
  double total = 0.0;
  for (const Shard& s : shards) total += value(obj, s, x);
  return total / static_cast<double>(shards.size());
}

Vector global_gradient(const Objective& obj, std::span<const Shard> shards,
                       std::span<const double> x) {
  Vector g(obj.dim, 0.0);
  for (const Shard& s : shards) {
    const Vector gi = full_gradient(obj, s, x);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += gi[k];
  }
  for (double& v : g) v /= static_cast<double>(shards.size());
  return g;
}

double gradient_variance(const Objective& obj, std::span<const Shard> shards,
                         std::span<const double> x) {
  double worst = 0.0;
  for (const Shard& s : shards) {
    const Vector mean = full_gradient(obj, s, x);
    double acc = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      const std::size_t one[] = {j};
      const Vector gj = gradient_at_same_batch(obj, s, x, one);
      acc += norm_sq(subtract(gj, mean));
    }
    worst = std::max(worst, acc / static_cast<double>(s.size()));
  }
  return worst;
}

double accuracy(const Objective& obj, const Matrix& features, std::span<const double> labels,
                std::span<const double> x) {
  if (obj.kind != Objective::Kind::kLogisticNonconvex) {
    throw std::invalid_argument("accuracy is only defined for the logistic objective");
  }
  if (features.rows() != labels.size() || features.cols() != x.size()) {
    throw DimensionError("accuracy: shape mismatch");
  }
  if (labels.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t j = 0; j < features.rows(); ++j) {
    const double predicted = dot(features.row(j), x) >= 0.0 ? 1.0 : -1.0;
    if (predicted == labels[j]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

ReferenceMinimum reference_minimum(const Objective& obj, std::span<const Shard> shards,
                                   std::span<const double> x0, double tol, std::size_t max_iter) {
  const double step = 1.0 / smoothness_estimate(obj, shards).L;
  ReferenceMinimum out{Vector(x0.begin(), x0.end()), 0.0, 0.0, 0};
  Vector g = global_gradient(obj, shards, out.x);
  out.grad_norm = norm(g);
  while (out.grad_norm > tol && out.iterations < max_iter) {
    for (std::size_t k = 0; k < g.size(); ++k) out.x[k] -= step * g[k];
    g = global_gradient(obj, shards, out.x);
    out.grad_norm = norm(g);
    ++out.iterations;
  }
  out.fstar = global_value(obj, shards, out.x);
  return out;
}

}  // namespace beer
