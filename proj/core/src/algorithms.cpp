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

#include "beer/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "beer/errors.hpp"

namespace beer {
namespace {

constexpr double kDivergenceNorm = 1e12;

void for_each_client(const StepContext& ctx, std::size_t n, const std::function<void(std::size_t)>& fn) {
  if (ctx.executor != nullptr) {
    ctx.executor->for_each(n, fn);
  } else {
    for (std::size_t i = 0; i < n; ++i) fn(i);
  }
}

void check_divergence(const AlgoState& s) {
  if (!all_finite(s.X) || !all_finite(s.V) || frobenius_sq(s.X) > kDivergenceNorm * kDivergenceNorm) {
    throw DivergenceError(s.round);
  }
}

// Deterministic compressors never touch their stream, so no substreams are
// derived for them.
Matrix compress_columns(const StepContext& ctx, const Matrix& m, std::int64_t round, Purpose purpose) {
  std::vector<RngStream> rngs;
  rngs.reserve(m.cols());
  for (std::size_t i = 0; i < m.cols(); ++i) {
    rngs.push_back(ctx.compressor.is_deterministic()
                       ? ctx.rng
                       : ctx.rng.substream(i, static_cast<std::uint64_t>(round), purpose));
  }
  return compress_matrix(ctx.compressor, m, rngs, ctx.executor);
}

// X' = X + gamma H (W - I) - eta V, then H' = H + C(X' - H).
void update_model(const AlgoState& s, const StepContext& ctx, AlgoState& next) {
  next.X = s.X;
  next.X.add_scaled(ctx.hp.gamma, matmul(s.H, ctx.W.W_minus_I()));
  next.X.add_scaled(-ctx.hp.eta, s.V);
  next.H = s.H + compress_columns(ctx, next.X - s.H, next.round, Purpose::kCompressModel);
}

void require_shapes(const AlgoState& s, const StepContext& ctx) {
  if (s.clients() != ctx.W.size() || s.clients() != ctx.shards.size()) {
    throw DimensionError("step: state has " + std::to_string(s.clients()) + " clients, W has " +
                         std::to_string(ctx.W.size()) + ", data has " + std::to_string(ctx.shards.size()));
  }
}

// Gaussian elimination with partial pivoting; empty when singular.
std::optional<std::array<double, 4>> solve4(std::array<std::array<double, 4>, 4> a, std::array<double, 4> b) {
  for (std::size_t col = 0; col < 4; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < 4; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) < 1e-300) return std::nullopt;
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t r = col + 1; r < 4; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t k = col; k < 4; ++k) a[r][k] -= f * a[col][k];
      b[r] -= f * b[col];
    }
  }
  std::array<double, 4> x{};
  for (std::size_t i = 4; i-- > 0;) {
    double acc = b[i];
    for (std::size_t k = i + 1; k < 4; ++k) acc -= a[i][k] * x[k];
    x[i] = acc / a[i][i];
  }
  return x;
}

void finish_gradient(AlgoState& next, GradientDraw draw) {
  next.cached_grad = std::move(draw.grad);
  next.cached_indices = std::move(draw.indices);
}

}  // namespace

Algorithm parse_algorithm(std::string_view name) {
  if (name == "beer") return Algorithm::kBeer;
  if (name == "choco") return Algorithm::kChoco;
  if (name == "dsgd") return Algorithm::kDsgd;
  if (name == "d2") return Algorithm::kD2;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

std::string to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::kBeer: return "beer";
    case Algorithm::kChoco: return "choco";
    case Algorithm::kDsgd: return "dsgd";
    case Algorithm::kD2: return "d2";
  }
  return "beer";
}

GradientDraw sample_gradients(const StepContext& ctx, const Matrix& X, std::int64_t round) {
  const std::size_t n = X.cols();
  GradientDraw draw{Matrix(X.rows(), n), std::vector<std::vector<std::size_t>>(n)};
  for_each_client(ctx, n, [&](std::size_t i) {
    const Vector x = X.column(i);
    if (ctx.hp.batch) {
      RngStream rng = ctx.rng.substream(i, static_cast<std::uint64_t>(round), Purpose::kGradient);
      MinibatchGradient mb = minibatch_gradient(ctx.objective, ctx.shards[i], x, *ctx.hp.batch, rng);
      draw.grad.set_column(i, mb.gradient);
      draw.indices[i] = std::move(mb.indices);
    } else {
      draw.grad.set_column(i, full_gradient(ctx.objective, ctx.shards[i], x));
    }
  });
  return draw;
}

AlgoState init_state(std::span<const double> x0, const StepContext& ctx) {
  const std::size_t n = ctx.shards.size();
  if (n == 0) throw std::invalid_argument("init_state: no clients");
  if (x0.size() != ctx.objective.dim) {
    throw DimensionError("init_state: x0 has dimension " + std::to_string(x0.size()) +
                         ", objective has " + std::to_string(ctx.objective.dim));
  }
  if (ctx.W.size() != n) throw DimensionError("init_state: mixing matrix size differs from client count");
  AlgoState s;
  s.X = Matrix::broadcast_column(x0, n);
  s.H = Matrix(x0.size(), n);
  s.G = Matrix(x0.size(), n);
  finish_gradient(s, sample_gradients(ctx, s.X, 0));
  s.V = s.cached_grad;
  s.round = 0;
  return s;
}

AlgoState beer_step(const AlgoState& s, const StepContext& ctx) {
  require_shapes(s, ctx);
  AlgoState next;
  next.round = s.round + 1;
  update_model(s, ctx, next);

  GradientDraw fresh = sample_gradients(ctx, next.X, next.round);
  next.V = s.V;
  next.V.add_scaled(ctx.hp.gamma, matmul(s.G, ctx.W.W_minus_I()));
  next.V += fresh.grad;
  next.V -= s.cached_grad;
  next.G = s.G + compress_columns(ctx, next.V - s.G, next.round, Purpose::kCompressTracker);
  finish_gradient(next, std::move(fresh));
  check_divergence(next);
  return next;
}

AlgoState choco_step(const AlgoState& s, const StepContext& ctx) {
  require_shapes(s, ctx);
  AlgoState next;
  next.round = s.round + 1;
  update_model(s, ctx, next);
  finish_gradient(next, sample_gradients(ctx, next.X, next.round));
  next.V = next.cached_grad;
  next.G = s.G;
  check_divergence(next);
  return next;
}

AlgoState dsgd_step(const AlgoState& s, const StepContext& ctx) {
  require_shapes(s, ctx);
  AlgoState next;
  next.round = s.round + 1;
  next.X = matmul(s.X, ctx.W.W());
  next.X.add_scaled(-ctx.hp.eta, s.cached_grad);
  finish_gradient(next, sample_gradients(ctx, next.X, next.round));
  next.V = next.cached_grad;
  next.H = next.X;
  next.G = next.V;
  next.prev_X = s.X;
  next.prev_grad = s.cached_grad;
  check_divergence(next);
  return next;
}

AlgoState d2_step(const AlgoState& s, const StepContext& ctx) {
  if (!s.prev_X || !s.prev_grad) return dsgd_step(s, ctx);
  require_shapes(s, ctx);
  AlgoState next;
  next.round = s.round + 1;
  Matrix inner = 2.0 * s.X;
  inner -= *s.prev_X;
  inner.add_scaled(-ctx.hp.eta, s.cached_grad);
  inner.add_scaled(ctx.hp.eta, *s.prev_grad);
  next.X = matmul(inner, ctx.W.W());
  finish_gradient(next, sample_gradients(ctx, next.X, next.round));
  next.V = next.cached_grad;
  next.H = next.X;
  next.G = next.V;
  next.prev_X = s.X;
  next.prev_grad = s.cached_grad;
  check_divergence(next);
  return next;
}

AlgoState step(Algorithm algo, const AlgoState& s, const StepContext& ctx) {
  switch (algo) {
    case Algorithm::kBeer: return beer_step(s, ctx);
    case Algorithm::kChoco: return choco_step(s, ctx);
    case Algorithm::kDsgd: return dsgd_step(s, ctx);
    case Algorithm::kD2: return d2_step(s, ctx);
  }
  return beer_step(s, ctx);
}

HyperParams theoretical_stepsizes(double alpha, double rho, double C, double L,
                                  std::optional<double> c_gamma, std::optional<double> c_eta) {
  if (!(L > 0.0)) throw std::invalid_argument("theoretical_stepsizes: L must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("theoretical_stepsizes: alpha must lie in (0, 1]");
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("theoretical_stepsizes: rho must lie in (0, 1]");
  if (!(C >= 0.0)) throw std::invalid_argument("theoretical_stepsizes: C must be >= 0");
  const double cg = c_gamma.value_or(C > 0.0 ? 1.0 / (6.0 * std::sqrt(C)) : std::numeric_limits<double>::infinity());
  const double ce = c_eta.value_or(1.0 / 9.0);
  if (!(cg > 0.0) || !(ce > 0.0)) throw std::invalid_argument("theoretical_stepsizes: constants must be positive");
  HyperParams hp;
  hp.gamma = std::min(1.0, cg * alpha * rho);
  hp.eta = ce * hp.gamma * rho * rho / L;
  return hp;
}

ConstantCheck verify_rate_constants(const RateConstants& c, double c_gamma, double c_eta,
                                    double C, std::optional<double> kappa) {
  const double cg = c_gamma;
  const double ce = c_eta;
  double d12 = 1.0;
  double d3 = 1.0;
  double d4 = 1.0;
  if (kappa) {
    d12 = 1.0 - 4.0 * ce * cg / *kappa;
    d3 = 1.0 - 2.0 * ce / *kappa;
    d4 = 1.0 - 4.0 * ce / *kappa;
  }
  const std::array<std::array<double, 4>, 5> m = {{
      {d12, -72.0 * C * cg * cg, -24.0 * C * cg, -72.0 * C * cg},
      {0.0, d12, 0.0, -24.0 * C * cg},
      {-12.0 * C * cg, -35.0 * C * cg, d3, -36.0 * C},
      {-24.0 * ce * ce * cg, -24.0 * cg * (1.0 + 3.0 * ce * ce), -24.0 * ce * ce, d4},
      {-12.0 * ce * cg, -36.0 * ce * cg, 0.0, -36.0 * ce},
  }};
  const std::array<double, 5> rhs = {0.0, 0.0, ce, 0.0, -1.0 + ce * cg};
  const std::array<double, 4> v = {c.c1, c.c2, c.c3, c.c4};

  ConstantCheck out;
  out.feasible = true;
  for (std::size_t r = 0; r < 5; ++r) {
    double lhs = 0.0;
    for (std::size_t k = 0; k < 4; ++k) lhs += m[r][k] * v[k];
    out.slack[r] = lhs - rhs[r];
    if (!(out.slack[r] >= 0.0)) out.feasible = false;
  }
  return out;
}

std::optional<ConstantSearch> search_rate_constants(double C, std::optional<double> kappa, int max_exponent) {
  if (!(C > 0.0)) throw std::invalid_argument("search_rate_constants: C must be positive");
  constexpr double kUpper = 10.0;
  const double cg_cap = 1.0 / (6.0 * std::sqrt(C));
  const double ce_cap = 1.0 / 9.0;

  std::optional<ConstantSearch> best;
  for (int kg = 0; kg <= max_exponent; ++kg) {
    const double cg = std::ldexp(1.0, -kg);
    if (cg > cg_cap) continue;
    for (int ke = 0; ke <= max_exponent; ++ke) {
      const double ce = std::ldexp(1.0, -ke);
      if (ce > ce_cap) continue;
      if (best && cg * ce <= best->c_gamma * best->c_eta) continue;

      // Rows 1-4 as equalities with every right-hand side raised by a small
      // offset, so the solution satisfies them strictly.
      double d12 = 1.0, d3 = 1.0, d4 = 1.0;
      if (kappa) {
        d12 = 1.0 - 4.0 * ce * cg / *kappa;
        d3 = 1.0 - 2.0 * ce / *kappa;
        d4 = 1.0 - 4.0 * ce / *kappa;
      }
      const double offset = 1e-9 * ce;
      const std::array<std::array<double, 4>, 4> m = {{
          {d12, -72.0 * C * cg * cg, -24.0 * C * cg, -72.0 * C * cg},
          {0.0, d12, 0.0, -24.0 * C * cg},
          {-12.0 * C * cg, -35.0 * C * cg, d3, -36.0 * C},
          {-24.0 * ce * ce * cg, -24.0 * cg * (1.0 + 3.0 * ce * ce), -24.0 * ce * ce, d4},
      }};
      const auto c = solve4(m, {offset, offset, ce + offset, offset});
      if (!c) continue;
      if (std::any_of(c->begin(), c->end(), [&](double v) { return !(v >= 0.0 && v <= kUpper); })) continue;
      const RateConstants rc{(*c)[0], (*c)[1], (*c)[2], (*c)[3]};
      const ConstantCheck check = verify_rate_constants(rc, cg, ce, C, kappa);
      if (!check.feasible) continue;
      best = ConstantSearch{rc, cg, ce, check};
    }
  }
  return best;
}

}  // namespace beer
