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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "beer/data.hpp"
#include "beer/oracles.hpp"
#include "beer/rng.hpp"
#include "test_oracles.hpp"

namespace beer {
namespace {

Shard random_logistic_shard(std::size_t m, std::size_t d, std::mt19937_64& gen, std::size_t owner = 0) {
  Shard s{testing::random_matrix(m, d, gen), Vector(m), owner};
  std::bernoulli_distribution coin(0.4);
  for (double& b : s.labels) b = coin(gen) ? 1.0 : -1.0;
  return s;
}

// Direct re-evaluation of the regularised logistic loss.
double logistic_oracle(const Shard& s, double reg, const Vector& x) {
  double total = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    double margin = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) margin += s.features(j, k) * x[k];
    total += std::log1p(std::exp(-s.labels[j] * margin));
  }
  double r = 0.0;
  for (double v : x) r += v * v / (1.0 + v * v);
  return total / static_cast<double>(s.size()) + reg * r;
}

TEST(Value, LogisticAtZeroIsLogTwo) {
  std::mt19937_64 gen(1);
  const Shard s = random_logistic_shard(25, 6, gen);
  EXPECT_NEAR(value(Objective::logistic(6, 0.05), s, Vector(6, 0.0)), std::log(2.0), 1e-15);
}

TEST(Value, QuadraticZeroResidual) {
  // f(x) = 0.5 ||A x - b||^2 with b = A x.
  const Shard s{Matrix{{1, 2}, {0, 3}, {4, -1}}, Vector{5, 6, 2}, 0};
  EXPECT_EQ(value(Objective::quadratic(2), s, Vector{1, 2}), 0.0);
  EXPECT_NEAR(value(Objective::quadratic(2), s, Vector{0, 0}), 0.5 * (25 + 36 + 4), 1e-12);
}

TEST(Value, LogisticMatchesDirectOracle) {
  std::mt19937_64 gen(2);
  const Objective obj = Objective::logistic(8, 0.05);
  for (int t = 0; t < 10; ++t) {
    const Shard s = random_logistic_shard(30, 8, gen);
    const Vector x = testing::random_vector(8, gen);
    const double oracle = logistic_oracle(s, 0.05, x);
    EXPECT_NEAR(value(obj, s, x), oracle, 1e-12 * std::max(1.0, std::abs(oracle)));
  }
}

TEST(Value, DimensionMismatch) {
  std::mt19937_64 gen(3);
  const Shard s = random_logistic_shard(5, 4, gen);
  EXPECT_THROW((void)value(Objective::logistic(4, 0.0), s, Vector(3)), std::invalid_argument);
  EXPECT_THROW((void)full_gradient(Objective::logistic(4, 0.0), s, Vector(5)), std::invalid_argument);
}

TEST(FullGradient, QuadraticZeroAtMinimizer) {
  const QuadraticProblem q = synth_quadratic(1, 5, 4, 10.0);
  const Vector g = full_gradient(q.objective, q.shards[0], q.minimizer);
  for (double v : g) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(FullGradient, LogisticSingleSampleAtZero) {
  const Shard s{Matrix{{0.3, -1.7}}, Vector{-1.0}, 0};
  const Vector g = full_gradient(Objective::logistic(2, 0.05), s, Vector{0, 0});
  // -b a sigma(0) = -(1/2) b a; the regulariser gradient vanishes at 0.
  EXPECT_NEAR(g[0], 0.5 * 0.3, 1e-15);
  EXPECT_NEAR(g[1], 0.5 * -1.7, 1e-15);
}

TEST(FullGradient, MatchesFiniteDifferences) {
  std::mt19937_64 gen(5);
  const Objective logit = Objective::logistic(7, 0.05);
  const Shard s = random_logistic_shard(40, 7, gen);
  const QuadraticProblem q = synth_quadratic(2, 7, 5, 10.0);
  for (int t = 0; t < 20; ++t) {
    const Vector x = testing::random_vector(7, gen);
    const Vector fd = testing::fd_gradient([&](const Vector& y) { return value(logit, s, y); }, x);
    EXPECT_LE(testing::max_rel_error(full_gradient(logit, s, x), fd), 1e-5);
    const Vector fdq = testing::fd_gradient([&](const Vector& y) { return value(q.objective, q.shards[1], y); }, x);
    EXPECT_LE(testing::max_rel_error(full_gradient(q.objective, q.shards[1], x), fdq), 1e-5);
  }
}

TEST(Minibatch, AllIndicesEqualsFullGradient) {
  std::mt19937_64 gen(6);
  const Objective obj = Objective::logistic(5, 0.05);
  const Shard s = random_logistic_shard(12, 5, gen);
  std::vector<std::size_t> all(12);
  for (std::size_t j = 0; j < 12; ++j) all[j] = j;
  const Vector x = testing::random_vector(5, gen);
  const Vector full = full_gradient(obj, s, x);
  const Vector same = gradient_at_same_batch(obj, s, x, all);
  for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(full[k], same[k], 1e-14);
}

TEST(Minibatch, DeterministicAndReplayable) {
  std::mt19937_64 gen(7);
  const Objective obj = Objective::logistic(5, 0.05);
  const Shard s = random_logistic_shard(50, 5, gen);
  const Vector x = testing::random_vector(5, gen);
  RngStream a(42), b(42);
  const MinibatchGradient ga = minibatch_gradient(obj, s, x, 8, a);
  const MinibatchGradient gb = minibatch_gradient(obj, s, x, 8, b);
  EXPECT_EQ(ga.indices, gb.indices);
  EXPECT_EQ(ga.gradient, gb.gradient);
  EXPECT_EQ(gradient_at_same_batch(obj, s, x, ga.indices), ga.gradient);
  for (std::size_t j : ga.indices) EXPECT_LT(j, 50u);
}

TEST(Minibatch, UnbiasedInExpectation) {
  std::mt19937_64 gen(8);
  const Objective obj = Objective::logistic(4, 0.05);
  const Shard s = random_logistic_shard(30, 4, gen);
  const Vector x = testing::random_vector(4, gen);
  const Vector full = full_gradient(obj, s, x);
  RngStream rng(8);
  const int draws = 50000;
  Vector sum(4, 0.0), sum_sq(4, 0.0);
  for (int t = 0; t < draws; ++t) {
    const Vector g = minibatch_gradient(obj, s, x, 3, rng).gradient;
    for (std::size_t k = 0; k < 4; ++k) {
      sum[k] += g[k];
      sum_sq[k] += g[k] * g[k];
    }
  }
  for (std::size_t k = 0; k < 4; ++k) {
    const double mean = sum[k] / draws;
    const double se = std::sqrt((sum_sq[k] / draws - mean * mean) / draws);
    EXPECT_LE(std::abs(mean - full[k]), 4.0 * se) << k;
  }
}

TEST(Minibatch, RejectsBadBatchAndIndex) {
  std::mt19937_64 gen(9);
  const Objective obj = Objective::logistic(3, 0.0);
  const Shard s = random_logistic_shard(4, 3, gen);
  RngStream rng(0);
  EXPECT_THROW((void)minibatch_gradient(obj, s, Vector(3), 0, rng), std::invalid_argument);
  const std::vector<std::size_t> bad{1, 4};
  EXPECT_THROW((void)gradient_at_same_batch(obj, s, Vector(3), bad), std::out_of_range);
}

TEST(Minibatch, FixedBatchDifferenceQuotient) {
  std::mt19937_64 gen(10);
  const Objective obj = Objective::logistic(4, 0.05);
  const Shard s = random_logistic_shard(20, 4, gen);
  const std::vector<std::size_t> idx{2, 7, 7, 11};
  const Vector x = testing::random_vector(4, gen);
  const Vector e = testing::random_vector(4, gen);
  // Directional derivative of the fixed-batch gradient; halving h halves
  // the error of the forward quotient.
  auto quotient = [&](double h) {
    Vector xp = x;
    for (std::size_t k = 0; k < 4; ++k) xp[k] += h * e[k];
    Vector q = subtract(gradient_at_same_batch(obj, s, xp, idx), gradient_at_same_batch(obj, s, x, idx));
    for (double& v : q) v /= h;
    return q;
  };
  const Vector central = [&] {
    const double h = 1e-5;
    Vector xp = x, xm = x;
    for (std::size_t k = 0; k < 4; ++k) {
      xp[k] += h * e[k];
      xm[k] -= h * e[k];
    }
    Vector q = subtract(gradient_at_same_batch(obj, s, xp, idx), gradient_at_same_batch(obj, s, xm, idx));
    for (double& v : q) v /= 2 * h;
    return q;
  }();
  const double err1 = norm(subtract(quotient(1e-2), central));
  const double err2 = norm(subtract(quotient(5e-3), central));
  EXPECT_LT(err2, 0.6 * err1);
}

TEST(Smoothness, IdentityQuadratic) {
  std::vector<Shard> shards;
  for (std::size_t i = 0; i < 3; ++i) shards.push_back({Matrix::identity(4), Vector(4, double(i)), i});
  const SmoothnessInfo info = smoothness_estimate(Objective::quadratic(4), shards);
  EXPECT_NEAR(info.L, 1.0, 1e-12);
  ASSERT_TRUE(info.mu.has_value());
  EXPECT_NEAR(*info.mu, 1.0, 1e-12);
}

TEST(Smoothness, DegenerateFloor) {
  const std::vector<Shard> shards{{Matrix(5, 3), Vector(5, 1.0), 0}};
  const SmoothnessInfo info = smoothness_estimate(Objective::logistic(3, 0.0), shards);
  EXPECT_GT(info.L, 0.0);
  EXPECT_LE(info.L, 1e-12);
}

TEST(Smoothness, BoundsEmpiricalLipschitz) {
  std::mt19937_64 gen(11);
  const Objective obj = Objective::logistic(6, 0.05);
  std::vector<Shard> shards;
  for (std::size_t i = 0; i < 3; ++i) shards.push_back(random_logistic_shard(20, 6, gen, i));
  const double L = smoothness_estimate(obj, shards).L;
  for (int t = 0; t < 100; ++t) {
    const Vector x = testing::random_vector(6, gen);
    const Vector y = testing::random_vector(6, gen, 0.3);
    Vector z = x;
    for (std::size_t k = 0; k < 6; ++k) z[k] += y[k];
    const double ratio = norm(subtract(global_gradient(obj, shards, x), global_gradient(obj, shards, z))) / norm(y);
    EXPECT_LE(ratio, L);
  }
}

TEST(GlobalGradient, IdenticalShards) {
  std::mt19937_64 gen(12);
  const Objective obj = Objective::logistic(5, 0.05);
  const Shard s = random_logistic_shard(10, 5, gen);
  const std::vector<Shard> shards{s, s, s};
  const Vector x = testing::random_vector(5, gen);
  const Vector a = global_gradient(obj, shards, x);
  const Vector b = full_gradient(obj, s, x);
  for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(a[k], b[k], 1e-15);
}

TEST(GlobalGradient, AntisymmetricQuadraticsCancel) {
  const std::vector<Shard> shards{{Matrix::identity(3), Vector{1, -2, 3}, 0}, {Matrix::identity(3), Vector{-1, 2, -3}, 1}};
  EXPECT_EQ(global_gradient(Objective::quadratic(3), shards, Vector(3, 0.0)), Vector(3, 0.0));
}

TEST(GlobalGradient, MatchesFiniteDifferences) {
  std::mt19937_64 gen(13);
  const Objective obj = Objective::logistic(5, 0.05);
  std::vector<Shard> shards;
  for (std::size_t i = 0; i < 4; ++i) shards.push_back(random_logistic_shard(15, 5, gen, i));
  for (int t = 0; t < 10; ++t) {
    const Vector x = testing::random_vector(5, gen);
    const Vector fd = testing::fd_gradient([&](const Vector& y) { return global_value(obj, shards, y); }, x);
    EXPECT_LE(testing::max_rel_error(global_gradient(obj, shards, x), fd), 1e-5);
  }
}

TEST(Accuracy, ZeroModelCountsPositives) {
  const Matrix f{{1, 0}, {0, 1}, {1, 1}, {2, 2}};
  const Vector labels{1, -1, -1, 1};
  EXPECT_DOUBLE_EQ(accuracy(Objective::logistic(2, 0), f, labels, Vector(2, 0.0)), 0.5);
}

TEST(Accuracy, SeparableAndComplement) {
  const Matrix f{{1, 0.5}, {-2, 0.1}, {0.3, -1}, {-0.7, -0.7}};
  const Vector labels{1, -1, 1, -1};
  const Objective obj = Objective::logistic(2, 0);
  const Vector w{1, 0};
  EXPECT_EQ(accuracy(obj, f, labels, w), 1.0);
  std::mt19937_64 gen(14);
  const Matrix g = testing::random_matrix(50, 3, gen);
  Vector yl(50), flipped(50);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t j = 0; j < 50; ++j) {
    yl[j] = coin(gen) ? 1.0 : -1.0;
    flipped[j] = -yl[j];
  }
  const Vector x = testing::random_vector(3, gen);
  EXPECT_NEAR(accuracy(obj, g, yl, x) + accuracy(obj, g, flipped, x), 1.0, 1e-15);
  EXPECT_THROW((void)accuracy(Objective::quadratic(2), f, labels, w), std::invalid_argument);
}

TEST(OraclesProperty, PolyakLojasiewiczOnQuadratic) {
  const QuadraticProblem q = synth_quadratic(4, 6, 15, 10.0);
  ASSERT_TRUE(q.smoothness.mu.has_value());
  std::mt19937_64 gen(15);
  for (int t = 0; t < 100; ++t) {
    const Vector x = testing::random_vector(6, gen, 3.0);
    const double g2 = norm_sq(global_gradient(q.objective, q.shards, x));
    const double gap = global_value(q.objective, q.shards, x) - q.fstar;
    EXPECT_GE(g2, 2.0 * *q.smoothness.mu * gap - 1e-10);
  }
}

TEST(ReferenceMinimum, ReachesStationaryPoint) {
  std::mt19937_64 gen(16);
  const Objective obj = Objective::logistic(4, 0.05);
  std::vector<Shard> shards{random_logistic_shard(30, 4, gen, 0), random_logistic_shard(30, 4, gen, 1)};
  const ReferenceMinimum ref = reference_minimum(obj, shards, Vector(4, 0.0), 1e-10);
  EXPECT_LE(ref.grad_norm, 1e-10);
  EXPECT_NEAR(ref.fstar, global_value(obj, shards, ref.x), 0.0);
  for (int t = 0; t < 20; ++t) {
    Vector x = ref.x;
    const Vector dx = testing::random_vector(4, gen, 1e-2);
    for (std::size_t k = 0; k < 4; ++k) x[k] += dx[k];
    EXPECT_GE(global_value(obj, shards, x), ref.fstar - 1e-12);
  }
}

TEST(GradientVariance, ZeroForSingleSampleShards) {
  const std::vector<Shard> shards{{Matrix{{1, 2}}, Vector{1}, 0}, {Matrix{{0, 1}}, Vector{-1}, 1}};
  EXPECT_EQ(gradient_variance(Objective::logistic(2, 0.1), shards, Vector{0.3, -0.2}), 0.0);
}

}  // namespace
}  // namespace beer
