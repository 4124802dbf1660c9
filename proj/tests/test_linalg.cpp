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

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "beer/errors.hpp"
#include "beer/linalg.hpp"
#include "beer/topology.hpp"
#include "test_oracles.hpp"

namespace beer {
namespace {

using testing::naive_matmul;
using testing::random_matrix;
using testing::random_symmetric;

TEST(Matmul, IdentityLeavesMatrixUnchanged) {
  const Matrix m{{1.5, -2.0}, {0.25, 7.0}};
  EXPECT_EQ(matmul(Matrix::identity(2), m), m);
}

TEST(Matmul, HandExample) {
  const Matrix a{{1, 2}, {3, 4}};
  const Matrix b{{0}, {1}};
  EXPECT_EQ(matmul(a, b), (Matrix{{2}, {4}}));
}

TEST(Matmul, MatchesTripleLoop) {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random_matrix(3, 4, gen);
    const Matrix b = random_matrix(4, 2, gen);
    EXPECT_LE(max_abs_diff(matmul(a, b), naive_matmul(a, b)), 1e-14);
  }
}

TEST(Matmul, ShapeMismatchNamesBothShapes) {
  try {
    (void)matmul(Matrix(2, 3), Matrix(2, 3));
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("2x3"), std::string::npos) << what;
  }
}

TEST(Matmul, TransposedMatvecMatchesTranspose) {
  std::mt19937_64 gen(8);
  const Matrix a = random_matrix(5, 3, gen);
  const Vector x = testing::random_vector(5, gen);
  const Vector direct = matvec(a.transpose(), x);
  const Vector fused = matvec_transposed(a, x);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(direct[k], fused[k], 1e-14);
}

TEST(ColumnMean, IdenticalColumns) {
  const Vector c{1.0, -2.0, 3.5};
  EXPECT_EQ(column_mean(Matrix::broadcast_column(c, 4)), c);
}

TEST(ColumnMean, HandExample) {
  EXPECT_EQ(column_mean(Matrix{{1, 3}, {2, 4}}), (Vector{2, 3}));
}

TEST(ColumnMean, ResidualHasZeroMean) {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector m = column_mean(consensus_residual(random_matrix(6, 5, gen)));
    for (double v : m) EXPECT_LE(std::abs(v), 1e-12);
  }
}

TEST(ConsensusResidual, IdenticalColumnsGiveZero) {
  const Matrix r = consensus_residual(Matrix::broadcast_column(Vector{4.0, -1.0}, 3));
  EXPECT_EQ(frobenius_sq(r), 0.0);
}

TEST(ConsensusResidual, HandExample) {
  EXPECT_EQ(consensus_residual(Matrix{{1, 3}}), (Matrix{{-1, 1}}));
}

TEST(ConsensusResidual, PythagoreanSplit) {
  std::mt19937_64 gen(10);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = random_matrix(4, 7, gen, 3.0);
    const double lhs = frobenius_sq(m);
    const double rhs = frobenius_sq(consensus_residual(m)) + 7.0 * norm_sq(column_mean(m));
    EXPECT_LE(std::abs(lhs - rhs), 1e-10 * lhs);
  }
}

TEST(ConsensusResidual, RowsSumToZero) {
  std::mt19937_64 gen(11);
  const Matrix r = consensus_residual(random_matrix(5, 9, gen, 10.0));
  for (std::size_t i = 0; i < r.rows(); ++i) {
    double s = 0.0;
    for (double v : r.row(i)) s += v;
    EXPECT_LE(std::abs(s), 1e-12 * 10.0 * 9.0);
  }
}

TEST(FrobeniusSq, ZeroAndHandExample) {
  EXPECT_EQ(frobenius_sq(Matrix(3, 2)), 0.0);
  EXPECT_EQ(frobenius_sq(Matrix{{3}, {4}}), 25.0);
}

TEST(FrobeniusSq, EqualsSumOfSquaredSingularValues) {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = random_matrix(4, 4, gen);
    const Vector ev = symmetric_eigenvalues(naive_matmul(a.transpose(), a));
    double sum = 0.0;
    for (double v : ev) sum += v;
    EXPECT_NEAR(frobenius_sq(a), sum, 1e-10 * sum);
  }
}

TEST(SymmetricEigen, IdentityAndDiagonal) {
  EXPECT_EQ(symmetric_eigenvalues(Matrix::identity(3)), (Vector{1, 1, 1}));
  const Vector ev = symmetric_eigenvalues(Matrix{{5, 0, 0}, {0, -2, 0}, {0, 0, 0}});
  EXPECT_EQ(ev, (Vector{5, 0, -2}));
}

TEST(SymmetricEigen, FourRingMetropolisMatchesCirculantFormula) {
  const MixingMatrix w = metropolis_weights(build_graph(GraphKind::kRing, 4));
  // First row (c0, c1, c2, c3); eigenvalues c0 + c1 w^k + c2 w^{2k} + c3 w^{3k}.
  const double c0 = w.W()(0, 0), c1 = w.W()(0, 1), c2 = w.W()(0, 2), c3 = w.W()(0, 3);
  Vector expected;
  for (int k = 0; k < 4; ++k) {
    const double t = 2.0 * std::acos(-1.0) * k / 4.0;
    expected.push_back(c0 + c1 * std::cos(t) + c2 * std::cos(2 * t) + c3 * std::cos(3 * t));
  }
  std::sort(expected.rbegin(), expected.rend());
  const Vector ev = symmetric_eigenvalues(w.W());
  ASSERT_EQ(ev.size(), 4u);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(ev[k], expected[k], 1e-12);
  EXPECT_NEAR(ev[0], 1.0, 1e-12);
  EXPECT_NEAR(ev[1], 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(ev[2], 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(ev[3], -1.0 / 3.0, 1e-12);
}

TEST(SymmetricEigen, EigenpairsReconstructRandomSymmetric) {
  std::mt19937_64 gen(13);
  for (std::size_t n : {2u, 5u, 12u, 30u}) {
    const Matrix s = random_symmetric(n, gen);
    const SymmetricEigen e = symmetric_eigen(s);
    const double scale = std::sqrt(operator_norm_sq(s));
    for (std::size_t k = 0; k + 1 < n; ++k) EXPECT_GE(e.values[k], e.values[k + 1]);
    for (std::size_t k = 0; k < n; ++k) {
      const Vector v = e.vectors.column(k);
      EXPECT_NEAR(norm(v), 1.0, 1e-10);
      const Vector sv = matvec(s, v);
      for (std::size_t i = 0; i < n; ++i) EXPECT_LE(std::abs(sv[i] - e.values[k] * v[i]), 1e-8 * scale);
    }
  }
}

TEST(SymmetricEigen, RejectsNonSquareAndAsymmetric) {
  EXPECT_THROW((void)symmetric_eigenvalues(Matrix(2, 3)), DimensionError);
  EXPECT_THROW((void)symmetric_eigenvalues(Matrix{{1, 2}, {2.001, 1}}), DimensionError);
  // Within tolerance is accepted.
  EXPECT_NO_THROW((void)symmetric_eigenvalues(Matrix{{1, 2}, {2.0 + 1e-14, 1}}));
}

TEST(OperatorNormSq, ZeroMatrix) { EXPECT_EQ(operator_norm_sq(Matrix(3, 3)), 0.0); }

TEST(OperatorNormSq, AveragingMinusIdentity) {
  const Matrix m{{-0.5, 0.5}, {0.5, -0.5}};
  EXPECT_NEAR(operator_norm_sq(m), 1.0, 1e-14);
}

TEST(OperatorNormSq, MatchesPowerIteration) {
  std::mt19937_64 gen(14);
  const Matrix a = random_matrix(6, 4, gen);
  const double oracle = testing::power_iteration(naive_matmul(a.transpose(), a));
  EXPECT_NEAR(operator_norm_sq(a), oracle, 1e-9 * oracle);
}

TEST(OperatorNormSq, DoublyStochasticGapBoundedByFour) {
  for (GraphKind kind : {GraphKind::kRing, GraphKind::kStar, GraphKind::kGrid, GraphKind::kComplete}) {
    for (std::size_t n : {4u, 9u, 16u}) {
      const MixingMatrix w = metropolis_weights(build_graph(kind, n));
      EXPECT_LE(operator_norm_sq(w.W_minus_I()), 4.0);
    }
  }
}

TEST(LinalgProperty, MixingContractsConsensusResidual) {
  std::mt19937_64 gen(15);
  for (GraphKind kind : {GraphKind::kRing, GraphKind::kStar, GraphKind::kGrid}) {
    const MixingMatrix w = metropolis_weights(build_graph(kind, 9));
    for (int trial = 0; trial < 50; ++trial) {
      const Matrix m = random_matrix(5, 9, gen);
      const double before = frobenius_sq(consensus_residual(m));
      const double after = frobenius_sq(consensus_residual(matmul(m, w.W())));
      EXPECT_LE(after, (1.0 - w.rho()) * before + 1e-10);
    }
  }
}

TEST(LinalgProperty, OperationsStayFinite) {
  std::mt19937_64 gen(16);
  const Matrix a = random_matrix(4, 4, gen, 1e3);
  EXPECT_TRUE(all_finite(matmul(a, a)));
  EXPECT_TRUE(all_finite(consensus_residual(a)));
  Matrix bad = a;
  bad(1, 2) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_FALSE(all_finite(bad));
}

}  // namespace
}  // namespace beer
