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
#include <initializer_list>
#include <span>
#include <vector>

namespace beer {

using Vector = std::vector<double>;

// Dense row-major real matrix. Client quantities (X, V, H, G) are stored d x n
// with one column per client.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  // x * 1^T: every column equals x.
  static Matrix broadcast_column(std::span<const double> x, std::size_t cols);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> row(std::size_t i) {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  Vector column(std::size_t j) const;
  void set_column(std::size_t j, std::span<const double> values);

  Matrix transpose() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);
  // this += s * other
  Matrix& add_scaled(double s, const Matrix& other);

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, std::span<const double> x);
// a^T x
Vector matvec_transposed(const Matrix& a, std::span<const double> x);

// Mean of the columns, i.e. (1/n) M 1.
Vector column_mean(const Matrix& m);
// M - mean(M) 1^T.
Matrix consensus_residual(const Matrix& m);

double frobenius_sq(const Matrix& m);
double max_abs(const Matrix& m);
double max_abs_diff(const Matrix& a, const Matrix& b);
bool all_finite(const Matrix& m);

double dot(std::span<const double> a, std::span<const double> b);
double norm_sq(std::span<const double> x);
double norm(std::span<const double> x);
Vector subtract(std::span<const double> a, std::span<const double> b);

struct SymmetricEigen {
  Vector values;   // descending
  Matrix vectors;  // column k is the unit eigenvector for values[k]
};

// Cyclic Jacobi. Rejects non-square input and inputs whose asymmetry exceeds
// 1e-10 * max|S|.
SymmetricEigen symmetric_eigen(const Matrix& s);
Vector symmetric_eigenvalues(const Matrix& s);

// Largest eigenvalue of M^T M (square of the spectral norm).
double operator_norm_sq(const Matrix& m);

}  // namespace beer
