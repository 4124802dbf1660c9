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
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "beer/linalg.hpp"

namespace beer {

enum class GraphKind { kRing, kStar, kGrid, kComplete, kErdosRenyi };

GraphKind parse_graph_kind(std::string_view name);
std::string to_string(GraphKind kind);

// Undirected simple graph on nodes 0..n-1; always connected.
class Graph {
 public:
  // Throws std::invalid_argument on self-loops, out-of-range endpoints or a
  // disconnected edge set.
  Graph(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> edges);

  std::size_t size() const noexcept { return n_; }
  // Sorted (i < j) and deduplicated.
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const noexcept {
    return edges_;
  }
  std::vector<std::size_t> degrees() const;
  bool has_edge(std::size_t i, std::size_t j) const;

  static bool is_connected(
      std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges);

 private:
  std::size_t n_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
};

// n >= 2. Grid needs a perfect square (sqrt(n) x sqrt(n), 4-neighbour, no
// wraparound). Erdos-Renyi resamples with seed+1, seed+2, ... until connected,
// giving up after 1000 attempts.
Graph build_graph(GraphKind kind, std::size_t n, std::optional<double> p = {},
                  std::uint64_t seed = 0);

struct SpectralConstants {
  double rho;  // 1 - |lambda_2(W)|
  double C;    // ||W - I||_2^2
};

// Throws std::invalid_argument("zero spectral gap") when rho <= 1e-12.
SpectralConstants spectral_constants(const Matrix& w);

// Symmetric doubly stochastic gossip matrix with its cached spectral data.
class MixingMatrix {
 public:
  // Validates symmetry, stochasticity and entry range to 1e-12 and computes
  // the spectral constants. A 1x1 matrix [1] is accepted with rho = 1.
  explicit MixingMatrix(Matrix w);

  const Matrix& W() const noexcept { return w_; }
  // W - I, precomputed since every step multiplies by it.
  const Matrix& W_minus_I() const noexcept { return w_minus_i_; }
  std::size_t size() const noexcept { return w_.rows(); }
  double rho() const noexcept { return constants_.rho; }
  double C() const noexcept { return constants_.C; }

 private:
  Matrix w_;
  Matrix w_minus_i_;
  SpectralConstants constants_;
};

// w_ij = 1 / (1 + max(deg_i, deg_j)) on edges, diagonal takes the rest.
MixingMatrix metropolis_weights(const Graph& g);
MixingMatrix single_node_mixing();

// I + gamma (W - I), gamma in (0, 1].
Matrix lazy_mix(const Matrix& w, double gamma);

}  // namespace beer
