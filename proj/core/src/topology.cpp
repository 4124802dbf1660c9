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

#include "beer/topology.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "beer/errors.hpp"
#include "beer/rng.hpp"

namespace beer {
namespace {

using EdgeList = std::vector<std::pair<std::size_t, std::size_t>>;

constexpr int kMaxErdosRenyiAttempts = 1000;
constexpr double kMixingTolerance = 1e-12;
constexpr double kMinSpectralGap = 1e-12;

EdgeList normalize(EdgeList edges) {
  for (auto& e : edges)
    if (e.first > e.second) std::swap(e.first, e.second);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

}  // namespace

GraphKind parse_graph_kind(std::string_view name) {
  if (name == "ring") return GraphKind::kRing;
  if (name == "star") return GraphKind::kStar;
  if (name == "grid") return GraphKind::kGrid;
  if (name == "complete") return GraphKind::kComplete;
  if (name == "erdos_renyi" || name == "er") return GraphKind::kErdosRenyi;
  throw std::invalid_argument("unknown graph kind '" + std::string(name) + "'");
}

std::string to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::kRing: return "ring";
    case GraphKind::kStar: return "star";
    case GraphKind::kGrid: return "grid";
    case GraphKind::kComplete: return "complete";
    case GraphKind::kErdosRenyi: return "erdos_renyi";
  }
  return "unknown";
}

Graph::Graph(std::size_t n, EdgeList edges) : n_(n) {
  for (const auto& [i, j] : edges) {
    if (i == j) throw std::invalid_argument("graph: self-loop at node " + std::to_string(i));
    if (i >= n || j >= n) throw std::invalid_argument("graph: edge endpoint out of range");
  }
  edges_ = normalize(std::move(edges));
  if (!is_connected(n_, edges_)) throw std::invalid_argument("graph is not connected");
}

std::vector<std::size_t> Graph::degrees() const {
  std::vector<std::size_t> deg(n_, 0);
  for (const auto& [i, j] : edges_) {
    ++deg[i];
    ++deg[j];
  }
  return deg;
}

bool Graph::has_edge(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  return std::binary_search(edges_.begin(), edges_.end(), std::pair{i, j});
}

bool Graph::is_connected(std::size_t n, const EdgeList& edges) {
  if (n == 0) return false;
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& [i, j] : edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t visited = 1;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v : adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        ++visited;
        stack.push_back(v);
      }
    }
  }
  return visited == n;
}

Graph build_graph(GraphKind kind, std::size_t n, std::optional<double> p,
                  std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("graph needs at least 2 nodes");
  EdgeList edges;
  switch (kind) {
    case GraphKind::kRing:
      for (std::size_t i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
      break;
    case GraphKind::kStar:
      for (std::size_t i = 1; i < n; ++i) edges.emplace_back(0, i);
      break;
    case GraphKind::kGrid: {
      const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
      if (side * side != n) throw std::invalid_argument("grid requires perfect square n");
      for (std::size_t r = 0; r < side; ++r) {
        for (std::size_t c = 0; c < side; ++c) {
          const std::size_t u = r * side + c;
          if (c + 1 < side) edges.emplace_back(u, u + 1);
          if (r + 1 < side) edges.emplace_back(u, u + side);
        }
      }
      break;
    }
    case GraphKind::kComplete:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(i, j);
      break;
    case GraphKind::kErdosRenyi: {
      if (!p || !(*p > 0.0 && *p <= 1.0)) {
        throw std::invalid_argument("erdos_renyi requires p in (0, 1]");
      }
      for (int attempt = 0; attempt < kMaxErdosRenyiAttempts; ++attempt) {
        RngStream rng(seed + static_cast<std::uint64_t>(attempt));
        edges.clear();
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = i + 1; j < n; ++j)
            if (rng.uniform() < *p) edges.emplace_back(i, j);
        if (Graph::is_connected(n, edges)) return Graph(n, std::move(edges));
      }
      throw std::invalid_argument("erdos_renyi graph still disconnected after 1000 attempts");
    }
  }
  return Graph(n, std::move(edges));
}

SpectralConstants spectral_constants(const Matrix& w) {
  if (w.rows() != w.cols()) throw DimensionError("spectral_constants: W must be square");
  const std::size_t n = w.rows();
  const Matrix w_minus_i = w - Matrix::identity(n);
  const double c = operator_norm_sq(w_minus_i);
  if (n == 1) return {1.0, c};

  // Eigenvalue 1 belongs to the all-ones vector; |lambda_2| is the largest
  // magnitude among the rest. Sorting by magnitude and skipping the first is
  // equivalent since W is doubly stochastic.
  Vector ev = symmetric_eigenvalues(w);
  std::sort(ev.begin(), ev.end(), [](double a, double b) { return std::abs(a) > std::abs(b); });
  const double rho = 1.0 - std::abs(ev[1]);
  if (rho <= kMinSpectralGap) throw std::invalid_argument("zero spectral gap");
  return {std::min(rho, 1.0), c};
}

MixingMatrix::MixingMatrix(Matrix w) : w_(std::move(w)) {
  if (w_.rows() != w_.cols() || w_.rows() == 0) {
    throw DimensionError("mixing matrix must be square and non-empty");
  }
  const std::size_t n = w_.rows();
  for (std::size_t i = 0; i < n; ++i) {
    double row_sum = 0.0;
    double col_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = w_(i, j);
      if (v < -kMixingTolerance || v > 1.0 + kMixingTolerance) {
        throw std::invalid_argument("mixing matrix entry outside [0, 1]");
      }
      if (std::abs(v - w_(j, i)) > kMixingTolerance) {
        throw std::invalid_argument("mixing matrix is not symmetric");
      }
      row_sum += v;
      col_sum += w_(j, i);
    }
    if (std::abs(row_sum - 1.0) > kMixingTolerance || std::abs(col_sum - 1.0) > kMixingTolerance) {
      throw std::invalid_argument("mixing matrix is not doubly stochastic");
    }
  }
  w_minus_i_ = w_ - Matrix::identity(n);
  constants_ = spectral_constants(w_);
}

MixingMatrix metropolis_weights(const Graph& g) {
  const std::size_t n = g.size();
  const auto deg = g.degrees();
  Matrix w(n, n);
  for (const auto& [i, j] : g.edges()) {
    const double v = 1.0 / (1.0 + static_cast<double>(std::max(deg[i], deg[j])));
    w(i, j) = v;
    w(j, i) = v;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) off += w(i, j);
    w(i, i) = 1.0 - off;
  }
  return MixingMatrix(std::move(w));
}

MixingMatrix single_node_mixing() { return MixingMatrix(Matrix{{1.0}}); }

Matrix lazy_mix(const Matrix& w, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("lazy_mix: gamma must lie in (0, 1]");
  if (w.rows() != w.cols()) throw DimensionError("lazy_mix: W must be square");
  Matrix out = Matrix::identity(w.rows());
  out.add_scaled(gamma, w - Matrix::identity(w.rows()));
  return out;
}

}  // namespace beer
