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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "beer/compression.hpp"
#include "beer/linalg.hpp"
#include "beer/oracles.hpp"
#include "beer/parallel.hpp"
#include "beer/rng.hpp"
#include "beer/topology.hpp"

namespace beer {

enum class Algorithm { kBeer, kChoco, kDsgd, kD2 };

// "beer", "choco", "dsgd", "d2"; throws std::invalid_argument otherwise.
Algorithm parse_algorithm(std::string_view name);
std::string to_string(Algorithm algo);

struct HyperParams {
  double eta = 0.0;
  double gamma = 1.0;
  std::optional<std::size_t> batch;  // empty means full local gradients
};

// Per-client quantities are stored as columns of d x n matrices.
struct AlgoState {
  Matrix X;
  Matrix V;
  Matrix H;
  Matrix G;
  // The gradient draw taken at the current X; reused as the subtrahend of
  // the next tracking update instead of being resampled.
  Matrix cached_grad;
  std::vector<std::vector<std::size_t>> cached_indices;
  std::int64_t round = 0;
  // D2 only: the previous iterate and its gradient draw.
  std::optional<Matrix> prev_X;
  std::optional<Matrix> prev_grad;

  std::size_t dim() const noexcept { return X.rows(); }
  std::size_t clients() const noexcept { return X.cols(); }
};

// Everything a step needs besides the state. References must outlive it.
struct StepContext {
  const MixingMatrix& W;
  const Objective& objective;
  std::span<const Shard> shards;
  const Compressor& compressor;
  HyperParams hp;
  // Master stream; per-(client, round, purpose) substreams are derived from it.
  RngStream rng;
  const Executor* executor = nullptr;
};

// Local gradients of every client at the columns of X. Minibatch draws use
// the (client, round, kGradient) substream.
struct GradientDraw {
  Matrix grad;
  std::vector<std::vector<std::size_t>> indices;
};
GradientDraw sample_gradients(const StepContext& ctx, const Matrix& X, std::int64_t round);

// X = x0 1^T, H = G = 0, V = cached_grad = gradients at X (round 0).
AlgoState init_state(std::span<const double> x0, const StepContext& ctx);

// Each step throws DivergenceError carrying the new round number when X
// has non-finite entries or ||X||_F > 1e12.
AlgoState beer_step(const AlgoState& s, const StepContext& ctx);
// BEER without G; V' is the fresh gradient at X'.
AlgoState choco_step(const AlgoState& s, const StepContext& ctx);
// X' = X W - eta g(X). H and G mirror X and V (no compression).
AlgoState dsgd_step(const AlgoState& s, const StepContext& ctx);
// X' = (2X - X_prev - eta (g(X) - g(X_prev))) W; the first round is a DSGD step.
AlgoState d2_step(const AlgoState& s, const StepContext& ctx);
AlgoState step(Algorithm algo, const AlgoState& s, const StepContext& ctx);

// gamma = c_gamma alpha rho (clamped to (0, 1]) and eta = c_eta gamma rho^2 / L.
// Defaults c_gamma = 1/(6 sqrt(C)) and c_eta = 1/9. Returns full-batch params.
HyperParams theoretical_stepsizes(double alpha, double rho, double C, double L,
                                  std::optional<double> c_gamma = {},
                                  std::optional<double> c_eta = {});

struct RateConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
};

struct ConstantCheck {
  bool feasible = false;
  std::array<double, 5> slack{};  // row value minus right-hand side
};

// The reduced 5x4 feasibility system for (c1..c4, c_gamma, c_eta), evaluated
// literally. With kappa = L/mu the diagonal carries the PL terms.
ConstantCheck verify_rate_constants(const RateConstants& c, double c_gamma, double c_eta,
                                    double C, std::optional<double> kappa = {});

struct ConstantSearch {
  RateConstants constants;
  double c_gamma = 0.0;
  double c_eta = 0.0;
  ConstantCheck check;
};

// Scans c_gamma, c_eta over {2^-k : k = 0..max_exponent}, restricted to
// c_gamma <= 1/(6 sqrt(C)) and c_eta <= 1/9. For each pair the first four
// rows are solved as equalities (right-hand sides nudged up by 1e-9 c_eta);
// the pair is kept if the solution lies in [0, 10]^4 and row 5 holds.
// Returns the feasible pair with the largest product c_gamma * c_eta.
std::optional<ConstantSearch> search_rate_constants(double C, std::optional<double> kappa = {},
                                                    int max_exponent = 20);

}  // namespace beer
