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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "beer/algorithms.hpp"
#include "beer/compression.hpp"
#include "beer/oracles.hpp"

namespace beer {

// Single-trajectory values of the analysis quantities:
//   omega1 = ||H - X||_F^2          omega2 = ||G - V||_F^2
//   omega3 = ||X - xbar 1^T||_F^2   omega4 = ||V - vbar 1^T||_F^2
//   omega5 = ||vbar||^2
struct OmegaVector {
  double omega1 = 0.0;
  double omega2 = 0.0;
  double omega3 = 0.0;
  double omega4 = 0.0;
  double omega5 = 0.0;

  friend bool operator==(const OmegaVector&, const OmegaVector&) = default;
};

OmegaVector omegas(const AlgoState& s);

// ||grad f(xbar)||^2 with xbar the column mean of X.
double grad_norm_at_mean(const AlgoState& s, const Objective& obj, std::span<const Shard> shards);

// f(xbar) - f* + (c1 L/n) O1 + (c2 rho^2/(nL)) O2 + (c3 L/n) O3 + (c4 rho^p/(nL)) O4.
// p = rho_exponent; 2 matches the weight vector used in the descent proof.
double lyapunov(const AlgoState& s, const RateConstants& c, double rho, double L, double fstar,
                const Objective& obj, std::span<const Shard> shards, int rho_exponent = 2);

struct RecursionParams {
  double alpha = 1.0;
  double gamma = 1.0;
  double eta = 0.0;
  double rho = 1.0;
  double C = 0.0;
  double L = 1.0;
  std::size_t n = 1;
  double sigma_sq_over_b = 0.0;  // sigma^2 / b; zero for full gradients
};

// RHS_i(prev) - next_i for the four one-round recursions bounding omega1..4.
std::array<double, 4> lemma3_slacks(const OmegaVector& prev, const OmegaVector& next,
                                    const RecursionParams& p);

// The unreduced descent conditions behind the Lyapunov decrease:
//   entries 0..3: -(s^T (A - theta I) + q^T), theta = 1 or 1 - eta mu
//   entry 4:      eta/2 - eta^2 L/2 - s^T b1
// with s = [c1 L/n, c2 rho^2/(nL), c3 L/n, c4 rho^p/(nL)]. Feasible iff all >= 0.
std::array<double, 5> descent_system_slacks(const RateConstants& c, const RecursionParams& p,
                                            std::optional<double> mu = {}, int rho_exponent = 2);

enum class BitsAccounting { kBroadcast, kPerEdge };

// Bits sent in one round. Broadcast counts each client message once; per-edge
// counts it once per neighbour. BEER sends two compressed messages per client,
// CHOCO one, DSGD and D2 one dense message.
std::int64_t round_bits(Algorithm algo, const Compressor& comp, std::size_t d,
                        std::span<const std::size_t> degrees, BitsAccounting accounting);

struct MetricsRow {
  std::int64_t round = 0;
  std::int64_t cum_bits = 0;
  double grad_norm_sq = 0.0;
  std::optional<double> fval_gap;
  OmegaVector omegas;
  std::optional<double> lyapunov;
  std::optional<double> test_accuracy;
  std::optional<double> wall_ms;

  friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

inline constexpr const char* kCsvHeader =
    "round,cum_bits,grad_norm_sq,fval_gap,omega1,omega2,omega3,omega4,omega5,lyapunov,test_accuracy,wall_ms";

// Shortest decimal string that parses back to the same double.
std::string format_real(double v);

// Header plus one line per row; absent optionals are empty fields.
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const MetricsRow& row);
void write_csv(std::ostream& out, std::span<const MetricsRow> rows);

// Inverse of write_csv. Throws DataError naming the line on malformed input.
std::vector<MetricsRow> read_csv(std::istream& in);

}  // namespace beer
