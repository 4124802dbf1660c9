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

#include "beer/diagnostics.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "beer/errors.hpp"

namespace beer {
namespace {

using Matrix4 = std::array<std::array<double, 4>, 4>;

// Row i holds the coefficients of omega_{i+1} at t+1 on omega_1..omega_4 at t.
Matrix4 recursion_matrix(const RecursionParams& p) {
  const double a = p.alpha, g = p.gamma, e = p.eta, r = p.rho, C = p.C, L2 = p.L * p.L;
  const double diag12 = 1.0 - a / 2.0 + 6.0 * g * g * C / a;
  return {{
      {diag12, 0.0, 6.0 * g * g * C / a, 6.0 * e * e / a},
      {18.0 * g * g * C * L2 / a, diag12, 18.0 * g * g * C * L2 / a, (6.0 * g * g * C + 18.0 * L2 * e * e) / a},
      {6.0 * g * C / r, 0.0, 1.0 - g * r / 2.0, 6.0 * e * e / (g * r)},
      {18.0 * g * C * L2 / r, 6.0 * g * C / r, 18.0 * g * C * L2 / r, 1.0 - g * r / 2.0 + 18.0 * L2 * e * e / (g * r)},
  }};
}

std::array<double, 4> omega5_column(const RecursionParams& p) {
  const double a = p.alpha, g = p.gamma, e = p.eta, r = p.rho, L2 = p.L * p.L;
  const double n = static_cast<double>(p.n);
  return {6.0 * n * e * e / a, 18.0 * L2 * e * e * n / a, 0.0, 18.0 * n * e * e * L2 / (g * r)};
}

std::array<double, 4> noise_column(const RecursionParams& p) {
  const double n = static_cast<double>(p.n);
  return {0.0, 12.0 * n / p.alpha, 0.0, 12.0 * n / (p.gamma * p.rho)};
}

std::optional<double> parse_optional(std::string_view field, std::size_t line) {
  if (field.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw DataError(line, "malformed number '" + std::string(field) + "'");
  }
  return v;
}

double parse_required(std::string_view field, std::size_t line) {
  auto v = parse_optional(field, line);
  if (!v) throw DataError(line, "missing required field");
  return *v;
}

std::int64_t parse_integer(std::string_view field, std::size_t line) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw DataError(line, "malformed integer '" + std::string(field) + "'");
  }
  return v;
}

void write_optional(std::ostream& out, const std::optional<double>& v) {
  if (v) out << format_real(*v);
}

}  // namespace

OmegaVector omegas(const AlgoState& s) {
  OmegaVector o;
  o.omega1 = frobenius_sq(s.H - s.X);
  o.omega2 = frobenius_sq(s.G - s.V);
  o.omega3 = frobenius_sq(consensus_residual(s.X));
  o.omega4 = frobenius_sq(consensus_residual(s.V));
  o.omega5 = norm_sq(column_mean(s.V));
  return o;
}

double grad_norm_at_mean(const AlgoState& s, const Objective& obj, std::span<const Shard> shards) {
  return norm_sq(global_gradient(obj, shards, column_mean(s.X)));
}

double lyapunov(const AlgoState& s, const RateConstants& c, double rho, double L, double fstar,
                const Objective& obj, std::span<const Shard> shards, int rho_exponent) {
  const OmegaVector o = omegas(s);
  const double n = static_cast<double>(s.clients());
  const double gap = global_value(obj, shards, column_mean(s.X)) - fstar;
  return gap + c.c1 * L / n * o.omega1 + c.c2 * rho * rho / (n * L) * o.omega2 + c.c3 * L / n * o.omega3 +
         c.c4 * std::pow(rho, rho_exponent) / (n * L) * o.omega4;
}

std::array<double, 4> lemma3_slacks(const OmegaVector& prev, const OmegaVector& next,
                                    const RecursionParams& p) {
  const Matrix4 a = recursion_matrix(p);
  const std::array<double, 4> b1 = omega5_column(p);
  const std::array<double, 4> b2 = noise_column(p);
  const std::array<double, 4> before = {prev.omega1, prev.omega2, prev.omega3, prev.omega4};
  const std::array<double, 4> after = {next.omega1, next.omega2, next.omega3, next.omega4};
  std::array<double, 4> slack{};
  for (std::size_t i = 0; i < 4; ++i) {
    double rhs = b1[i] * prev.omega5 + b2[i] * p.sigma_sq_over_b;
    for (std::size_t j = 0; j < 4; ++j) rhs += a[i][j] * before[j];
    slack[i] = rhs - after[i];
  }
  return slack;
}

std::array<double, 5> descent_system_slacks(const RateConstants& c, const RecursionParams& p,
                                            std::optional<double> mu, int rho_exponent) {
  const double n = static_cast<double>(p.n);
  const double L = p.L;
  const std::array<double, 4> s = {c.c1 * L / n, c.c2 * p.rho * p.rho / (n * L), c.c3 * L / n,
                                   c.c4 * std::pow(p.rho, rho_exponent) / (n * L)};
  const std::array<double, 4> q = {0.0, 0.0, p.eta * L * L / (2.0 * n), 0.0};
  const double theta = mu ? 1.0 - p.eta * *mu : 1.0;
  const Matrix4 a = recursion_matrix(p);
  const std::array<double, 4> b1 = omega5_column(p);

  std::array<double, 5> slack{};
  for (std::size_t j = 0; j < 4; ++j) {
    double v = -theta * s[j] + q[j];
    for (std::size_t i = 0; i < 4; ++i) v += s[i] * a[i][j];
    slack[j] = -v;
  }
  double sb1 = 0.0;
  for (std::size_t i = 0; i < 4; ++i) sb1 += s[i] * b1[i];
  slack[4] = p.eta / 2.0 - p.eta * p.eta * L / 2.0 - sb1;
  return slack;
}

std::int64_t round_bits(Algorithm algo, const Compressor& comp, std::size_t d,
                        std::span<const std::size_t> degrees, BitsAccounting accounting) {
  std::int64_t per_message = 0;
  std::int64_t messages = 1;
  switch (algo) {
    case Algorithm::kBeer:
      per_message = message_bits(comp, d);
      messages = 2;
      break;
    case Algorithm::kChoco:
      per_message = message_bits(comp, d);
      break;
    case Algorithm::kDsgd:
    case Algorithm::kD2:
      per_message = message_bits(Compressor::identity(), d);
      break;
  }
  std::int64_t receivers = 0;
  for (std::size_t deg : degrees) {
    receivers += accounting == BitsAccounting::kBroadcast ? 1 : static_cast<std::int64_t>(deg);
  }
  return messages * per_message * receivers;
}

std::string format_real(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

void write_csv_header(std::ostream& out) { out << kCsvHeader << '\n'; }

void write_csv_row(std::ostream& out, const MetricsRow& row) {
  out << row.round << ',' << row.cum_bits << ',' << format_real(row.grad_norm_sq) << ',';
  write_optional(out, row.fval_gap);
  out << ',' << format_real(row.omegas.omega1) << ',' << format_real(row.omegas.omega2) << ','
      << format_real(row.omegas.omega3) << ',' << format_real(row.omegas.omega4) << ','
      << format_real(row.omegas.omega5) << ',';
  write_optional(out, row.lyapunov);
  out << ',';
  write_optional(out, row.test_accuracy);
  out << ',';
  write_optional(out, row.wall_ms);
  out << '\n';
  if (!out) throw std::runtime_error("csv: write failure");
}

void write_csv(std::ostream& out, std::span<const MetricsRow> rows) {
  write_csv_header(out);
  for (const MetricsRow& r : rows) write_csv_row(out, r);
  out.flush();
  if (!out) throw std::runtime_error("csv: write failure");
}

std::vector<MetricsRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw DataError(1, "unexpected csv header");
  std::vector<MetricsRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<std::string_view> f;
    std::string_view rest = line;
    for (;;) {
      const auto comma = rest.find(',');
      f.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (f.size() != 12) throw DataError(line_no, "expected 12 fields, got " + std::to_string(f.size()));
    MetricsRow r;
    r.round = parse_integer(f[0], line_no);
    r.cum_bits = parse_integer(f[1], line_no);
    r.grad_norm_sq = parse_required(f[2], line_no);
    r.fval_gap = parse_optional(f[3], line_no);
    r.omegas = OmegaVector{parse_required(f[4], line_no), parse_required(f[5], line_no), parse_required(f[6], line_no),
                           parse_required(f[7], line_no), parse_required(f[8], line_no)};
    r.lyapunov = parse_optional(f[9], line_no);
    r.test_accuracy = parse_optional(f[10], line_no);
    r.wall_ms = parse_optional(f[11], line_no);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace beer
