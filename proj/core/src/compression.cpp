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

#include "beer/compression.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "beer/errors.hpp"

namespace beer {
namespace {

std::size_t parse_count(std::string_view text, std::string_view what) {
  std::size_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw std::invalid_argument("compressor: bad " + std::string(what) + " '" +
                                std::string(text) + "'");
  }
  return value;
}

void require_finite(std::span<const double> x) {
  for (double v : x)
    if (!std::isfinite(v)) throw std::invalid_argument("compress: non-finite input");
}

void require_k(std::size_t k, std::size_t d) {
  if (k > d) {
    throw std::invalid_argument("compress: k = " + std::to_string(k) +
                                " exceeds dimension " + std::to_string(d));
  }
}

double gsgd_tau(int bits, std::size_t d) {
  const double levels = std::ldexp(1.0, bits - 1);
  const double dd = static_cast<double>(d);
  return 1.0 + std::min(dd / (levels * levels), std::sqrt(dd) / levels);
}

Vector gsgd_compress(int bits, std::span<const double> x, RngStream& rng) {
  const std::size_t d = x.size();
  Vector out(d, 0.0);
  const double nrm = norm(x);
  if (nrm == 0.0) return out;
  const double levels = std::ldexp(1.0, bits - 1);
  const double scale = nrm / (gsgd_tau(bits, d) * levels);
  for (std::size_t i = 0; i < d; ++i) {
    const double u = rng.uniform();
    const double q = std::floor(levels * std::abs(x[i]) / nrm + u);
    const double sign = x[i] > 0.0 ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0);
    out[i] = scale * sign * q;
  }
  return out;
}

Vector topk_compress(std::size_t k, std::span<const double> x) {
  const std::size_t d = x.size();
  require_k(k, d);
  std::vector<std::size_t> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  auto by_magnitude = [&](std::size_t a, std::size_t b) {
    const double fa = std::abs(x[a]);
    const double fb = std::abs(x[b]);
    return fa != fb ? fa > fb : a < b;
  };
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), by_magnitude);
  Vector out(d, 0.0);
  for (std::size_t r = 0; r < k; ++r) out[idx[r]] = x[idx[r]];
  return out;
}

// Partial Fisher-Yates; returns the k chosen coordinates.
std::vector<std::size_t> random_subset(std::size_t k, std::size_t d, RngStream& rng) {
  std::vector<std::size_t> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t r = 0; r < k; ++r) {
    const std::size_t pick = r + static_cast<std::size_t>(rng.below(d - r));
    std::swap(idx[r], idx[pick]);
  }
  idx.resize(k);
  return idx;
}

Vector unbiased_randk_compress(std::size_t k, std::span<const double> x, RngStream& rng) {
  const std::size_t d = x.size();
  require_k(k, d);
  Vector out(d, 0.0);
  if (k == 0) return out;
  const double factor = static_cast<double>(d) / static_cast<double>(k);
  for (std::size_t i : random_subset(k, d, rng)) out[i] = factor * x[i];
  return out;
}

std::int64_t ceil_log2(std::size_t d) {
  std::int64_t bits = 0;
  while ((std::size_t{1} << bits) < d) ++bits;
  return bits;
}

}  // namespace

Compressor Compressor::gsgd(int bits) {
  if (bits < 2) throw std::invalid_argument("gsgd requires b >= 2");
  if (bits > 52) throw std::invalid_argument("gsgd: b too large");
  return Compressor(Kind::kGsgd, static_cast<std::size_t>(bits));
}

Compressor Compressor::topk(std::size_t k) {
  if (k == 0) throw std::invalid_argument("topk requires k >= 1");
  return Compressor(Kind::kTopK, k);
}

Compressor Compressor::unbiased_randk(std::size_t k) {
  if (k == 0) throw std::invalid_argument("urandk requires k >= 1");
  return Compressor(Kind::kUnbiasedRandK, k);
}

Compressor Compressor::scaled(const Compressor& inner) {
  if (inner.kind_ != Kind::kUnbiasedRandK) {
    throw std::invalid_argument("scaled: inner operator must be unbiased (urandk)");
  }
  return Compressor(Kind::kScaled, inner.param_, inner.kind_);
}

Compressor Compressor::parse(std::string_view text) {
  if (text == "identity" || text == "none") return identity();
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("unknown compressor '" + std::string(text) + "'");
  }
  const std::string_view head = text.substr(0, colon);
  const std::string_view rest = text.substr(colon + 1);
  if (head == "gsgd") return gsgd(static_cast<int>(parse_count(rest, "gsgd bit count")));
  if (head == "topk") return topk(parse_count(rest, "topk k"));
  if (head == "randk") return randk(parse_count(rest, "randk k"));
  if (head == "urandk") return unbiased_randk(parse_count(rest, "urandk k"));
  if (head == "scaled") return scaled(parse(rest));
  throw std::invalid_argument("unknown compressor '" + std::string(text) + "'");
}

std::string Compressor::name() const {
  switch (kind_) {
    case Kind::kIdentity: return "identity";
    case Kind::kGsgd: return "gsgd:" + std::to_string(param_);
    case Kind::kTopK: return "topk:" + std::to_string(param_);
    case Kind::kUnbiasedRandK: return "urandk:" + std::to_string(param_);
    case Kind::kScaled: return "randk:" + std::to_string(param_);
  }
  return "unknown";
}

double Compressor::omega(std::size_t d) const {
  switch (kind_) {
    case Kind::kIdentity: return 0.0;
    case Kind::kUnbiasedRandK:
      require_k(param_, d);
      return static_cast<double>(d) / static_cast<double>(param_) - 1.0;
    default:
      throw std::invalid_argument("omega: " + name() + " is not an unbiased operator");
  }
}

double bias_correct(double omega) {
  if (!(omega >= 0.0)) throw std::invalid_argument("bias_correct: omega must be >= 0");
  return 1.0 / (1.0 + omega);
}

double alpha_of(const Compressor& c, std::size_t d) {
  if (d == 0) throw std::invalid_argument("alpha_of: dimension must be >= 1");
  switch (c.kind()) {
    case Compressor::Kind::kIdentity: return 1.0;
    case Compressor::Kind::kGsgd: return 1.0 / gsgd_tau(static_cast<int>(c.parameter()), d);
    case Compressor::Kind::kTopK:
      require_k(c.parameter(), d);
      return static_cast<double>(c.parameter()) / static_cast<double>(d);
    case Compressor::Kind::kUnbiasedRandK: {
      const double w = c.omega(d);
      if (w >= 1.0) {
        throw std::invalid_argument("alpha_of: unbiased randk with omega >= 1 is not contractive; use randk/scaled");
      }
      return 1.0 - w;
    }
    case Compressor::Kind::kScaled:
      return bias_correct(Compressor::unbiased_randk(c.parameter()).omega(d));
  }
  return 1.0;
}

Vector compress(const Compressor& c, std::span<const double> x, RngStream& rng) {
  require_finite(x);
  switch (c.kind()) {
    case Compressor::Kind::kIdentity: return Vector(x.begin(), x.end());
    case Compressor::Kind::kGsgd: return gsgd_compress(static_cast<int>(c.parameter()), x, rng);
    case Compressor::Kind::kTopK: return topk_compress(c.parameter(), x);
    case Compressor::Kind::kUnbiasedRandK: return unbiased_randk_compress(c.parameter(), x, rng);
    case Compressor::Kind::kScaled: {
      const Compressor inner = Compressor::unbiased_randk(c.parameter());
      Vector out = unbiased_randk_compress(c.parameter(), x, rng);
      const double factor = bias_correct(inner.omega(x.size()));
      for (double& v : out) v *= factor;
      return out;
    }
  }
  return Vector(x.begin(), x.end());
}

Matrix compress_matrix(const Compressor& c, const Matrix& m, std::span<RngStream> rngs,
                       const Executor* executor) {
  if (rngs.size() != m.cols()) {
    throw DimensionError("compress_matrix: need one rng stream per column");
  }
  if (c.kind() == Compressor::Kind::kIdentity) {
    for (double v : m.data())
      if (!std::isfinite(v)) throw std::invalid_argument("compress: non-finite input");
    return m;
  }
  Matrix out(m.rows(), m.cols());
  auto body = [&](std::size_t j) {
    const Vector col = m.column(j);
    out.set_column(j, compress(c, col, rngs[j]));
  };
  if (executor != nullptr) {
    executor->for_each(m.cols(), body);
  } else {
    for (std::size_t j = 0; j < m.cols(); ++j) body(j);
  }
  return out;
}

std::int64_t message_bits(const Compressor& c, std::size_t d) {
  const auto dd = static_cast<std::int64_t>(d);
  switch (c.kind()) {
    case Compressor::Kind::kIdentity: return kFloatBits * dd;
    case Compressor::Kind::kGsgd: return kFloatBits + dd * static_cast<std::int64_t>(c.parameter());
    case Compressor::Kind::kTopK:
    case Compressor::Kind::kUnbiasedRandK:
    case Compressor::Kind::kScaled:
      return static_cast<std::int64_t>(c.parameter()) * (ceil_log2(d) + kFloatBits);
  }
  return kFloatBits * dd;
}

}  // namespace beer
