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
#include <span>
#include <string>
#include <string_view>

#include "beer/linalg.hpp"
#include "beer/parallel.hpp"
#include "beer/rng.hpp"

namespace beer {

// Bits per real payload and per dense coordinate in the bit accounting.
inline constexpr std::int64_t kFloatBits = 32;

// Column-wise compression operator. Contractive kinds satisfy
// E||C(x) - x||^2 <= (1 - alpha) ||x||^2 with alpha = alpha_of(d).
//
//   identity        C(x) = x
//   gsgd:b          random dithering with 2^(b-1) levels, divided by tau
//   topk:k          keep the k largest magnitudes (ties: lower index first)
//   urandk:k        unbiased random-k, (d/k) x on a uniform k-subset; not
//                   contractive on its own (omega = d/k - 1)
//   scaled:<inner>  inner unbiased operator divided by (1 + omega)
//   randk:k         shorthand for scaled:urandk:k
class Compressor {
 public:
  enum class Kind { kIdentity, kGsgd, kTopK, kUnbiasedRandK, kScaled };

  static Compressor identity() { return Compressor(Kind::kIdentity, 0); }
  static Compressor gsgd(int bits);
  static Compressor topk(std::size_t k);
  static Compressor unbiased_randk(std::size_t k);
  static Compressor randk(std::size_t k) { return scaled(unbiased_randk(k)); }
  // Requires an unbiased inner operator.
  static Compressor scaled(const Compressor& inner);

  // Accepts the config strings listed above; throws std::invalid_argument.
  static Compressor parse(std::string_view text);

  Kind kind() const noexcept { return kind_; }
  // b for gsgd, k for topk/urandk, inner's parameter for scaled.
  std::size_t parameter() const noexcept { return param_; }
  bool is_unbiased() const noexcept {
    return kind_ == Kind::kIdentity || kind_ == Kind::kUnbiasedRandK;
  }
  bool is_deterministic() const noexcept {
    return kind_ == Kind::kIdentity || kind_ == Kind::kTopK;
  }
  std::string name() const;

  // Variance factor omega of an unbiased operator at dimension d.
  double omega(std::size_t d) const;

  friend bool operator==(const Compressor&, const Compressor&) = default;

 private:
  Compressor(Kind kind, std::size_t param, Kind inner = Kind::kIdentity)
      : kind_(kind), param_(param), inner_(inner) {}

  Kind kind_;
  std::size_t param_;
  Kind inner_;  // only meaningful for kScaled
};

// Contraction parameter alpha in (0, 1]. Throws for operators that are not
// contractive (bare urandk with omega >= 1).
double alpha_of(const Compressor& c, std::size_t d);

// Factor 1/(1 + omega) turning an unbiased operator into a contractive one.
double bias_correct(double omega);

Vector compress(const Compressor& c, std::span<const double> x, RngStream& rng);

// Column j is compressed with rngs[j]. Callers derive one substream per
// (client, round, purpose).
Matrix compress_matrix(const Compressor& c, const Matrix& m,
                       std::span<RngStream> rngs,
                       const Executor* executor = nullptr);

// Bits of one client broadcast of a d-dimensional message.
std::int64_t message_bits(const Compressor& c, std::size_t d);

}  // namespace beer
