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

#include "beer/rng.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace beer {
namespace {

__extension__ typedef unsigned __int128 u128;

}  // namespace

std::mt19937_64 RngStream::make(std::uint64_t seed,
                                std::initializer_list<std::uint64_t> extra) {
  std::vector<std::uint32_t> words;
  auto push = [&](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  push(extra.size());
  for (std::uint64_t v : extra) push(v);
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

RngStream RngStream::substream(std::uint64_t client, std::uint64_t round,
                               Purpose purpose) const {
  // The child seed is itself derived, so substreams of substreams stay
  // distinct from first-level ones.
  std::mt19937_64 mixer =
      make(seed_, {client, round, static_cast<std::uint64_t>(purpose)});
  const std::uint64_t child_seed = mixer();
  return RngStream(child_seed, make(child_seed, {}));
}

std::uint64_t RngStream::below(std::uint64_t bound) {
  // Lemire's multiply-shift with rejection.
  u128 m = static_cast<u128>(engine_()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<u128>(engine_()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double RngStream::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace beer
