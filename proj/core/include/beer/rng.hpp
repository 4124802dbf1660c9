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
#include <random>

namespace beer {

// What a random draw is used for. Each (client, round, purpose) triple gets
// its own substream so results do not depend on evaluation order.
enum class Purpose : std::uint32_t {
  kGradient = 1,
  kCompressModel = 2,
  kCompressTracker = 3,
  kPartition = 4,
  kData = 5,
  kBench = 6,
};

// Deterministic random stream. Derivation goes through std::seed_seq and the
// engine is std::mt19937_64, both of which are bit-specified by the standard;
// the real/integer draws below are hand-rolled for the same reason.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(make(seed, {})) {}

  std::uint64_t seed() const noexcept { return seed_; }

  // Independent child stream keyed by (client, round, purpose).
  RngStream substream(std::uint64_t client, std::uint64_t round,
                      Purpose purpose) const;

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Uniform on {0, ..., bound - 1}; bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  // Standard normal via Box-Muller.
  double normal();

 private:
  RngStream(std::uint64_t seed, std::mt19937_64 engine)
      : seed_(seed), engine_(engine) {}
  static std::mt19937_64 make(std::uint64_t seed,
                              std::initializer_list<std::uint64_t> extra);

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace beer
