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

#include <benchmark/benchmark.h>

#include <random>

#include "beer/algorithms.hpp"
#include "beer/compression.hpp"
#include "beer/data.hpp"
#include "beer/linalg.hpp"
#include "beer/parallel.hpp"
#include "beer/rng.hpp"
#include "beer/topology.hpp"

namespace {

beer::Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  beer::Matrix m(rows, cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = normal(gen);
  return m;
}

// d x n state times an n x n mixing matrix, the shape of every gossip round.
void BM_Matmul(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  const beer::Matrix x = random_matrix(d, n, 1);
  const beer::Matrix w = beer::metropolis_weights(beer::build_graph(beer::GraphKind::kRing, n)).W();
  for (auto _ : state) benchmark::DoNotOptimize(beer::matmul(x, w));
}
BENCHMARK(BM_Matmul)->Args({123, 10})->Args({1000, 32})->Args({10000, 64});

void BM_Compress(benchmark::State& state, const char* spec) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const beer::Compressor comp = beer::Compressor::parse(spec);
  const beer::Matrix x = random_matrix(d, 1, 2);
  const beer::Vector v = x.column(0);
  beer::RngStream rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(beer::compress(comp, v, rng));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(d));
}
BENCHMARK_CAPTURE(BM_Compress, gsgd5, "gsgd:5")->Arg(123)->Arg(10000);
BENCHMARK_CAPTURE(BM_Compress, topk10, "topk:10")->Arg(123)->Arg(10000);
BENCHMARK_CAPTURE(BM_Compress, randk10, "randk:10")->Arg(123)->Arg(10000);

// One BEER round on the heterogeneous logistic problem; range(0) is the
// number of worker threads (1 means serial).
void BM_BeerStep(benchmark::State& state) {
  const std::size_t n = 10;
  const auto threads = static_cast<std::size_t>(state.range(0));
  const beer::Dataset ds = beer::synth_a9a_like(2000, 4);
  const std::vector<beer::Shard> shards = beer::partition_unshuffled(ds, n);
  const beer::Objective obj = beer::Objective::logistic(beer::kA9aDim, 0.05);
  const beer::MixingMatrix w = beer::metropolis_weights(beer::build_graph(beer::GraphKind::kRing, n));
  const beer::Compressor comp = beer::Compressor::gsgd(5);
  const beer::Executor exec(threads);
  const beer::StepContext ctx{w, obj, shards, comp, beer::HyperParams{0.1, 0.5, 100}, beer::RngStream(5),
                              threads > 1 ? &exec : nullptr};
  beer::AlgoState s = beer::init_state(beer::Vector(beer::kA9aDim, 0.0), ctx);
  for (auto _ : state) {
    s = beer::beer_step(s, ctx);
    benchmark::DoNotOptimize(s.X);
  }
}
BENCHMARK(BM_BeerStep)->Arg(1)->Arg(4)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
