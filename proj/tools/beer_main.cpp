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

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "beer/data.hpp"
#include "beer/errors.hpp"
#include "beer/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitDivergence = 4;

struct RunArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  std::optional<std::size_t> threads;
};

struct SpectralArgs {
  std::optional<std::string> config;
  std::string kind = "ring";
  std::size_t n = 0;
  std::optional<double> p;
  std::uint64_t seed = 0;
};

struct ConstantArgs {
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
  double c_gamma = 0.0, c_eta = 0.0;
  double C = 4.0;
  std::optional<double> kappa;
  bool search = false;
};

struct BenchArgs {
  std::string compressor;
  std::size_t d = 0;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
};

struct SynthArgs {
  std::size_t samples = 32561;
  std::uint64_t seed = 0;
  std::string output;
};

int do_run(const RunArgs& a) {
  beer::ExperimentConfig cfg = beer::load_config(a.config);
  if (a.seed) cfg.seed = *a.seed;
  if (a.output) cfg.output = *a.output;
  if (a.threads) cfg.threads = *a.threads;
  if (!cfg.output) throw beer::ConfigError("output", "missing; set it in the config or pass --output");
  const beer::RunResult result = beer::run_experiment(cfg);
  beer::write_outputs(*cfg.output, result);
  const beer::MetricsRow& last = result.rows.back();
  std::cout << "rounds " << last.round << " grad_norm_sq " << beer::format_real(last.grad_norm_sq) << " cum_bits "
            << last.cum_bits << '\n';
  return kExitOk;
}

int do_spectral(const SpectralArgs& a) {
  beer::TopologyConfig topo;
  if (a.config) {
    topo = beer::load_config(*a.config).topology;
  } else {
    if (a.n == 0) throw beer::ConfigError("n", "pass --n or --config");
    try {
      topo.kind = beer::parse_graph_kind(a.kind);
    } catch (const std::invalid_argument& e) {
      throw beer::ConfigError("kind", e.what());
    }
    topo.n = a.n;
    topo.p = a.p;
    topo.seed = a.seed;
  }
  beer::print_spectral(std::cout, beer::spectral_report(topo));
  return kExitOk;
}

int do_check_constants(const ConstantArgs& a) {
  beer::ConstantReport r;
  r.C = a.C;
  r.kappa = a.kappa;
  if (a.search) {
    auto found = beer::search_rate_constants(a.C, a.kappa);
    if (!found) {
      std::cout << "no feasible constants on the search grid\nINFEASIBLE\n";
      return kExitOk;
    }
    r.constants = found->constants;
    r.c_gamma = found->c_gamma;
    r.c_eta = found->c_eta;
    r.check = found->check;
  } else {
    r.constants = beer::RateConstants{a.c1, a.c2, a.c3, a.c4};
    r.c_gamma = a.c_gamma;
    r.c_eta = a.c_eta;
    r.check = beer::verify_rate_constants(r.constants, a.c_gamma, a.c_eta, a.C, a.kappa);
  }
  beer::print_constants(std::cout, r);
  return kExitOk;
}

int do_compress_bench(const BenchArgs& a) {
  beer::Compressor comp = beer::Compressor::identity();
  try {
    comp = beer::Compressor::parse(a.compressor);
  } catch (const std::invalid_argument& e) {
    throw beer::ConfigError("compressor", e.what());
  }
  beer::print_compress_bench(std::cout, beer::compress_bench(comp, a.d, a.trials, a.seed));
  return kExitOk;
}

int do_synth(const SynthArgs& a) {
  std::ofstream out(a.output);
  if (!out) throw beer::DataError(0, "cannot open '" + a.output + "' for writing");
  beer::write_libsvm(out, beer::synth_a9a_like(a.samples, a.seed));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized optimization with compressed communication"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run an experiment and write CSV plus metadata");
  run->add_option("--config", run_args.config, "JSON experiment config")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", run_args.seed, "Override the master seed");
  run->add_option("--output", run_args.output, "Override the CSV output path");
  run->add_option("--threads", run_args.threads, "Worker threads for in-round parallelism")
      ->check(CLI::PositiveNumber);

  SpectralArgs spectral_args;
  auto* spectral = app.add_subcommand("spectral", "Report rho and C of a topology's mixing matrix");
  spectral->add_option("--config", spectral_args.config, "Take the topology from this config");
  spectral->add_option("--kind", spectral_args.kind, "ring, star, grid, complete or erdos_renyi");
  spectral->add_option("--n", spectral_args.n, "Number of clients");
  spectral->add_option("--p", spectral_args.p, "Erdos-Renyi edge probability");
  spectral->add_option("--seed", spectral_args.seed, "Erdos-Renyi seed");

  ConstantArgs constant_args;
  auto* constants = app.add_subcommand("check-constants", "Check the rate-constant feasibility system");
  constants->add_option("--c1", constant_args.c1);
  constants->add_option("--c2", constant_args.c2);
  constants->add_option("--c3", constant_args.c3);
  constants->add_option("--c4", constant_args.c4);
  constants->add_option("--c-gamma", constant_args.c_gamma);
  constants->add_option("--c-eta", constant_args.c_eta);
  constants->add_option("--C", constant_args.C, "||W - I||^2 bound (default 4)");
  constants->add_option("--kappa", constant_args.kappa, "L/mu; selects the PL system");
  constants->add_flag("--search", constant_args.search, "Search the grid instead of checking given constants");

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("compress-bench", "Measure a compressor's contraction ratio");
  bench->add_option("--compressor", bench_args.compressor)->required();
  bench->add_option("--d", bench_args.d)->required()->check(CLI::PositiveNumber);
  bench->add_option("--trials", bench_args.trials)->check(CLI::Range(std::size_t{2}, std::size_t{100000000}));
  bench->add_option("--seed", bench_args.seed);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth-data", "Write a synthetic a9a-like LIBSVM file");
  synth->add_option("--samples", synth_args.samples)->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_args.seed);
  synth->add_option("--output", synth_args.output)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return do_run(run_args);
    if (*spectral) return do_spectral(spectral_args);
    if (*constants) return do_check_constants(constant_args);
    if (*bench) return do_compress_bench(bench_args);
    if (*synth) return do_synth(synth_args);
  } catch (const beer::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const beer::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const beer::DivergenceError& e) {
    std::cerr << e.what() << '\n';
    return kExitDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
