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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "beer/algorithms.hpp"
#include "beer/compression.hpp"
#include "beer/data.hpp"
#include "beer/diagnostics.hpp"
#include "beer/oracles.hpp"
#include "beer/topology.hpp"

namespace beer {

struct TopologyConfig {
  GraphKind kind = GraphKind::kRing;
  std::size_t n = 1;
  std::optional<double> p;  // Erdos-Renyi edge probability
  std::uint64_t seed = 0;   // Erdos-Renyi sampling seed
};

struct ObjectiveConfig {
  Objective::Kind kind = Objective::Kind::kLogisticNonconvex;
  double reg = 0.05;   // logistic only
  double cond = 10.0;  // quadratic only
  std::size_t dim = 20;  // quadratic only
};

enum class PartitionKind { kUnshuffled, kShuffled };

struct DataConfig {
  std::optional<std::string> path;
  std::optional<std::string> test_path;
  bool synthetic_a9a = false;
  std::size_t samples = 32561;  // synthetic size
  std::optional<std::size_t> limit;
  PartitionKind partition = PartitionKind::kUnshuffled;
  // Seeds dataset synthesis and the shuffled partition; the master seed only
  // drives the algorithm's own randomness.
  std::uint64_t seed = 0;
};

struct StepConstantsConfig {
  std::optional<double> c_gamma;
  std::optional<double> c_eta;
  bool search = false;
};

struct LyapunovConfig {
  std::optional<RateConstants> constants;
  bool search = false;
  int rho_exponent = 2;
};

// JSON schema (keys not listed are rejected):
//   algorithm       "beer" | "choco" | "dsgd" | "d2"                 required
//   topology        {kind, n, p?, seed?}                             required
//   compressor      compressor string                                required
//   objective       {kind: "logistic"|"quadratic", reg?, cond?, d?}  required
//   data            {path?, test_path?, synthetic?: "a9a", samples?, limit?,
//                    partition?: "unshuffled"|"shuffled", seed?}
//   rounds          integer >= 1                                     required
//   batch           integer >= 1 | "full"                            default "full"
//   eta, gamma      real | "auto"                                    default "auto"
//   step_constants  {c_gamma?, c_eta?} | "search"
//   lyapunov        {c: [c1, c2, c3, c4] | "search", rho_exponent?}
//   fstar           real | "reference"
//   seed            integer                                          required
//   output          path (may come from the command line instead)
//   threads         integer >= 1                                     default 1
//   bits_accounting "broadcast" | "per_edge"                         default "broadcast"
//   log_every       integer >= 1                                     default 1
//   timing          bool; fills wall_ms, which makes output
//                   non-reproducible                                 default false
struct ExperimentConfig {
  Algorithm algorithm = Algorithm::kBeer;
  TopologyConfig topology;
  std::string compressor = "identity";
  ObjectiveConfig objective;
  DataConfig data;
  std::int64_t rounds = 1;
  std::optional<std::size_t> batch;
  std::optional<double> eta;    // empty = "auto"
  std::optional<double> gamma;  // empty = "auto"
  StepConstantsConfig step_constants;
  LyapunovConfig lyapunov;
  std::optional<double> fstar;
  bool fstar_reference = false;
  std::uint64_t seed = 0;
  std::optional<std::string> output;
  std::size_t threads = 1;
  BitsAccounting bits_accounting = BitsAccounting::kBroadcast;
  std::int64_t log_every = 1;
  bool timing = false;
  // Canonical JSON text of the parsed input, echoed into the metadata.
  std::string source;
};

// Throws ConfigError naming the dotted field path.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct Problem {
  Objective objective;
  std::vector<Shard> shards;
  SmoothnessInfo smoothness;
  std::optional<double> fstar;
  Vector x0;
  std::optional<Dataset> test;
};

// Data errors surface as DataError, bad combinations as ConfigError.
Problem build_problem(const ExperimentConfig& cfg);
MixingMatrix build_mixing(const TopologyConfig& topo);

// Everything derived from the config before the first round.
struct RunSetup {
  Problem problem;
  MixingMatrix W;
  Compressor compressor;
  HyperParams hp;
  double alpha = 1.0;
  std::optional<double> c_gamma;  // constants used for "auto" steps
  std::optional<double> c_eta;
  std::optional<RateConstants> lyapunov_constants;
};

RunSetup prepare_run(const ExperimentConfig& cfg);

struct RunResult {
  std::vector<MetricsRow> rows;
  AlgoState final_state;
  std::string metadata;  // JSON text
};

// Round 0 is logged before any step, then every log_every rounds and the
// final round. Throws DivergenceError.
RunResult run_experiment(const ExperimentConfig& cfg);
RunResult run_experiment(const ExperimentConfig& cfg, const RunSetup& setup);

// Writes <output> (CSV) and <output>.meta.json.
void write_outputs(const std::filesystem::path& output, const RunResult& result);

struct SpectralReport {
  std::size_t n = 0;
  double rho = 0.0;
  double C = 0.0;
  double lambda2_abs = 0.0;
  double recomputed_gap = 0.0;  // 1 - |lambda_2| from a fresh eigendecomposition
  Vector eigenvalues;
};

SpectralReport spectral_report(const TopologyConfig& topo);
void print_spectral(std::ostream& out, const SpectralReport& r);

struct ConstantReport {
  RateConstants constants;
  double c_gamma = 0.0;
  double c_eta = 0.0;
  double C = 0.0;
  std::optional<double> kappa;
  ConstantCheck check;
};

void print_constants(std::ostream& out, const ConstantReport& r);

struct CompressBenchReport {
  std::string compressor;
  std::size_t d = 0;
  std::size_t trials = 0;
  double nominal_alpha = 0.0;
  double mean_ratio = 0.0;
  double max_ratio = 0.0;
  double standard_error = 0.0;
  bool pass = false;  // mean_ratio <= 1 - alpha + 3 SE
};

// Draws trials Gaussian vectors and measures ||C(x) - x||^2 / ||x||^2.
CompressBenchReport compress_bench(const Compressor& comp, std::size_t d, std::size_t trials,
                                   std::uint64_t seed);
void print_compress_bench(std::ostream& out, const CompressBenchReport& r);

}  // namespace beer
