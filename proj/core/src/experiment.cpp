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

#include "beer/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "beer/errors.hpp"
#include "beer/parallel.hpp"
#include "beer/rng.hpp"

namespace beer {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

void allow_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& path) {
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (std::string_view a : allowed) known = known || key == a;
    if (!known) throw ConfigError(join(path, key), "unknown field");
  }
}

const json* find(const json& obj, std::string_view key) {
  auto it = obj.find(std::string(key));
  return it == obj.end() ? nullptr : &*it;
}

const json& require(const json& obj, std::string_view key, const std::string& path) {
  const json* v = find(obj, key);
  if (v == nullptr) throw ConfigError(join(path, key), "missing required field");
  return *v;
}

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  return j;
}

std::uint64_t as_unsigned(const json& j, const std::string& path, std::uint64_t min = 0) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  if (j.is_number_unsigned()) {
    const auto v = j.get<std::uint64_t>();
    if (v < min) throw ConfigError(path, "must be >= " + std::to_string(min));
    return v;
  }
  const auto v = j.get<std::int64_t>();
  if (v < 0 || static_cast<std::uint64_t>(v) < min) throw ConfigError(path, "must be >= " + std::to_string(min));
  return static_cast<std::uint64_t>(v);
}

double as_real(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

double as_positive(const json& j, const std::string& path) {
  const double v = as_real(j, path);
  if (!(v > 0.0)) throw ConfigError(path, "must be positive");
  return v;
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
  return j.get<bool>();
}

// real | "auto"; "auto" maps to empty.
std::optional<double> real_or_auto(const json& j, const std::string& path) {
  if (j.is_string()) {
    if (j.get<std::string>() == "auto") return std::nullopt;
    throw ConfigError(path, "expected a number or \"auto\"");
  }
  return as_positive(j, path);
}

TopologyConfig parse_topology(const json& j) {
  const std::string path = "topology";
  require_object(j, path);
  allow_keys(j, {"kind", "n", "p", "seed"}, path);
  TopologyConfig t;
  try {
    t.kind = parse_graph_kind(as_string(require(j, "kind", path), "topology.kind"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("topology.kind", e.what());
  }
  t.n = as_unsigned(require(j, "n", path), "topology.n", 1);
  if (const json* p = find(j, "p")) {
    t.p = as_real(*p, "topology.p");
    if (!(*t.p > 0.0 && *t.p <= 1.0)) throw ConfigError("topology.p", "must lie in (0, 1]");
  }
  if (t.kind == GraphKind::kErdosRenyi && !t.p) throw ConfigError("topology.p", "required for erdos_renyi");
  if (const json* s = find(j, "seed")) t.seed = as_unsigned(*s, "topology.seed");
  return t;
}

ObjectiveConfig parse_objective(const json& j) {
  const std::string path = "objective";
  require_object(j, path);
  allow_keys(j, {"kind", "reg", "cond", "d"}, path);
  ObjectiveConfig o;
  const std::string kind = as_string(require(j, "kind", path), "objective.kind");
  if (kind == "logistic") {
    o.kind = Objective::Kind::kLogisticNonconvex;
    if (find(j, "cond") || find(j, "d")) throw ConfigError("objective", "cond and d apply to the quadratic objective only");
    if (const json* r = find(j, "reg")) {
      o.reg = as_real(*r, "objective.reg");
      if (o.reg < 0.0) throw ConfigError("objective.reg", "must be >= 0");
    }
  } else if (kind == "quadratic") {
    o.kind = Objective::Kind::kQuadratic;
    if (find(j, "reg")) throw ConfigError("objective.reg", "applies to the logistic objective only");
    if (const json* c = find(j, "cond")) {
      o.cond = as_real(*c, "objective.cond");
      if (!(o.cond >= 1.0)) throw ConfigError("objective.cond", "must be >= 1");
    }
    if (const json* d = find(j, "d")) o.dim = as_unsigned(*d, "objective.d", 1);
  } else {
    throw ConfigError("objective.kind", "expected \"logistic\" or \"quadratic\", got \"" + kind + "\"");
  }
  return o;
}

DataConfig parse_data(const json& j) {
  const std::string path = "data";
  require_object(j, path);
  allow_keys(j, {"path", "test_path", "synthetic", "samples", "limit", "partition", "seed"}, path);
  DataConfig d;
  if (const json* p = find(j, "path")) d.path = as_string(*p, "data.path");
  if (const json* p = find(j, "test_path")) d.test_path = as_string(*p, "data.test_path");
  if (const json* s = find(j, "synthetic")) {
    const std::string name = as_string(*s, "data.synthetic");
    if (name != "a9a") throw ConfigError("data.synthetic", "only \"a9a\" is available");
    d.synthetic_a9a = true;
  }
  if (d.path && d.synthetic_a9a) throw ConfigError("data", "path and synthetic are mutually exclusive");
  if (const json* s = find(j, "samples")) {
    if (!d.synthetic_a9a) throw ConfigError("data.samples", "only meaningful with synthetic data");
    d.samples = as_unsigned(*s, "data.samples", 1);
  }
  if (const json* l = find(j, "limit")) d.limit = as_unsigned(*l, "data.limit", 1);
  if (const json* p = find(j, "partition")) {
    const std::string kind = as_string(*p, "data.partition");
    if (kind == "unshuffled") {
      d.partition = PartitionKind::kUnshuffled;
    } else if (kind == "shuffled") {
      d.partition = PartitionKind::kShuffled;
    } else {
      throw ConfigError("data.partition", "expected \"unshuffled\" or \"shuffled\"");
    }
  }
  if (const json* s = find(j, "seed")) d.seed = as_unsigned(*s, "data.seed");
  return d;
}

RateConstants parse_constants_array(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 4) throw ConfigError(path, "expected [c1, c2, c3, c4]");
  std::array<double, 4> c{};
  for (std::size_t k = 0; k < 4; ++k) {
    c[k] = as_real(j[k], path + "[" + std::to_string(k) + "]");
    if (c[k] < 0.0) throw ConfigError(path + "[" + std::to_string(k) + "]", "must be >= 0");
  }
  return RateConstants{c[0], c[1], c[2], c[3]};
}

void validate_compressor(const std::string& text) {
  try {
    (void)Compressor::parse(text);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("compressor", e.what());
  }
}

std::vector<Shard> partition(const Dataset& ds, const ExperimentConfig& cfg) {
  try {
    return cfg.data.partition == PartitionKind::kUnshuffled
               ? partition_unshuffled(ds, cfg.topology.n)
               : partition_shuffled(ds, cfg.topology.n, cfg.data.seed);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("topology.n", e.what());
  }
}

std::int64_t elapsed_ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("<root>", "expected a JSON object");
  allow_keys(root,
             {"algorithm", "topology", "compressor", "objective", "data", "rounds", "batch", "eta", "gamma",
              "step_constants", "lyapunov", "fstar", "seed", "output", "threads", "bits_accounting", "log_every",
              "timing"},
             "");

  ExperimentConfig cfg;
  try {
    cfg.algorithm = parse_algorithm(as_string(require(root, "algorithm", ""), "algorithm"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("algorithm", e.what());
  }
  cfg.topology = parse_topology(require(root, "topology", ""));
  cfg.compressor = as_string(require(root, "compressor", ""), "compressor");
  validate_compressor(cfg.compressor);
  cfg.objective = parse_objective(require(root, "objective", ""));
  if (const json* d = find(root, "data")) cfg.data = parse_data(*d);
  cfg.rounds = static_cast<std::int64_t>(as_unsigned(require(root, "rounds", ""), "rounds", 1));
  cfg.seed = as_unsigned(require(root, "seed", ""), "seed");

  if (const json* b = find(root, "batch")) {
    if (b->is_string()) {
      if (b->get<std::string>() != "full") throw ConfigError("batch", "expected an integer or \"full\"");
    } else {
      cfg.batch = as_unsigned(*b, "batch", 1);
    }
  }
  if (const json* e = find(root, "eta")) cfg.eta = real_or_auto(*e, "eta");
  if (const json* g = find(root, "gamma")) {
    cfg.gamma = real_or_auto(*g, "gamma");
    if (cfg.gamma && *cfg.gamma > 1.0) throw ConfigError("gamma", "must lie in (0, 1]");
  }
  if (const json* sc = find(root, "step_constants")) {
    if (sc->is_string()) {
      if (sc->get<std::string>() != "search") throw ConfigError("step_constants", "expected an object or \"search\"");
      cfg.step_constants.search = true;
    } else {
      require_object(*sc, "step_constants");
      allow_keys(*sc, {"c_gamma", "c_eta"}, "step_constants");
      if (const json* v = find(*sc, "c_gamma")) cfg.step_constants.c_gamma = as_positive(*v, "step_constants.c_gamma");
      if (const json* v = find(*sc, "c_eta")) cfg.step_constants.c_eta = as_positive(*v, "step_constants.c_eta");
    }
  }
  if (const json* ly = find(root, "lyapunov")) {
    require_object(*ly, "lyapunov");
    allow_keys(*ly, {"c", "rho_exponent"}, "lyapunov");
    const json& c = require(*ly, "c", "lyapunov");
    if (c.is_string()) {
      if (c.get<std::string>() != "search") throw ConfigError("lyapunov.c", "expected [c1, c2, c3, c4] or \"search\"");
      cfg.lyapunov.search = true;
    } else {
      cfg.lyapunov.constants = parse_constants_array(c, "lyapunov.c");
    }
    if (const json* p = find(*ly, "rho_exponent")) {
      cfg.lyapunov.rho_exponent = static_cast<int>(as_unsigned(*p, "lyapunov.rho_exponent"));
      if (cfg.lyapunov.rho_exponent > 8) throw ConfigError("lyapunov.rho_exponent", "must be <= 8");
    }
  }
  if (const json* f = find(root, "fstar")) {
    if (f->is_string()) {
      if (f->get<std::string>() != "reference") throw ConfigError("fstar", "expected a number or \"reference\"");
      cfg.fstar_reference = true;
    } else {
      cfg.fstar = as_real(*f, "fstar");
    }
  }
  if (const json* o = find(root, "output")) cfg.output = as_string(*o, "output");
  if (const json* t = find(root, "threads")) cfg.threads = as_unsigned(*t, "threads", 1);
  if (const json* b = find(root, "bits_accounting")) {
    const std::string mode = as_string(*b, "bits_accounting");
    if (mode == "broadcast") {
      cfg.bits_accounting = BitsAccounting::kBroadcast;
    } else if (mode == "per_edge") {
      cfg.bits_accounting = BitsAccounting::kPerEdge;
    } else {
      throw ConfigError("bits_accounting", "expected \"broadcast\" or \"per_edge\"");
    }
  }
  if (const json* l = find(root, "log_every")) cfg.log_every = static_cast<std::int64_t>(as_unsigned(*l, "log_every", 1));
  if (const json* t = find(root, "timing")) cfg.timing = as_bool(*t, "timing");

  if (cfg.objective.kind == Objective::Kind::kLogisticNonconvex && !cfg.data.path && !cfg.data.synthetic_a9a) {
    throw ConfigError("data", "the logistic objective needs data.path or data.synthetic");
  }
  if (cfg.objective.kind == Objective::Kind::kQuadratic && (cfg.data.path || cfg.data.synthetic_a9a)) {
    throw ConfigError("data", "the quadratic objective generates its own data");
  }
  if (cfg.lyapunov.search && !cfg.step_constants.search) {
    throw ConfigError("lyapunov.c", "\"search\" requires step_constants = \"search\"");
  }
  cfg.source = root.dump();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

MixingMatrix build_mixing(const TopologyConfig& topo) {
  if (topo.n == 1) return single_node_mixing();
  try {
    return metropolis_weights(build_graph(topo.kind, topo.n, topo.p, topo.seed));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("topology", e.what());
  }
}

Problem build_problem(const ExperimentConfig& cfg) {
  Problem p;
  if (cfg.objective.kind == Objective::Kind::kQuadratic) {
    QuadraticProblem q = synth_quadratic(cfg.topology.n, cfg.objective.dim, cfg.data.seed, cfg.objective.cond);
    p.objective = q.objective;
    p.shards = std::move(q.shards);
    p.smoothness = q.smoothness;
    p.fstar = q.fstar;
  } else {
    Dataset ds = cfg.data.path ? load_libsvm(*cfg.data.path) : synth_a9a_like(cfg.data.samples, cfg.data.seed);
    if (cfg.data.limit) ds = take_first(ds, *cfg.data.limit);
    if (cfg.data.test_path) {
      Dataset test = load_libsvm(*cfg.data.test_path, ds.dim());
      if (test.dim() > ds.dim()) {
        throw DataError(0, "test set has " + std::to_string(test.dim()) + " features, training set " +
                               std::to_string(ds.dim()));
      }
      p.test = std::move(test);
    }
    p.objective = Objective::logistic(ds.dim(), cfg.objective.reg);
    p.shards = partition(ds, cfg);
    p.smoothness = smoothness_estimate(p.objective, p.shards);
  }
  p.x0.assign(p.objective.dim, 0.0);
  if (cfg.fstar) {
    p.fstar = cfg.fstar;
  } else if (cfg.fstar_reference && cfg.objective.kind != Objective::Kind::kQuadratic) {
    p.fstar = reference_minimum(p.objective, p.shards, p.x0).fstar;
  }
  return p;
}

RunSetup prepare_run(const ExperimentConfig& cfg) {
  Problem problem = build_problem(cfg);
  MixingMatrix W = build_mixing(cfg.topology);
  const Compressor comp = Compressor::parse(cfg.compressor);
  const std::size_t d = problem.objective.dim;

  double alpha = 1.0;
  if (cfg.algorithm == Algorithm::kBeer || cfg.algorithm == Algorithm::kChoco) {
    try {
      alpha = alpha_of(comp, d);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("compressor", e.what());
    }
  }

  RunSetup setup{std::move(problem), std::move(W), comp, HyperParams{}, alpha, {}, {}, cfg.lyapunov.constants};
  std::optional<double> c_gamma = cfg.step_constants.c_gamma;
  std::optional<double> c_eta = cfg.step_constants.c_eta;
  if (cfg.step_constants.search) {
    if (!(setup.W.C() > 0.0)) throw ConfigError("step_constants", "search needs C > 0 (more than one client)");
    auto found = search_rate_constants(setup.W.C());
    if (!found) throw ConfigError("step_constants", "no feasible constants found");
    c_gamma = found->c_gamma;
    c_eta = found->c_eta;
    if (cfg.lyapunov.search) setup.lyapunov_constants = found->constants;
  }
  setup.c_gamma = c_gamma;
  setup.c_eta = c_eta;

  if (!cfg.eta || !cfg.gamma) {
    HyperParams theory = theoretical_stepsizes(alpha, setup.W.rho(), setup.W.C(), setup.problem.smoothness.L,
                                               c_gamma, c_eta);
    setup.hp.gamma = cfg.gamma.value_or(theory.gamma);
    if (cfg.eta) {
      setup.hp.eta = *cfg.eta;
    } else {
      // eta follows the gamma actually used.
      const double ce = c_eta.value_or(1.0 / 9.0);
      setup.hp.eta = ce * setup.hp.gamma * setup.W.rho() * setup.W.rho() / setup.problem.smoothness.L;
    }
  } else {
    setup.hp.eta = *cfg.eta;
    setup.hp.gamma = *cfg.gamma;
  }
  setup.hp.batch = cfg.batch;
  return setup;
}

RunResult run_experiment(const ExperimentConfig& cfg) { return run_experiment(cfg, prepare_run(cfg)); }

RunResult run_experiment(const ExperimentConfig& cfg, const RunSetup& setup) {
  const auto start = std::chrono::steady_clock::now();
  const Problem& prob = setup.problem;
  std::optional<Executor> executor;
  if (cfg.threads > 1) executor.emplace(cfg.threads);
  StepContext ctx{setup.W, prob.objective, prob.shards, setup.compressor, setup.hp, RngStream(cfg.seed),
                  executor ? &*executor : nullptr};

  std::vector<std::size_t> degrees(cfg.topology.n, 0);
  if (cfg.topology.n > 1) {
    const Matrix& w = setup.W.W();
    for (std::size_t i = 0; i < w.rows(); ++i)
      for (std::size_t j = 0; j < w.cols(); ++j)
        if (i != j && w(i, j) != 0.0) ++degrees[i];
  }
  const std::int64_t bits_per_round =
      round_bits(cfg.algorithm, setup.compressor, prob.objective.dim, degrees, cfg.bits_accounting);

  auto make_row = [&](const AlgoState& s, std::int64_t cum_bits) {
    MetricsRow row;
    row.round = s.round;
    row.cum_bits = cum_bits;
    row.grad_norm_sq = grad_norm_at_mean(s, prob.objective, prob.shards);
    row.omegas = omegas(s);
    if (prob.fstar) {
      row.fval_gap = global_value(prob.objective, prob.shards, column_mean(s.X)) - *prob.fstar;
      if (setup.lyapunov_constants) {
        row.lyapunov = lyapunov(s, *setup.lyapunov_constants, setup.W.rho(), prob.smoothness.L, *prob.fstar,
                                prob.objective, prob.shards, cfg.lyapunov.rho_exponent);
      }
    }
    if (prob.test) {
      row.test_accuracy = accuracy(prob.objective, prob.test->features, prob.test->labels, column_mean(s.X));
    }
    if (cfg.timing) row.wall_ms = static_cast<double>(elapsed_ms_since(start));
    return row;
  };

  RunResult result;
  AlgoState state = init_state(prob.x0, ctx);
  std::int64_t cum_bits = 0;
  result.rows.push_back(make_row(state, cum_bits));
  for (std::int64_t t = 1; t <= cfg.rounds; ++t) {
    state = step(cfg.algorithm, state, ctx);
    cum_bits += bits_per_round;
    if (t % cfg.log_every == 0 || t == cfg.rounds) result.rows.push_back(make_row(state, cum_bits));
  }
  result.final_state = std::move(state);

  ordered_json meta;
  meta["config"] = json::parse(cfg.source);
  meta["seed"] = cfg.seed;
  meta["algorithm"] = to_string(cfg.algorithm);
  meta["compressor"] = setup.compressor.name();
  meta["n"] = cfg.topology.n;
  meta["d"] = prob.objective.dim;
  meta["alpha"] = setup.alpha;
  meta["rho"] = setup.W.rho();
  meta["C"] = setup.W.C();
  meta["L"] = prob.smoothness.L;
  meta["mu"] = prob.smoothness.mu ? json(*prob.smoothness.mu) : json(nullptr);
  meta["fstar"] = prob.fstar ? json(*prob.fstar) : json(nullptr);
  meta["eta"] = setup.hp.eta;
  meta["gamma"] = setup.hp.gamma;
  meta["batch"] = setup.hp.batch ? json(*setup.hp.batch) : json("full");
  meta["c_gamma"] = setup.c_gamma ? json(*setup.c_gamma) : json(nullptr);
  meta["c_eta"] = setup.c_eta ? json(*setup.c_eta) : json(nullptr);
  if (setup.lyapunov_constants) {
    const RateConstants& c = *setup.lyapunov_constants;
    meta["lyapunov_constants"] = {c.c1, c.c2, c.c3, c.c4};
    meta["lyapunov_rho_exponent"] = cfg.lyapunov.rho_exponent;
  }
  meta["bits_accounting"] = cfg.bits_accounting == BitsAccounting::kBroadcast ? "broadcast" : "per_edge";
  meta["bits_per_round"] = bits_per_round;
  // The bit costs are a local convention, recorded so plots can state it.
  meta["bits_convention"] =
      "32-bit reals; identity 32d; gsgd:b 32+d*b; topk/randk:k k*(ceil(log2 d)+32); "
      "beer sends 2 messages per client per round, choco/dsgd/d2 send 1";
  meta["rounds"] = cfg.rounds;
  result.metadata = meta.dump(2);
  return result;
}

void write_outputs(const std::filesystem::path& output, const RunResult& result) {
  if (output.has_parent_path()) std::filesystem::create_directories(output.parent_path());
  {
    std::ofstream csv(output, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot open '" + output.string() + "' for writing");
    write_csv(csv, result.rows);
  }
  std::filesystem::path meta_path = output;
  meta_path += ".meta.json";
  std::ofstream meta(meta_path, std::ios::binary);
  if (!meta) throw std::runtime_error("cannot open '" + meta_path.string() + "' for writing");
  meta << result.metadata << '\n';
  if (!meta) throw std::runtime_error("write failure on '" + meta_path.string() + "'");
}

SpectralReport spectral_report(const TopologyConfig& topo) {
  const MixingMatrix W = build_mixing(topo);
  SpectralReport r;
  r.n = W.size();
  r.rho = W.rho();
  r.C = W.C();
  r.eigenvalues = symmetric_eigenvalues(W.W());
  // Second largest magnitude among the eigenvalues, recomputed here.
  Vector mags;
  for (double v : r.eigenvalues) mags.push_back(std::abs(v));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  r.lambda2_abs = mags.size() > 1 ? mags[1] : 0.0;
  r.recomputed_gap = 1.0 - r.lambda2_abs;
  return r;
}

void print_spectral(std::ostream& out, const SpectralReport& r) {
  out << "n " << r.n << '\n'
      << "rho " << format_real(r.rho) << '\n'
      << "C " << format_real(r.C) << '\n'
      << "|lambda2| " << format_real(r.lambda2_abs) << '\n'
      << "1-|lambda2| " << format_real(r.recomputed_gap) << '\n'
      << "eigenvalues";
  for (double v : r.eigenvalues) out << ' ' << format_real(v);
  out << '\n';
}

void print_constants(std::ostream& out, const ConstantReport& r) {
  out << "c1 " << format_real(r.constants.c1) << '\n'
      << "c2 " << format_real(r.constants.c2) << '\n'
      << "c3 " << format_real(r.constants.c3) << '\n'
      << "c4 " << format_real(r.constants.c4) << '\n'
      << "c_gamma " << format_real(r.c_gamma) << '\n'
      << "c_eta " << format_real(r.c_eta) << '\n'
      << "C " << format_real(r.C) << '\n';
  if (r.kappa) out << "kappa " << format_real(*r.kappa) << '\n';
  out << "slack";
  for (double s : r.check.slack) out << ' ' << format_real(s);
  out << '\n' << (r.check.feasible ? "FEASIBLE" : "INFEASIBLE") << '\n';
}

CompressBenchReport compress_bench(const Compressor& comp, std::size_t d, std::size_t trials, std::uint64_t seed) {
  if (d == 0 || trials < 2) throw std::invalid_argument("compress_bench: need d >= 1 and trials >= 2");
  CompressBenchReport r;
  r.compressor = comp.name();
  r.d = d;
  r.trials = trials;
  r.nominal_alpha = alpha_of(comp, d);
  const RngStream master(seed);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    RngStream data = master.substream(t, 0, Purpose::kBench);
    RngStream noise = master.substream(t, 1, Purpose::kBench);
    Vector x(d);
    for (double& v : x) v = data.normal();
    const Vector cx = compress(comp, x, noise);
    const double ratio = norm_sq(subtract(cx, x)) / norm_sq(x);
    sum += ratio;
    sum_sq += ratio * ratio;
    r.max_ratio = std::max(r.max_ratio, ratio);
  }
  const double n = static_cast<double>(trials);
  r.mean_ratio = sum / n;
  const double var = std::max(0.0, (sum_sq - n * r.mean_ratio * r.mean_ratio) / (n - 1.0));
  r.standard_error = std::sqrt(var / n);
  r.pass = r.mean_ratio <= 1.0 - r.nominal_alpha + 3.0 * r.standard_error;
  return r;
}

void print_compress_bench(std::ostream& out, const CompressBenchReport& r) {
  out << "compressor " << r.compressor << '\n'
      << "d " << r.d << '\n'
      << "trials " << r.trials << '\n'
      << "alpha " << format_real(r.nominal_alpha) << '\n'
      << "mean_ratio " << format_real(r.mean_ratio) << '\n'
      << "max_ratio " << format_real(r.max_ratio) << '\n'
      << "standard_error " << format_real(r.standard_error) << '\n'
      << (r.pass ? "PASS" : "FAIL") << '\n';
}

}  // namespace beer
