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

#include "beer/data.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "beer/errors.hpp"
#include "beer/rng.hpp"

namespace beer {
namespace {

struct ParsedRow {
  double label;
  std::vector<std::pair<std::size_t, double>> entries;  // 0-based column
};

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

double parse_real(std::string_view tok, std::size_t line, std::string_view what) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end || tok.empty() || !std::isfinite(v)) {
    throw DataError(line, "malformed " + std::string(what) + " '" + std::string(tok) + "'");
  }
  return v;
}

ParsedRow parse_row(std::string_view text, std::size_t line) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    std::size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos > start) tokens.push_back(text.substr(start, pos - start));
  }

  ParsedRow row{};
  const double raw_label = parse_real(tokens.front(), line, "label");
  if (raw_label == 1.0) {
    row.label = 1.0;
  } else if (raw_label == -1.0 || raw_label == 0.0) {
    row.label = -1.0;
  } else {
    throw DataError(line, "label '" + std::string(tokens.front()) + "' is not one of +1, -1, 0");
  }

  std::size_t last_index = 0;
  for (std::size_t t = 1; t < tokens.size(); ++t) {
    const std::string_view tok = tokens[t];
    const auto colon = tok.find(':');
    if (colon == std::string_view::npos || colon == 0) {
      throw DataError(line, "malformed token '" + std::string(tok) + "'");
    }
    const std::string_view idx_text = tok.substr(0, colon);
    std::size_t index = 0;
    auto [ptr, ec] = std::from_chars(idx_text.data(), idx_text.data() + idx_text.size(), index);
    if (ec != std::errc() || ptr != idx_text.data() + idx_text.size()) {
      // from_chars rejects a leading '-', so "-3:1" lands here too.
      if (!idx_text.empty() && idx_text.front() == '-') {
        throw DataError(line, "feature index < 1 in '" + std::string(tok) + "'");
      }
      throw DataError(line, "malformed token '" + std::string(tok) + "'");
    }
    if (index < 1) throw DataError(line, "feature index < 1 in '" + std::string(tok) + "'");
    if (index <= last_index) {
      throw DataError(line, "feature indices not strictly increasing at '" + std::string(tok) + "'");
    }
    last_index = index;
    const double v = parse_real(tok.substr(colon + 1), line, "feature value");
    row.entries.emplace_back(index - 1, v);
  }
  return row;
}

std::string shortest(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::vector<Shard> split_contiguous(const Dataset& ds, const std::vector<std::size_t>& order,
                                    std::size_t n) {
  const std::size_t m = ds.size();
  if (n == 0) throw std::invalid_argument("partition: need at least one client");
  if (n > m) {
    throw std::invalid_argument("partition: " + std::to_string(n) + " clients but only " +
                                std::to_string(m) + " samples");
  }
  std::vector<Shard> shards;
  shards.reserve(n);
  const std::size_t base = m / n;
  const std::size_t extra = m % n;
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t count = base + (i < extra ? 1 : 0);
    Shard s{Matrix(count, ds.dim()), Vector(count), i};
    for (std::size_t r = 0; r < count; ++r) {
      const std::size_t src = order[cursor + r];
      std::copy(ds.features.row(src).begin(), ds.features.row(src).end(), s.features.row(r).begin());
      s.labels[r] = ds.labels[src];
    }
    cursor += count;
    shards.push_back(std::move(s));
  }
  return shards;
}

// Orthonormal d x d matrix from Gram-Schmidt on Gaussian columns.
Matrix random_orthogonal(std::size_t d, RngStream& rng) {
  Matrix q(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    for (;;) {
      Vector v(d);
      for (double& x : v) x = rng.normal();
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t k = 0; k < j; ++k) {
          const Vector qk = q.column(k);
          const double proj = dot(v, qk);
          for (std::size_t i = 0; i < d; ++i) v[i] -= proj * qk[i];
        }
      }
      const double nv = norm(v);
      if (nv > 1e-8) {
        for (double& x : v) x /= nv;
        q.set_column(j, v);
        break;
      }
    }
  }
  return q;
}

}  // namespace

Dataset parse_libsvm(std::istream& in, std::optional<std::size_t> d_hint) {
  std::vector<ParsedRow> rows;
  std::size_t max_index = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;
    ParsedRow row = parse_row(line, line_no);
    if (!row.entries.empty()) max_index = std::max(max_index, row.entries.back().first + 1);
    rows.push_back(std::move(row));
  }
  if (in.bad()) throw DataError(0, "read failure");
  if (rows.empty()) throw DataError(0, "dataset contains no samples");
  const std::size_t d = std::max(d_hint.value_or(0), max_index);
  if (d == 0) throw DataError(0, "dataset has zero feature dimension");

  Dataset ds{Matrix(rows.size(), d), Vector(rows.size())};
  for (std::size_t r = 0; r < rows.size(); ++r) {
    ds.labels[r] = rows[r].label;
    for (const auto& [col, v] : rows[r].entries) ds.features(r, col) = v;
  }
  return ds;
}

Dataset parse_libsvm(std::string_view text, std::optional<std::size_t> d_hint) {
  std::istringstream in{std::string(text)};
  return parse_libsvm(in, d_hint);
}

Dataset load_libsvm(const std::filesystem::path& path, std::optional<std::size_t> d_hint) {
  std::ifstream in(path);
  if (!in) throw DataError(0, "cannot open dataset '" + path.string() + "'");
  return parse_libsvm(in, d_hint);
}

void write_libsvm(std::ostream& out, const Dataset& ds) {
  for (std::size_t r = 0; r < ds.size(); ++r) {
    out << (ds.labels[r] > 0.0 ? "+1" : "-1");
    auto row = ds.features.row(r);
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (row[k] != 0.0) out << ' ' << (k + 1) << ':' << shortest(row[k]);
    }
    out << '\n';
  }
  if (!out) throw DataError(0, "write failure");
}

Dataset take_first(const Dataset& ds, std::size_t m) {
  const std::size_t keep = std::min(m, ds.size());
  Dataset out{Matrix(keep, ds.dim()), Vector(ds.labels.begin(), ds.labels.begin() + static_cast<std::ptrdiff_t>(keep))};
  std::copy_n(ds.features.data().begin(), keep * ds.dim(), out.features.data().begin());
  return out;
}

std::vector<Shard> partition_unshuffled(const Dataset& ds, std::size_t n) {
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ds.labels[a] < ds.labels[b]; });
  return split_contiguous(ds, order, n);
}

std::vector<Shard> partition_shuffled(const Dataset& ds, std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), 0);
  RngStream rng = RngStream(seed).substream(0, 0, Purpose::kPartition);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[static_cast<std::size_t>(rng.below(i))]);
  }
  return split_contiguous(ds, order, n);
}

double heterogeneity(const Objective& obj, std::span<const Shard> shards,
                     std::span<const double> x) {
  const Vector g = global_gradient(obj, shards, x);
  double worst = 0.0;
  for (const Shard& s : shards) worst = std::max(worst, norm(subtract(full_gradient(obj, s, x), g)));
  return worst;
}

QuadraticProblem synth_quadratic(std::size_t n, std::size_t d, std::uint64_t seed, double cond) {
  if (!(cond >= 1.0)) throw std::invalid_argument("synth_quadratic: cond must be >= 1");
  if (n == 0 || d == 0) throw std::invalid_argument("synth_quadratic: n and d must be positive");
  RngStream rng = RngStream(seed).substream(0, 0, Purpose::kData);

  // Eigenvalues of H run from 1 down to 1/cond on a log scale.
  Vector sing(d, 1.0);
  for (std::size_t j = 0; j < d && d > 1; ++j) {
    sing[j] = std::pow(cond, -0.5 * static_cast<double>(j) / static_cast<double>(d - 1));
  }
  const Matrix q = random_orthogonal(d, rng);
  Matrix a(d, d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) a(r, c) = sing[r] * q(c, r);  // diag(s) Q^T

  std::vector<Vector> centers;
  constexpr int kMaxAttempts = 1000;
  for (int attempt = 0;; ++attempt) {
    if (attempt == kMaxAttempts) throw std::runtime_error("synth_quadratic: could not separate minimizers");
    centers.assign(n, Vector(d));
    for (auto& c : centers)
      for (double& v : c) v = 2.0 * rng.normal();
    bool separated = true;
    for (std::size_t i = 0; i < n && separated; ++i)
      for (std::size_t j = i + 1; j < n && separated; ++j)
        separated = norm(subtract(centers[i], centers[j])) >= 1.0;
    if (separated) break;
  }

  QuadraticProblem p;
  p.objective = Objective::quadratic(d);
  for (std::size_t i = 0; i < n; ++i) {
    p.shards.push_back(Shard{a, matvec(a, centers[i]), i});
  }
  p.smoothness.L = sing.front() * sing.front();
  p.smoothness.mu = sing.back() * sing.back();

  p.minimizer.assign(d, 0.0);
  for (const auto& c : centers)
    for (std::size_t k = 0; k < d; ++k) p.minimizer[k] += c[k] / static_cast<double>(n);
  p.fstar = global_value(p.objective, p.shards, p.minimizer);
  return p;
}

Dataset synth_a9a_like(std::size_t m, std::uint64_t seed) {
  // Group sizes of the Adult one-hot encoding; they sum to 123.
  static constexpr std::array<std::size_t, 14> kGroups = {5, 8, 5, 16, 5, 7, 14, 6, 5, 2, 2, 2, 5, 41};
  constexpr double kPositiveRate = 0.24;

  // Category frequencies are a fixed property of the "schema", independent
  // of the sampling seed, so different seeds draw from the same population.
  RngStream schema(0xa9a);
  std::vector<Vector> neg_weights;
  std::vector<Vector> pos_weights;
  for (std::size_t size : kGroups) {
    Vector base(size);
    Vector shift(size);
    for (std::size_t c = 0; c < size; ++c) {
      base[c] = 1.5 * schema.normal();
      shift[c] = 1.2 * schema.normal();
    }
    Vector neg(size);
    Vector pos(size);
    for (std::size_t c = 0; c < size; ++c) {
      neg[c] = std::exp(base[c] - 0.5 * shift[c]);
      pos[c] = std::exp(base[c] + 0.5 * shift[c]);
    }
    neg_weights.push_back(std::move(neg));
    pos_weights.push_back(std::move(pos));
  }

  auto draw = [](const Vector& w, RngStream& r) {
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    double u = r.uniform() * total;
    for (std::size_t c = 0; c < w.size(); ++c) {
      if (u < w[c]) return c;
      u -= w[c];
    }
    return w.size() - 1;
  };

  RngStream rng = RngStream(seed).substream(1, 0, Purpose::kData);
  Dataset ds{Matrix(m, kA9aDim), Vector(m)};
  for (std::size_t r = 0; r < m; ++r) {
    const bool positive = rng.uniform() < kPositiveRate;
    ds.labels[r] = positive ? 1.0 : -1.0;
    std::size_t offset = 0;
    for (std::size_t g = 0; g < kGroups.size(); ++g) {
      const std::size_t c = draw(positive ? pos_weights[g] : neg_weights[g], rng);
      ds.features(r, offset + c) = 1.0;
      offset += kGroups[g];
    }
  }
  return ds;
}

}  // namespace beer
