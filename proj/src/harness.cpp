// Copyright 2026 The fairalloc Authors
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

#include "fairalloc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fairalloc/errors.hpp"
#include "fairalloc/fairness.hpp"
#include "fairalloc/kernels.hpp"
#include "fairalloc/offline_benchmark.hpp"

namespace fairalloc {
namespace {

constexpr std::uint64_t kMarginalsTag = 0x4D41'5247'494E'414CULL;

std::vector<std::size_t> random_subset(std::size_t n, std::size_t k, SplitMix64& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

std::vector<double> dirichlet_weights(std::size_t n, SplitMix64& rng) {
  std::vector<double> w(n);
  double sum = 0.0;
  for (double& x : w) {
    x = -std::log(1.0 - rng.uniform());
    sum += x;
  }
  for (double& x : w) x /= sum;
  return w;
}

MetricsRow make_row(const ExperimentConfig& config, const RunRecord& record,
                    const DemandTrace& trace, std::size_t T, std::uint64_t seed) {
  const double alpha = record.alpha;
  const auto& w = record.weights;
  MetricsRow row;
  row.T = T;
  row.alpha = alpha;
  row.seed = seed;
  row.mode = record.mode;
  row.R_fractional = record.rewards_after(T);
  row.R = record.realized_after(T);

  OfflineOptions opts;
  opts.tol = config.offline_rel_tol * std::pow(static_cast<double>(T), 1.0 - alpha);
  const OfflineSolution offline = offline_optimal(config.family, trace, alpha, w, opts, T);
  row.fairness_offline = offline.value;
  row.fairness_online = aggregate_fairness(alpha, w, row.R);
  row.c_alpha_regret = c_alpha_regret(offline.value, row.R, alpha, w);
  row.surrogate_regret = surrogate_regret(record, trace, T).regret;

  std::vector<double> raw(row.R.size());
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = std::max(0.0, row.R[i] - 1.0);
  row.fairness_online_raw = aggregate_fairness(alpha, w, raw);
  row.c_alpha_regret_raw = c_alpha_regret(offline.value, raw, alpha, w);

  const auto [lo, hi] = std::minmax_element(row.R.begin(), row.R.end());
  row.min_rate = *lo / static_cast<double>(T);
  row.max_rate = *hi / static_cast<double>(T);
  return row;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (alphas.empty()) throw std::invalid_argument("no alpha values");
  for (double a : alphas) {
    if (!(a >= 0.0 && a < 1.0)) throw std::invalid_argument("alpha must lie in [0, 1)");
  }
  if (horizons.empty()) throw std::invalid_argument("no horizons");
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    if (horizons[i] == 0) throw std::invalid_argument("horizons must be positive");
    if (i > 0 && horizons[i] <= horizons[i - 1]) {
      throw std::invalid_argument("horizons must be strictly ascending");
    }
  }
  if (seeds.empty()) throw std::invalid_argument("no seeds");
  if (!(step_scale > 0.0) || !std::isfinite(step_scale)) {
    throw std::invalid_argument("step scale must be positive");
  }
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
  if (!(offline_rel_tol > 0.0)) throw std::invalid_argument("offline tolerance must be positive");
  trace.validate();
}

double c_alpha_regret(double offline_value, std::span<const double> online_R, double alpha,
                      std::span<const double> weights) {
  return offline_value - approx_factor(alpha) * aggregate_fairness(alpha, weights, online_R);
}

double slope_fit(std::span<const std::pair<double, double>> points) {
  if (points.size() < 4) throw std::invalid_argument("slope fit needs at least 4 points");
  double sx = 0.0, sy = 0.0;
  for (const auto& [T, v] : points) {
    if (!(T > 0.0) || !(v > 0.0)) {
      throw std::invalid_argument("slope fit needs positive horizons and values");
    }
    sx += std::log(T);
    sy += std::log(v);
  }
  const double n = static_cast<double>(points.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [T, v] : points) {
    const double dx = std::log(T) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(v) - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("slope fit needs distinct horizons");
  return sxy / sxx;
}

std::vector<MetricsRow> run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::size_t n_alpha = config.alphas.size();
  const std::size_t n_seed = config.seeds.size();
  const std::size_t n_T = config.horizons.size();
  const std::size_t T_max = config.horizons.back();
  const bool shared = prefix_stable(config.trace);

  std::vector<std::optional<DemandTrace>> traces(n_seed);
  if (shared) {
    kernels::omp::for_each_cell(n_seed, [&](std::size_t s) {
      traces[s] = make_trace(config.trace, config.family, T_max, config.seeds[s]);
    });
  }

  std::vector<MetricsRow> rows(n_alpha * n_seed * n_T);
  kernels::omp::for_each_cell(n_alpha * n_seed, [&](std::size_t cell) {
    const std::size_t a = cell / n_seed;
    const std::size_t s = cell % n_seed;
    const std::uint64_t seed = config.seeds[s];
    PolicyConfig pc;
    pc.params.alpha = config.alphas[a];
    pc.params.delta = config.delta;
    pc.params.mu = config.family.uniform_level();
    pc.step_scale = config.step_scale;
    pc.mode = config.mode;
    pc.seed = seed;
    MetricsRow* out = &rows[cell * n_T];
    if (shared) {
      const RunRecord record = run_policy(config.family, *traces[s], pc);
      for (std::size_t h = 0; h < n_T; ++h) {
        out[h] = make_row(config, record, *traces[s], config.horizons[h], seed);
      }
      return;
    }
    for (std::size_t h = 0; h < n_T; ++h) {
      const std::size_t T = config.horizons[h];
      const DemandTrace trace = make_trace(config.trace, config.family, T, seed);
      const RunRecord record = run_policy(config.family, trace, pc);
      out[h] = make_row(config, record, trace, T, seed);
    }
  });
  return rows;
}

CsvTable metrics_table(std::span<const MetricsRow> rows) {
  CsvTable table;
  table.header = {"T",        "alpha",          "seed",
                  "mode",     "fairness_online", "fairness_offline",
                  "c_alpha_regret", "surrogate_regret", "min_rate",
                  "max_rate"};
  const std::size_t m = rows.empty() ? 0 : rows.front().R.size();
  for (std::size_t i = 0; i < m; ++i) table.header.push_back("R_" + std::to_string(i + 1));
  table.header.push_back("fairness_online_raw");
  table.header.push_back("c_alpha_regret_raw");
  for (const auto& r : rows) {
    if (r.R.size() != m) throw std::invalid_argument("rows disagree on the agent count");
    std::vector<std::string> f{std::to_string(r.T),
                               format_double(r.alpha),
                               std::to_string(r.seed),
                               std::string(mode_tag(r.mode)),
                               format_double(r.fairness_online),
                               format_double(r.fairness_offline),
                               format_double(r.c_alpha_regret),
                               format_double(r.surrogate_regret),
                               format_double(r.min_rate),
                               format_double(r.max_rate)};
    for (double v : r.R) f.push_back(format_double(v));
    f.push_back(format_double(r.fairness_online_raw));
    f.push_back(format_double(r.c_alpha_regret_raw));
    table.rows.push_back(std::move(f));
  }
  return table;
}

void write_metrics_csv(std::span<const MetricsRow> rows, const std::filesystem::path& path) {
  atomic_write(path, metrics_table(rows).str());
}

std::vector<double> random_doubly_stochastic(std::size_t m, SplitMix64& rng) {
  const std::size_t terms = 1 + static_cast<std::size_t>(rng.below(2 * m));
  const auto w = dirichlet_weights(terms, rng);
  std::vector<double> M(m * m, 0.0);
  for (std::size_t t = 0; t < terms; ++t) {
    const auto perm = random_subset(m, m, rng);
    for (std::size_t i = 0; i < m; ++i) M[i * m + perm[i]] += w[t];
  }
  return M;
}

std::vector<double> random_feasible_point(const FeasibleFamily& family, SplitMix64& rng) {
  switch (family.kind()) {
    case FamilyKind::kSharedCache: {
      const std::size_t terms = 1 + static_cast<std::size_t>(rng.below(4));
      const auto w = dirichlet_weights(terms, rng);
      std::vector<double> y(family.dim(), 0.0);
      for (std::size_t t = 0; t < terms; ++t) {
        for (std::size_t j : random_subset(family.library(), family.capacity(), rng)) {
          y[j] += w[t];
        }
      }
      for (double& v : y) v = std::min(v, 1.0);
      return y;
    }
    case FamilyKind::kJobSimplex:
      return dirichlet_weights(family.agents(), rng);
    case FamilyKind::kBirkhoff:
      return random_doubly_stochastic(family.agents(), rng);
  }
  throw std::logic_error("unknown family");
}

std::vector<double> random_inclusion_vector(std::size_t n, std::size_t k, SplitMix64& rng) {
  if (k > n) throw std::invalid_argument("k exceeds n");
  std::vector<double> v(n), out(n);
  const double spread = 2.0 * static_cast<double>(k) / static_cast<double>(n);
  for (double& x : v) x = spread * rng.uniform();
  project_capped_simplex(v, static_cast<double>(k), out);
  return out;
}

ProjectionAudit audit_projection(const FeasibleFamily& family, std::span<const double> v,
                                 std::span<const std::vector<double>> samples) {
  ProjectionAudit a;
  a.projection = project(family, v);
  a.feasible = family.contains(a.projection);
  const std::size_t d = v.size();
  std::vector<double> r(d);
  for (std::size_t j = 0; j < d; ++j) r[j] = v[j] - a.projection[j];
  auto residual = [&](std::span<const double> z) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += r[j] * (z[j] - a.projection[j]);
    return s;
  };
  a.vi_residual = std::max(0.0, residual(lmo(family, r)));
  for (const auto& z : samples) a.sampled_residual = std::max(a.sampled_residual, residual(z));
  return a;
}

std::vector<double> grid_project_cache(std::span<const double> v, std::size_t k,
                                       double step) {
  const std::size_t N = v.size();
  if (N == 0 || N > 3 || k > N) throw std::invalid_argument("grid projection needs N <= 3");
  const auto n = static_cast<long>(std::round(1.0 / step));
  const long total = static_cast<long>(k) * n;
  std::vector<double> best(N), y(N);
  double best_d = std::numeric_limits<double>::infinity();
  std::vector<long> c(N);
  auto rec = [&](auto&& self, std::size_t j, long left) -> void {
    if (j + 1 == N) {
      if (left > n) return;
      c[j] = left;
      double dist = 0.0;
      for (std::size_t q = 0; q < N; ++q) {
        y[q] = static_cast<double>(c[q]) / static_cast<double>(n);
        dist += (y[q] - v[q]) * (y[q] - v[q]);
      }
      if (dist < best_d) {
        best_d = dist;
        best = y;
      }
      return;
    }
    for (long x = 0; x <= std::min(n, left); ++x) {
      c[j] = x;
      self(self, j + 1, left - x);
    }
  };
  rec(rec, 0, total);
  return best;
}

std::vector<double> empirical_marginals(const FeasibleFamily& family,
                                        std::span<const double> y, std::size_t draws,
                                        std::uint64_t seed) {
  if (draws == 0) throw std::invalid_argument("draws must be positive");
  SplitMix64 rng(derive_seed(seed, kMarginalsTag));
  std::vector<double> freq(family.dim(), 0.0);
  for (std::size_t n = 0; n < draws; ++n) {
    const auto s = sample_integral(family, y, rng);
    for (std::size_t j = 0; j < s.size(); ++j) freq[j] += s[j];
  }
  for (double& f : freq) f /= static_cast<double>(draws);
  return freq;
}

}  // namespace fairalloc
