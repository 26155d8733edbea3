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

#include "fairalloc/offline_benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fairalloc/errors.hpp"
#include "fairalloc/fairness.hpp"
#include "fairalloc/kernels.hpp"

namespace fairalloc {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

std::vector<double> resolve_weights(std::span<const double> weights, std::size_t m) {
  if (weights.empty()) return std::vector<double>(m, 1.0);
  if (weights.size() != m) {
    throw std::invalid_argument("weight count does not match agent count");
  }
  return {weights.begin(), weights.end()};
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in [0, 1)");
  }
}

// Objective and gradient on totals scaled by 1/scale.
class ScaledObjective {
 public:
  ScaledObjective(const FeasibleFamily& family, const DemandMatrix& totals, double scale,
                  double alpha, std::vector<double> weights)
      : family_(family),
        totals_(totals),
        inv_scale_(1.0 / scale),
        alpha_(alpha),
        weights_(std::move(weights)),
        active_(family.agents()),
        r_(family.agents()),
        coeff_(family.agents()) {
    for (std::size_t i = 0; i < active_.size(); ++i) {
      active_[i] = weights_[i] > 0.0 && totals.l1_norm(i) > 0.0;
    }
  }

  // Returns false when an active agent gets no reward and alpha > 0.
  bool value(std::span<const double> y, double& out) {
    agent_rewards(family_, totals_, y, r_);
    out = 0.0;
    for (std::size_t i = 0; i < r_.size(); ++i) {
      if (!active_[i]) continue;
      const double r = std::max(0.0, r_[i] * inv_scale_);
      if (alpha_ > 0.0 && r <= 0.0) return false;
      out += weights_[i] * phi(alpha_, r);
    }
    return true;
  }

  void gradient(std::span<const double> y, std::vector<double>& g) {
    agent_rewards(family_, totals_, y, r_);
    for (std::size_t i = 0; i < r_.size(); ++i) {
      coeff_[i] = active_[i]
                      ? weights_[i] * phi_prime(alpha_, r_[i] * inv_scale_) * inv_scale_
                      : 0.0;
    }
    g.assign(family_.dim(), 0.0);
    add_agent_gradient(family_, totals_, coeff_, g);
  }

 private:
  const FeasibleFamily& family_;
  const DemandMatrix& totals_;
  double inv_scale_;
  double alpha_;
  std::vector<double> weights_;
  std::vector<char> active_;
  std::vector<double> r_;
  std::vector<double> coeff_;
};

}  // namespace

double offline_objective(const FeasibleFamily& family, const DemandMatrix& totals,
                         std::span<const double> y, double alpha,
                         std::span<const double> weights) {
  const auto w = resolve_weights(weights, family.agents());
  const auto r = agent_rewards(family, totals, y);
  std::vector<double> clipped(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) clipped[i] = std::max(0.0, r[i]);
  return aggregate_fairness(alpha, w, clipped);
}

OfflineSolution offline_optimal_totals(const FeasibleFamily& family,
                                       const DemandMatrix& totals, std::size_t rounds,
                                       double alpha, std::span<const double> weights,
                                       const OfflineOptions& options) {
  check_alpha(alpha);
  check_demand_shape(family, totals);
  if (rounds == 0) throw DataError("offline optimum needs at least one round");
  const double scale = static_cast<double>(rounds);
  const double value_unit = std::pow(scale, 1.0 - alpha);
  const double tol = options.tol.value_or(1e-6 * value_unit);
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const double tol_scaled = tol / value_unit;

  auto w = resolve_weights(weights, family.agents());
  ScaledObjective objective(family, totals, scale, alpha, w);

  std::vector<double> y = family.uniform_point();
  std::vector<double> g, g_candidate, trial(y.size()), candidate;
  double f = 0.0;
  if (!objective.value(y, f)) throw DataError("uniform point has an agent with no reward");
  double step = 1.0;
  double gap = 0.0;
  std::size_t it = 0;
  for (;; ++it) {
    objective.gradient(y, g);
    const auto vertex = lmo(family, g);
    gap = std::max(0.0, dot(g, vertex) - dot(g, y));
    if (gap <= tol_scaled) break;
    if (it >= options.max_iterations) {
      throw ConvergenceError("offline solver hit the iteration cap", gap * value_unit);
    }
    bool accepted = false;
    for (int tries = 0; tries < 80; ++tries, step *= 0.5) {
      for (std::size_t j = 0; j < y.size(); ++j) trial[j] = y[j] + step * g[j];
      candidate = project(family, trial);
      double lin = 0.0, dist2 = 0.0;
      for (std::size_t j = 0; j < y.size(); ++j) {
        const double d = candidate[j] - y[j];
        lin += g[j] * d;
        dist2 += d * d;
      }
      double fc = 0.0;
      if (!objective.value(candidate, fc)) continue;
      const double scale_f = std::max(1.0, std::abs(f));
      if (lin > 1e-9 * scale_f) {
        if (fc >= f + lin - dist2 / (2.0 * step) - 1e-15 * scale_f) {
          accepted = true;
          break;
        }
        continue;
      }
      // Near the optimum value differences drown in rounding; test the
      // local curvature with gradients instead.
      objective.gradient(candidate, g_candidate);
      double curvature = 0.0;
      for (std::size_t j = 0; j < y.size(); ++j) {
        curvature += (g[j] - g_candidate[j]) * (candidate[j] - y[j]);
      }
      if (curvature <= dist2 / step) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw ConvergenceError("offline line search failed", gap * value_unit);
    }
    y.swap(candidate);
    objective.value(y, f);
    step = std::min(step * 2.0, 1e12);
  }

  OfflineSolution sol;
  sol.per_agent_R = agent_rewards(family, totals, y);
  for (double& r : sol.per_agent_R) r = std::max(0.0, r);
  sol.value = aggregate_fairness(alpha, w, sol.per_agent_R);
  sol.y_star = std::move(y);
  sol.fw_gap = gap * value_unit;
  sol.iterations = it;
  return sol;
}

OfflineSolution offline_optimal(const FeasibleFamily& family, const DemandTrace& trace,
                                double alpha, std::span<const double> weights,
                                const OfflineOptions& options, std::size_t horizon) {
  const std::size_t T = horizon == 0 ? trace.horizon() : horizon;
  if (trace.rows() != family.library() || trace.agents() != family.agents()) {
    throw DataError("trace shape does not match " + family.describe());
  }
  const DemandMatrix totals = kernels::omp::demand_totals(trace, T);
  return offline_optimal_totals(family, totals, T, alpha, weights, options);
}

OfflineSolution scheduling_closed_form(std::span<const double> R_tot, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("closed form needs alpha in (0, 1)");
  }
  if (R_tot.empty()) throw std::invalid_argument("no machines");
  double rmax = 0.0;
  for (double r : R_tot) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw std::invalid_argument("machine totals must be positive");
    }
    rmax = std::max(rmax, r);
  }
  const double p = (1.0 - alpha) / alpha;
  OfflineSolution sol;
  sol.y_star.resize(R_tot.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < R_tot.size(); ++i) {
    sol.y_star[i] = std::pow(R_tot[i] / rmax, p);
    sum += sol.y_star[i];
  }
  sol.per_agent_R.resize(R_tot.size());
  for (std::size_t i = 0; i < R_tot.size(); ++i) {
    sol.y_star[i] /= sum;
    sol.per_agent_R[i] = R_tot[i] * sol.y_star[i];
  }
  sol.value = aggregate_fairness(alpha, {}, sol.per_agent_R);
  return sol;
}

double brute_force_offline(const FeasibleFamily& family, const DemandTrace& trace,
                           double alpha, std::span<const double> weights,
                           double grid_step) {
  check_alpha(alpha);
  if (!(grid_step > 0.0 && grid_step <= 1.0)) {
    throw std::invalid_argument("grid step must lie in (0, 1]");
  }
  const double nd = std::round(1.0 / grid_step);
  if (std::abs(nd * grid_step - 1.0) > 1e-9 || nd > 1e6) {
    throw std::invalid_argument("grid step must divide 1");
  }
  const auto n = static_cast<long>(nd);
  const std::size_t d = family.dim();
  switch (family.kind()) {
    case FamilyKind::kSharedCache:
      if (family.library() > 3) throw std::invalid_argument("brute force needs N <= 3");
      break;
    case FamilyKind::kJobSimplex:
      if (family.agents() > 3) throw std::invalid_argument("brute force needs m <= 3");
      break;
    case FamilyKind::kBirkhoff:
      if (family.agents() > 2) throw std::invalid_argument("brute force needs m <= 2");
      break;
  }
  if (trace.rows() != family.library() || trace.agents() != family.agents()) {
    throw DataError("trace shape does not match " + family.describe());
  }
  const DemandMatrix totals = kernels::omp::demand_totals(trace, trace.horizon());
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> y(d);
  auto consider = [&] { best = std::max(best, offline_objective(family, totals, y, alpha, weights)); };

  if (family.kind() == FamilyKind::kBirkhoff) {
    if (family.agents() == 1) {
      y[0] = 1.0;
      consider();
    } else {
      for (long a = 0; a <= n; ++a) {
        const double v = static_cast<double>(a) / nd;
        y = {v, 1.0 - v, 1.0 - v, v};
        consider();
      }
    }
    return best;
  }
  // Integer compositions c with sum c = total, 0 <= c_j <= n.
  const long total = family.kind() == FamilyKind::kSharedCache
                         ? static_cast<long>(family.capacity()) * n
                         : n;
  std::vector<long> c(d, 0);
  auto rec = [&](auto&& self, std::size_t j, long left) -> void {
    if (j + 1 == d) {
      if (left > n) return;
      c[j] = left;
      for (std::size_t q = 0; q < d; ++q) y[q] = static_cast<double>(c[q]) / nd;
      consider();
      return;
    }
    for (long v = 0; v <= std::min(n, left); ++v) {
      c[j] = v;
      self(self, j + 1, left - v);
    }
  };
  rec(rec, 0, total);
  return best;
}

SurrogateRegret surrogate_regret(const RunRecord& run, const DemandTrace& trace,
                                 std::size_t horizon) {
  const std::size_t T = horizon == 0 ? run.horizon : horizon;
  if (T > run.horizon) throw DataError("horizon exceeds the recorded run");
  const auto sums = kernels::omp::surrogate_sums(run.family, trace, run.rewards_before,
                                                 run.increments, run.alpha, run.weights, T);
  const auto vertex = lmo(run.family, sums.gradient);
  SurrogateRegret out;
  out.comparator = dot(sums.gradient, vertex);
  out.played = sums.played;
  out.regret = out.comparator - out.played;
  return out;
}

double scheduling_value_fn(double x, double y, double alpha) {
  const double p = (1.0 - alpha) / alpha;
  return std::pow(std::pow(x, p) + std::pow(y, p), alpha);
}

NonconvexityDiagnostics nonconvexity_diagnostics(double x, double y, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1)");
  }
  if (!(x > 0.0 && y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) {
    throw std::invalid_argument("x and y must be positive");
  }
  const double q = 1.0 / alpha - 1.0;
  const double xq = std::pow(x, q);
  const double yq = std::pow(y, q);
  const double denom = y * std::pow(x, 1.0 / alpha) + x * std::pow(y, 1.0 / alpha);
  const double det = (2.0 * alpha - 1.0) * (alpha - 1.0) * (alpha - 1.0) * xq * yq *
                     std::pow(xq + yq, 2.0 * alpha) / (denom * denom);
  const double d2 = -std::pow(2.0, alpha - 2.0) * (1.0 - alpha) *
                    (alpha * alpha + 2.0 * alpha - 1.0) / alpha;
  return {det, d2};
}

}  // namespace fairalloc
