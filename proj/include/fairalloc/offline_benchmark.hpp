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

#ifndef FAIRALLOC_OFFLINE_BENCHMARK_HPP_
#define FAIRALLOC_OFFLINE_BENCHMARK_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fairalloc/core_model.hpp"
#include "fairalloc/feasible_sets.hpp"
#include "fairalloc/opf_policy.hpp"

namespace fairalloc {

// Best static allocation in hindsight.
struct OfflineSolution {
  std::vector<double> y_star;
  double value = 0.0;
  // R*_i = sum_t <x_i(t), y*_i>, without the unit offset.
  std::vector<double> per_agent_R;
  // Frank-Wolfe gap at y_star in value units (0 for closed forms).
  double fw_gap = 0.0;
  std::size_t iterations = 0;
};

struct OfflineOptions {
  // Absolute tolerance on the Frank-Wolfe gap; 1e-6 * T^(1-alpha) if absent.
  std::optional<double> tol;
  std::size_t max_iterations = 20000;
};

// Maximizes F(y) = sum_i w_i phi(<X_i, y_i>) over the family, where X holds
// the column-major N x m demand totals of `rounds` rounds. Projected gradient
// ascent with backtracking, stopped by the Frank-Wolfe gap. Throws
// ConvergenceError with the final gap when the cap is hit.
OfflineSolution offline_optimal_totals(const FeasibleFamily& family,
                                       const DemandMatrix& totals, std::size_t rounds,
                                       double alpha, std::span<const double> weights,
                                       const OfflineOptions& options = {});

// Same over the first `horizon` rounds of the trace (whole trace if 0).
OfflineSolution offline_optimal(const FeasibleFamily& family, const DemandTrace& trace,
                                double alpha, std::span<const double> weights,
                                const OfflineOptions& options = {},
                                std::size_t horizon = 0);

// F(y) for the given totals (no offset).
double offline_objective(const FeasibleFamily& family, const DemandMatrix& totals,
                         std::span<const double> y, double alpha,
                         std::span<const double> weights);

// Scheduling optimum for per-machine totals R_tot with unit weights:
// y*_i proportional to R_i^((1-alpha)/alpha). alpha in (0,1).
OfflineSolution scheduling_closed_form(std::span<const double> R_tot, double alpha);

// Exhaustive search over grid points of the feasible set (cache N <= 3,
// simplex m <= 3, Birkhoff m <= 2). grid_step must divide 1.
double brute_force_offline(const FeasibleFamily& family, const DemandTrace& trace,
                           double alpha, std::span<const double> weights,
                           double grid_step);

struct SurrogateRegret {
  double regret = 0.0;
  double comparator = 0.0;  // max over the family of <G, y>
  double played = 0.0;
};

// Linear surrogate regret over the first `horizon` rounds of a run, with
// same-round demands and the recorded R_i(t); the comparator is the lmo
// vertex for the summed gradient. horizon 0 means the whole run.
SurrogateRegret surrogate_regret(const RunRecord& run, const DemandTrace& trace,
                                 std::size_t horizon = 0);

// f(x, y) = (x^((1-alpha)/alpha) + y^((1-alpha)/alpha))^alpha, the optimal
// two-machine scheduling value up to the factor 1/(1-alpha).
double scheduling_value_fn(double x, double y, double alpha);

struct NonconvexityDiagnostics {
  double det_hessian;
  double d2f_dx2_at_11;
};

// Closed-form Hessian determinant of scheduling_value_fn at (x, y) and its
// second x-derivative at (1, 1). x, y > 0, alpha in (0,1).
NonconvexityDiagnostics nonconvexity_diagnostics(double x, double y, double alpha);

}  // namespace fairalloc

#endif  // FAIRALLOC_OFFLINE_BENCHMARK_HPP_
