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

#ifndef FAIRALLOC_HARNESS_HPP_
#define FAIRALLOC_HARNESS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fairalloc/adversaries.hpp"
#include "fairalloc/csv.hpp"
#include "fairalloc/feasible_sets.hpp"
#include "fairalloc/opf_policy.hpp"
#include "fairalloc/rng.hpp"

namespace fairalloc {

struct ExperimentConfig {
  FeasibleFamily family = FeasibleFamily::shared_cache(2, 1, 1);
  TraceSpec trace;
  std::vector<double> alphas{0.0};
  // Checkpoints, strictly ascending.
  std::vector<std::size_t> horizons{1000};
  std::vector<std::uint64_t> seeds{1};
  Mode mode = Mode::kFractional;
  double step_scale = kDefaultStepScale;
  // Demand lower bound used for validation; 1 for one-hot workloads.
  double delta = 1.0;
  // Offline Frank-Wolfe tolerance relative to T^(1-alpha).
  double offline_rel_tol = 1e-6;

  // Throws std::invalid_argument on an invalid configuration.
  void validate() const;
};

struct MetricsRow {
  std::size_t T = 0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  Mode mode = Mode::kFractional;
  // Online rewards after T rounds, unit offset included; realized integral
  // rewards in integral mode.
  std::vector<double> R;
  double fairness_online = 0.0;
  double fairness_offline = 0.0;
  double c_alpha_regret = 0.0;
  double surrogate_regret = 0.0;
  double min_rate = 0.0;
  double max_rate = 0.0;
  // Same quantities on raw rewards R - 1.
  double fairness_online_raw = 0.0;
  double c_alpha_regret_raw = 0.0;
  // Fractional rewards (offset included); equal to R in fractional mode.
  std::vector<double> R_fractional;
};

// offline_value - approx_factor(alpha) * aggregate_fairness(online_R).
double c_alpha_regret(double offline_value, std::span<const double> online_R, double alpha,
                      std::span<const double> weights);

// Least-squares slope of log(value) against log(T). Needs >= 4 points with
// positive T and value; throws std::invalid_argument otherwise.
double slope_fit(std::span<const std::pair<double, double>> points);

// Runs every (alpha, seed) cell, in parallel across cells, and returns rows
// ordered by alpha, then seed, then horizon.
std::vector<MetricsRow> run_experiment(const ExperimentConfig& config);

CsvTable metrics_table(std::span<const MetricsRow> rows);
void write_metrics_csv(std::span<const MetricsRow> rows, const std::filesystem::path& path);

// Random point of the family: a random convex combination of random vertices.
std::vector<double> random_feasible_point(const FeasibleFamily& family, SplitMix64& rng);

// Random doubly stochastic m x m matrix (column-major), as a convex
// combination of random permutations.
std::vector<double> random_doubly_stochastic(std::size_t m, SplitMix64& rng);

// Random inclusion-probability vector with entries in [0,1] summing to k.
std::vector<double> random_inclusion_vector(std::size_t n, std::size_t k, SplitMix64& rng);

// Projection audit for one input v: p = project(family, v) and
//   vi_residual = max(0, max_z <v - p, z - p>)
// where z ranges over the lmo vertex of v - p (the exact maximizer) and
// the given sample points.
struct ProjectionAudit {
  std::vector<double> projection;
  double vi_residual = 0.0;
  double sampled_residual = 0.0;
  bool feasible = false;
};
ProjectionAudit audit_projection(const FeasibleFamily& family, std::span<const double> v,
                                 std::span<const std::vector<double>> samples);

// Grid-search projection for the cache family with N <= 3: the closest grid
// point of the capped simplex at resolution step.
std::vector<double> grid_project_cache(std::span<const double> v, std::size_t k,
                                       double step);

// Empirical marginals of sample_integral over `draws` draws.
std::vector<double> empirical_marginals(const FeasibleFamily& family,
                                        std::span<const double> y, std::size_t draws,
                                        std::uint64_t seed);

}  // namespace fairalloc

#endif  // FAIRALLOC_HARNESS_HPP_
