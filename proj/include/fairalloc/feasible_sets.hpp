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

#ifndef FAIRALLOC_FEASIBLE_SETS_HPP_
#define FAIRALLOC_FEASIBLE_SETS_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fairalloc/core_model.hpp"
#include "fairalloc/rng.hpp"

namespace fairalloc {

// One of the three allocation polytopes.
//
// Points are stored in a compact "decision vector" layout:
//   shared cache  length N; the single vector y common to every agent.
//   job simplex   length m; y[i] is the fraction of the job sent to machine i.
//   Birkhoff      length m*m, column-major; y[i*m + j] is how much agent i is
//                 matched to resource j (so agent i's allocation is contiguous).
// Demand matrices have N rows for the cache, 1 row for the job simplex and m
// rows for the Birkhoff polytope.
class FeasibleFamily {
 public:
  static FeasibleFamily shared_cache(std::size_t library, std::size_t capacity,
                                     std::size_t users);
  static FeasibleFamily job_simplex(std::size_t machines);
  static FeasibleFamily birkhoff(std::size_t side);

  FamilyKind kind() const { return kind_; }
  std::size_t agents() const { return agents_; }
  // Demand rows (N).
  std::size_t library() const { return library_; }
  // k for the cache; 1 for the other families.
  std::size_t capacity() const { return capacity_; }
  std::size_t dim() const;

  // mu such that mu * all-ones is feasible: k/N, 1/m, 1/m.
  double uniform_level() const;
  std::vector<double> uniform_point() const;
  // Upper bound on the Euclidean diameter: sqrt(2k), sqrt(2), sqrt(2m).
  double diameter() const;

  bool contains(std::span<const double> y, double tol = kFeasibilityTol) const;
  std::string describe() const;

  friend bool operator==(const FeasibleFamily&, const FeasibleFamily&) = default;

 private:
  FeasibleFamily(FamilyKind kind, std::size_t library, std::size_t capacity,
                 std::size_t agents)
      : kind_(kind), library_(library), capacity_(capacity), agents_(agents) {}

  FamilyKind kind_;
  std::size_t library_;
  std::size_t capacity_;
  std::size_t agents_;
};

inline double diameter(const FeasibleFamily& family) { return family.diameter(); }

// Euclidean projection of v onto {y in [0,1]^n : sum y = capacity}.
// Bisection on the shift multiplier until the sum constraint holds to 1e-12,
// then an exact solve on the identified free set.
void project_capped_simplex(std::span<const double> v, double capacity,
                            std::span<double> out);

struct DykstraReport {
  int sweeps = 0;
  double last_change = 0.0;
};

// Projection onto the m x m Birkhoff polytope by Dykstra's alternating
// projections between the row-sum and column-sum constraint sets.
std::vector<double> project_birkhoff(std::span<const double> v, std::size_t m,
                                     DykstraReport* report = nullptr);

// Throws DataError on non-finite input or a size mismatch.
std::vector<double> project(const FeasibleFamily& family,
                            std::span<const double> v);

// Vertex maximizing <g, y>. Ties go to the lowest index for the cache and
// the simplex.
std::vector<double> lmo(const FeasibleFamily& family, std::span<const double> g);

// Systematic (Madow) sampling of k distinct indices with inclusion
// probabilities p. u in [0,1).
std::vector<std::size_t> madow_sample(std::span<const double> p, std::size_t k,
                                      double u);

struct BvnTerm {
  double coefficient;
  // perm[i] = resource matched to agent i.
  std::vector<std::size_t> perm;
};

// Birkhoff-von Neumann decomposition by greedy peeling of perfect matchings
// supported on entries above tol. M uses the Birkhoff decision layout.
std::vector<BvnTerm> bvn_decompose(std::span<const double> M, std::size_t m,
                                   double tol = 1e-9);

// Integral vertex Y with E[Y] = y: Madow for the cache, a categorical draw for
// the simplex and a categorical over BvN terms for the Birkhoff polytope.
std::vector<double> sample_integral(const FeasibleFamily& family,
                                    std::span<const double> y, SplitMix64& rng);

// Per-agent reward <x_i, y_i> for a demand (or demand-total) matrix.
std::vector<double> agent_rewards(const FeasibleFamily& family,
                                  const DemandMatrix& demand,
                                  std::span<const double> y);
void agent_rewards(const FeasibleFamily& family, const DemandMatrix& demand,
                   std::span<const double> y, std::span<double> out);

// out += sum_i coeff[i] * (gradient of agent i's reward w.r.t. y).
void add_agent_gradient(const FeasibleFamily& family, const DemandMatrix& demand,
                        std::span<const double> coeff, std::span<double> out);

AllocationMatrix to_allocation_matrix(const FeasibleFamily& family,
                                      std::span<const double> y);

// Throws DataError unless demand has the family's N x m shape.
void check_demand_shape(const FeasibleFamily& family, const DemandMatrix& demand);

}  // namespace fairalloc

#endif  // FAIRALLOC_FEASIBLE_SETS_HPP_
