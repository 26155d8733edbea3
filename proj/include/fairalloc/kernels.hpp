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

#ifndef FAIRALLOC_KERNELS_HPP_
#define FAIRALLOC_KERNELS_HPP_

// Data-parallel reductions over a demand trace.
//
// Every kernel has an OpenMP implementation (namespace omp) and a plain serial
// reference (namespace serial) kept for testing and benchmarking. The OpenMP
// versions split the round range into fixed blocks of kBlockRounds, reduce
// each block independently and combine block partials in block order, so
// their output does not depend on the thread count or schedule.

#include <cstddef>
#include <exception>
#include <functional>
#include <span>
#include <vector>

#include "fairalloc/core_model.hpp"
#include "fairalloc/feasible_sets.hpp"

namespace fairalloc::kernels {

inline constexpr std::size_t kBlockRounds = 4096;

// Surrogate linear-problem sums over rounds [0, horizon):
//   gradient = sum_t sum_i w_i phi'(R_i(t)) * d<x_i(t), y_i>/dy
//   played   = sum_t sum_i w_i phi'(R_i(t)) * inc_i(t)
// where R_i(t) = rewards_before[t*m + i] and inc_i(t) = increments[t*m + i].
struct SurrogateSums {
  std::vector<double> gradient;
  double played = 0.0;
};

namespace serial {

// Column-major N x m totals of the first `horizon` demand matrices.
DemandMatrix demand_totals(const DemandTrace& trace, std::size_t horizon);

SurrogateSums surrogate_sums(const FeasibleFamily& family, const DemandTrace& trace,
                             std::span<const double> rewards_before,
                             std::span<const double> increments, double alpha,
                             std::span<const double> weights, std::size_t horizon);

}  // namespace serial

namespace omp {

DemandMatrix demand_totals(const DemandTrace& trace, std::size_t horizon);

SurrogateSums surrogate_sums(const FeasibleFamily& family, const DemandTrace& trace,
                             std::span<const double> rewards_before,
                             std::span<const double> increments, double alpha,
                             std::span<const double> weights, std::size_t horizon);

// Runs fn(0..count-1) across threads. The first exception (lowest index)
// is rethrown after all cells finish.
void for_each_cell(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace omp

int max_threads();

}  // namespace fairalloc::kernels

#endif  // FAIRALLOC_KERNELS_HPP_
