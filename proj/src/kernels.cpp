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

#include "fairalloc/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <stdexcept>

#include "fairalloc/errors.hpp"
#include "fairalloc/fairness.hpp"

namespace fairalloc::kernels {
namespace {

void check_horizon(const DemandTrace& trace, std::size_t horizon) {
  if (horizon > trace.horizon()) throw DataError("horizon exceeds trace length");
}

void check_history(const DemandTrace& trace, std::span<const double> rewards_before,
                   std::span<const double> increments, std::size_t horizon) {
  check_horizon(trace, horizon);
  const std::size_t need = horizon * trace.agents();
  if (rewards_before.size() < need || increments.size() < need) {
    throw DataError("reward history shorter than horizon");
  }
}

void add_round_totals(const DemandMatrix& x, std::span<double> acc) {
  const std::size_t n = x.rows();
  for (std::size_t i = 0; i < x.cols(); ++i) x.axpy(i, 1.0, acc.subspan(i * n, n));
}

// One round of the surrogate sums; coeff is scratch of size m.
double add_round_surrogate(const FeasibleFamily& family, const DemandMatrix& x,
                           const double* r_before, const double* inc, double alpha,
                           std::span<const double> weights, std::span<double> coeff,
                           std::span<double> grad) {
  double played = 0.0;
  for (std::size_t i = 0; i < coeff.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    coeff[i] = w * phi_prime(alpha, r_before[i]);
    played += coeff[i] * inc[i];
  }
  add_agent_gradient(family, x, coeff, grad);
  return played;
}

}  // namespace

namespace serial {

DemandMatrix demand_totals(const DemandTrace& trace, std::size_t horizon) {
  check_horizon(trace, horizon);
  std::vector<double> acc(trace.rows() * trace.agents(), 0.0);
  for (std::size_t t = 0; t < horizon; ++t) add_round_totals(trace[t], acc);
  return DemandMatrix::dense(trace.rows(), trace.agents(), std::move(acc));
}

SurrogateSums surrogate_sums(const FeasibleFamily& family, const DemandTrace& trace,
                             std::span<const double> rewards_before,
                             std::span<const double> increments, double alpha,
                             std::span<const double> weights, std::size_t horizon) {
  check_history(trace, rewards_before, increments, horizon);
  const std::size_t m = trace.agents();
  SurrogateSums out{std::vector<double>(family.dim(), 0.0), 0.0};
  std::vector<double> coeff(m);
  for (std::size_t t = 0; t < horizon; ++t) {
    out.played += add_round_surrogate(family, trace[t], &rewards_before[t * m],
                                      &increments[t * m], alpha, weights, coeff,
                                      out.gradient);
  }
  return out;
}

}  // namespace serial

namespace omp {

DemandMatrix demand_totals(const DemandTrace& trace, std::size_t horizon) {
  check_horizon(trace, horizon);
  const std::size_t width = trace.rows() * trace.agents();
  const std::size_t blocks = (horizon + kBlockRounds - 1) / kBlockRounds;
  std::vector<double> partial(blocks * width, 0.0);
  const auto nblocks = static_cast<long long>(blocks);
#pragma omp parallel for schedule(static)
  for (long long b = 0; b < nblocks; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlockRounds;
    const std::size_t hi = std::min(horizon, lo + kBlockRounds);
    std::span<double> acc(partial.data() + static_cast<std::size_t>(b) * width, width);
    for (std::size_t t = lo; t < hi; ++t) add_round_totals(trace[t], acc);
  }
  std::vector<double> total(width, 0.0);
  for (std::size_t b = 0; b < blocks; ++b) {
    const double* p = partial.data() + b * width;
    for (std::size_t c = 0; c < width; ++c) total[c] += p[c];
  }
  return DemandMatrix::dense(trace.rows(), trace.agents(), std::move(total));
}

SurrogateSums surrogate_sums(const FeasibleFamily& family, const DemandTrace& trace,
                             std::span<const double> rewards_before,
                             std::span<const double> increments, double alpha,
                             std::span<const double> weights, std::size_t horizon) {
  check_history(trace, rewards_before, increments, horizon);
  const std::size_t m = trace.agents();
  const std::size_t width = family.dim();
  const std::size_t blocks = (horizon + kBlockRounds - 1) / kBlockRounds;
  std::vector<double> partial(blocks * width, 0.0);
  std::vector<double> played(blocks, 0.0);
  std::vector<std::exception_ptr> errors(blocks);
  const auto nblocks = static_cast<long long>(blocks);
#pragma omp parallel
  {
    std::vector<double> coeff(m);
#pragma omp for schedule(static)
    for (long long b = 0; b < nblocks; ++b) {
      const auto ub = static_cast<std::size_t>(b);
      try {
        const std::size_t lo = ub * kBlockRounds;
        const std::size_t hi = std::min(horizon, lo + kBlockRounds);
        std::span<double> grad(partial.data() + ub * width, width);
        double acc = 0.0;
        for (std::size_t t = lo; t < hi; ++t) {
          acc += add_round_surrogate(family, trace[t], &rewards_before[t * m],
                                     &increments[t * m], alpha, weights, coeff, grad);
        }
        played[ub] = acc;
      } catch (...) {
        errors[ub] = std::current_exception();
      }
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  SurrogateSums out{std::vector<double>(width, 0.0), 0.0};
  for (std::size_t b = 0; b < blocks; ++b) {
    const double* p = partial.data() + b * width;
    for (std::size_t c = 0; c < width; ++c) out.gradient[c] += p[c];
    out.played += played[b];
  }
  return out;
}

void for_each_cell(std::size_t count, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(count);
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long c = 0; c < n; ++c) {
    try {
      fn(static_cast<std::size_t>(c));
    } catch (...) {
      errors[static_cast<std::size_t>(c)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace omp

int max_threads() { return omp_get_max_threads(); }

}  // namespace fairalloc::kernels
