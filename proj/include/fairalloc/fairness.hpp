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

#ifndef FAIRALLOC_FAIRNESS_HPP_
#define FAIRALLOC_FAIRNESS_HPP_

#include <span>

namespace fairalloc {

// alpha-fair utility r^(1-alpha) / (1-alpha). Throws std::invalid_argument
// for r < 0 or alpha outside [0,1).
double phi(double alpha, double r);

// Derivative r^(-alpha). Requires r > 0.
double phi_prime(double alpha, double r);

// sum_i w_i * phi(R_i). Empty weights mean unit weights.
double aggregate_fairness(double alpha, std::span<const double> weights,
                          std::span<const double> rewards);

// Approximation factor (1-alpha)^-(1-alpha); equals 1 at alpha = 0.
double approx_factor(double alpha);

// Ratio of offline to best worst-case online fairness on the two-instance
// caching construction, as a function of the phase fraction eta.
double lb_ratio_at(double alpha, double eta);

struct LowerBound {
  double ratio;
  double eta_star;
};

// Maximizes lb_ratio_at over eta in [0, 1/2]: grid at step 1e-5, then
// golden-section to 1e-9 around the best grid point. alpha in (0,1).
LowerBound lb_ratio(double alpha);

}  // namespace fairalloc

#endif  // FAIRALLOC_FAIRNESS_HPP_
