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

#include "fairalloc/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fairalloc {
namespace {

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in [0, 1)");
  }
}

}  // namespace

double phi(double alpha, double r) {
  check_alpha(alpha);
  if (!(r >= 0.0)) throw std::invalid_argument("phi: negative reward");
  return std::pow(r, 1.0 - alpha) / (1.0 - alpha);
}

double phi_prime(double alpha, double r) {
  check_alpha(alpha);
  if (!(r > 0.0)) throw std::invalid_argument("phi_prime: reward must be positive");
  return alpha == 0.0 ? 1.0 : std::pow(r, -alpha);
}

double aggregate_fairness(double alpha, std::span<const double> weights,
                          std::span<const double> rewards) {
  if (!weights.empty() && weights.size() != rewards.size()) {
    throw std::invalid_argument("aggregate_fairness: weight/reward length mismatch");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    total += w * phi(alpha, rewards[i]);
  }
  return total;
}

double approx_factor(double alpha) {
  check_alpha(alpha);
  return std::pow(1.0 - alpha, -(1.0 - alpha));
}

double lb_ratio_at(double alpha, double eta) {
  const double p = 1.0 - alpha;
  const double num = std::pow(eta, p) + std::pow(1.0 - eta, p);
  const double den = std::pow(1.0 - eta / 2.0, p) + std::pow(eta / 2.0, p);
  return num / den;
}

LowerBound lb_ratio(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("lb_ratio: alpha must lie in (0, 1)");
  }
  constexpr double kStep = 1e-5;
  constexpr int kPoints = 50000;  // eta = i * kStep, i in [0, kPoints]
  int best = 0;
  double best_val = lb_ratio_at(alpha, 0.0);
  for (int i = 1; i <= kPoints; ++i) {
    const double v = lb_ratio_at(alpha, i * kStep);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  double lo = std::max(0.0, (best - 1) * kStep);
  double hi = std::min(0.5, (best + 1) * kStep);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - inv_phi * (hi - lo);
  double b = lo + inv_phi * (hi - lo);
  double fa = lb_ratio_at(alpha, a);
  double fb = lb_ratio_at(alpha, b);
  while (hi - lo > 1e-9) {
    if (fa < fb) {
      lo = a;
      a = b;
      fa = fb;
      b = lo + inv_phi * (hi - lo);
      fb = lb_ratio_at(alpha, b);
    } else {
      hi = b;
      b = a;
      fb = fa;
      a = hi - inv_phi * (hi - lo);
      fa = lb_ratio_at(alpha, a);
    }
  }
  const double eta = 0.5 * (lo + hi);
  const double val = lb_ratio_at(alpha, eta);
  if (val >= best_val) return {val, eta};
  return {best_val, best * kStep};
}

}  // namespace fairalloc
