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

#include "fairalloc/feasible_sets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "fairalloc/assignment.hpp"
#include "fairalloc/errors.hpp"

namespace fairalloc {

FeasibleFamily FeasibleFamily::shared_cache(std::size_t library,
                                            std::size_t capacity,
                                            std::size_t users) {
  if (library == 0 || capacity == 0 || capacity > library || users == 0) {
    throw std::invalid_argument("shared cache needs 1 <= k <= N and m >= 1");
  }
  return FeasibleFamily(FamilyKind::kSharedCache, library, capacity, users);
}

FeasibleFamily FeasibleFamily::job_simplex(std::size_t machines) {
  if (machines == 0) throw std::invalid_argument("job simplex needs m >= 1");
  return FeasibleFamily(FamilyKind::kJobSimplex, 1, 1, machines);
}

FeasibleFamily FeasibleFamily::birkhoff(std::size_t side) {
  if (side == 0) throw std::invalid_argument("Birkhoff polytope needs m >= 1");
  return FeasibleFamily(FamilyKind::kBirkhoff, side, 1, side);
}

std::size_t FeasibleFamily::dim() const {
  switch (kind_) {
    case FamilyKind::kSharedCache:
      return library_;
    case FamilyKind::kJobSimplex:
      return agents_;
    case FamilyKind::kBirkhoff:
      return agents_ * agents_;
  }
  return 0;
}

double FeasibleFamily::uniform_level() const {
  switch (kind_) {
    case FamilyKind::kSharedCache:
      return static_cast<double>(capacity_) / static_cast<double>(library_);
    case FamilyKind::kJobSimplex:
    case FamilyKind::kBirkhoff:
      return 1.0 / static_cast<double>(agents_);
  }
  return 0.0;
}

std::vector<double> FeasibleFamily::uniform_point() const {
  return std::vector<double>(dim(), uniform_level());
}

double FeasibleFamily::diameter() const {
  switch (kind_) {
    case FamilyKind::kSharedCache:
      return std::sqrt(2.0 * static_cast<double>(capacity_));
    case FamilyKind::kJobSimplex:
      return std::sqrt(2.0);
    case FamilyKind::kBirkhoff:
      return std::sqrt(2.0 * static_cast<double>(agents_));
  }
  return 0.0;
}

bool FeasibleFamily::contains(std::span<const double> y, double tol) const {
  if (y.size() != dim()) return false;
  for (double v : y) {
    if (!std::isfinite(v) || v < -tol || v > 1.0 + tol) return false;
  }
  switch (kind_) {
    case FamilyKind::kSharedCache:
    case FamilyKind::kJobSimplex: {
      const double s = std::accumulate(y.begin(), y.end(), 0.0);
      return std::abs(s - static_cast<double>(capacity_)) <= tol;
    }
    case FamilyKind::kBirkhoff: {
      const std::size_t m = agents_;
      for (std::size_t a = 0; a < m; ++a) {
        double col = 0.0, row = 0.0;
        for (std::size_t b = 0; b < m; ++b) {
          col += y[a * m + b];
          row += y[b * m + a];
        }
        if (std::abs(col - 1.0) > tol || std::abs(row - 1.0) > tol) return false;
      }
      return true;
    }
  }
  return false;
}

std::string FeasibleFamily::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case FamilyKind::kSharedCache:
      os << "cache(N=" << library_ << ",k=" << capacity_ << ",m=" << agents_ << ")";
      break;
    case FamilyKind::kJobSimplex:
      os << "sched(m=" << agents_ << ")";
      break;
    case FamilyKind::kBirkhoff:
      os << "match(m=" << agents_ << ")";
      break;
  }
  return os.str();
}

namespace {

double clipped_sum(std::span<const double> v, double shift) {
  double s = 0.0;
  for (double x : v) s += std::clamp(x - shift, 0.0, 1.0);
  return s;
}

}  // namespace

void project_capped_simplex(std::span<const double> v, double capacity,
                            std::span<double> out) {
  const std::size_t n = v.size();
  if (out.size() != n) throw std::invalid_argument("projection: output size mismatch");
  if (!(capacity >= 0.0) || capacity > static_cast<double>(n) + kFeasibilityTol) {
    throw std::invalid_argument("projection: capacity outside [0, n]");
  }
  if (n == 0) return;
  if (capacity >= static_cast<double>(n)) {
    std::fill(out.begin(), out.end(), 1.0);
    return;
  }
  const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  double lo = *mn - 1.0;  // clipped_sum(lo) = n >= capacity
  double hi = *mx;        // clipped_sum(hi) = 0 <= capacity
  double shift = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    shift = 0.5 * (lo + hi);
    const double s = clipped_sum(v, shift);
    if (std::abs(s - capacity) <= 1e-12) break;
    if (s > capacity) {
      lo = shift;
    } else {
      hi = shift;
    }
    if (hi - lo <= 1e-16 * (1.0 + std::abs(shift))) break;
  }

  // Exact solve on the piece of the piecewise-linear sum that contains shift.
  double free_sum = 0.0;
  std::size_t n_free = 0, n_upper = 0;
  for (double x : v) {
    const double z = x - shift;
    if (z >= 1.0) {
      ++n_upper;
    } else if (z > 0.0) {
      free_sum += x;
      ++n_free;
    }
  }
  if (n_free > 0) {
    const double exact =
        (free_sum + static_cast<double>(n_upper) - capacity) / static_cast<double>(n_free);
    if (std::abs(clipped_sum(v, exact) - capacity) <=
        std::abs(clipped_sum(v, shift) - capacity)) {
      shift = exact;
    }
  }
  for (std::size_t j = 0; j < n; ++j) out[j] = std::clamp(v[j] - shift, 0.0, 1.0);
}

std::vector<double> project_birkhoff(std::span<const double> v, std::size_t m,
                                     DykstraReport* report) {
  if (v.size() != m * m) throw std::invalid_argument("Birkhoff projection: size mismatch");
  constexpr int kMaxSweeps = 10000;
  constexpr double kStop = 1e-10;
  std::vector<double> x(v.begin(), v.end()), y(m * m), p(m * m, 0.0), q(m * m, 0.0);
  std::vector<double> buf_in(m), buf_out(m);
  DykstraReport rep;
  for (int sweep = 1; sweep <= kMaxSweeps; ++sweep) {
    // Resource constraints: for each resource j, sum over agents = 1.
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t i = 0; i < m; ++i) buf_in[i] = x[i * m + j] + p[i * m + j];
      project_capped_simplex(buf_in, 1.0, buf_out);
      for (std::size_t i = 0; i < m; ++i) {
        y[i * m + j] = buf_out[i];
        p[i * m + j] = buf_in[i] - buf_out[i];
      }
    }
    // Agent constraints: each contiguous column sums to 1.
    double change = 0.0, gap = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) buf_in[j] = y[i * m + j] + q[i * m + j];
      project_capped_simplex(buf_in, 1.0, buf_out);
      for (std::size_t j = 0; j < m; ++j) {
        q[i * m + j] = buf_in[j] - buf_out[j];
        change = std::max(change, std::abs(buf_out[j] - x[i * m + j]));
        gap = std::max(gap, std::abs(buf_out[j] - y[i * m + j]));
        x[i * m + j] = buf_out[j];
      }
    }
    rep.sweeps = sweep;
    rep.last_change = std::max(change, gap);
    // x can stall for several sweeps while the corrections still move, so
    // also require the two half-steps to agree.
    if (change < kStop && gap < kStop) break;
  }
  if (report != nullptr) *report = rep;
  return x;
}

std::vector<double> project(const FeasibleFamily& family,
                            std::span<const double> v) {
  if (v.size() != family.dim()) throw DataError("projection input has wrong size");
  for (double x : v) {
    if (!std::isfinite(x)) throw DataError("projection input is not finite");
  }
  std::vector<double> out(v.size());
  switch (family.kind()) {
    case FamilyKind::kSharedCache:
      project_capped_simplex(v, static_cast<double>(family.capacity()), out);
      break;
    case FamilyKind::kJobSimplex:
      project_capped_simplex(v, 1.0, out);
      break;
    case FamilyKind::kBirkhoff:
      out = project_birkhoff(v, family.agents());
      break;
  }
  return out;
}

std::vector<double> lmo(const FeasibleFamily& family, std::span<const double> g) {
  if (g.size() != family.dim()) throw DataError("lmo input has wrong size");
  std::vector<double> out(g.size(), 0.0);
  switch (family.kind()) {
    case FamilyKind::kSharedCache: {
      std::vector<std::size_t> idx(g.size());
      std::iota(idx.begin(), idx.end(), 0);
      const std::size_t k = family.capacity();
      std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                        [&](std::size_t a, std::size_t b) {
                          return g[a] > g[b] || (g[a] == g[b] && a < b);
                        });
      for (std::size_t r = 0; r < k; ++r) out[idx[r]] = 1.0;
      break;
    }
    case FamilyKind::kJobSimplex: {
      const auto it = std::max_element(g.begin(), g.end());
      out[static_cast<std::size_t>(it - g.begin())] = 1.0;
      break;
    }
    case FamilyKind::kBirkhoff: {
      const std::size_t m = family.agents();
      // Row-major weight(agent, resource) is exactly the decision layout.
      const auto perm = max_weight_assignment(g, m);
      for (std::size_t i = 0; i < m; ++i) out[i * m + perm[i]] = 1.0;
      break;
    }
  }
  return out;
}

std::vector<std::size_t> madow_sample(std::span<const double> p, std::size_t k,
                                      double u) {
  const std::size_t n = p.size();
  if (k > n) throw DataError("madow: k exceeds the number of items");
  if (!(u >= 0.0 && u < 1.0)) throw DataError("madow: u must lie in [0, 1)");
  double total = 0.0;
  for (double x : p) {
    if (!std::isfinite(x) || x < -kFeasibilityTol || x > 1.0 + kFeasibilityTol) {
      throw DataError("madow: inclusion probabilities must lie in [0, 1]");
    }
    total += std::clamp(x, 0.0, 1.0);
  }
  const double kd = static_cast<double>(k);
  if (std::abs(total - kd) > kFeasibilityTol * std::max(1.0, kd)) {
    throw DataError("madow: inclusion probabilities must sum to k");
  }
  if (k == 0) return {};
  const double scale = kd / total;
  std::vector<double> prefix(n);
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    acc += std::clamp(p[j], 0.0, 1.0) * scale;
    prefix[j] = acc;
  }
  prefix[n - 1] = std::max(prefix[n - 1], kd);

  std::vector<std::size_t> out;
  out.reserve(k);
  std::size_t j = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double point = u + static_cast<double>(i);
    while (j < n && !(prefix[j] > point)) ++j;
    if (j >= n) break;
    out.push_back(j);
    ++j;
  }
  // Rounding can starve the tail; fill from the largest unselected items.
  for (std::size_t back = n; out.size() < k && back-- > 0;) {
    if (std::find(out.begin(), out.end(), back) == out.end()) out.push_back(back);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<BvnTerm> bvn_decompose(std::span<const double> M, std::size_t m,
                                   double tol) {
  if (M.size() != m * m) throw DataError("bvn: matrix size mismatch");
  const double sum_tol = std::max(tol, 1e-12) * static_cast<double>(m);
  for (std::size_t a = 0; a < m; ++a) {
    double col = 0.0, row = 0.0;
    for (std::size_t b = 0; b < m; ++b) {
      const double cv = M[a * m + b], rv = M[b * m + a];
      if (!std::isfinite(cv) || cv < -tol || cv > 1.0 + tol) {
        throw DataError("bvn: entries must lie in [0, 1]");
      }
      col += cv;
      row += rv;
    }
    if (std::abs(col - 1.0) > sum_tol || std::abs(row - 1.0) > sum_tol) {
      throw DataError("bvn: matrix is not doubly stochastic");
    }
  }
  std::vector<double> rest(M.begin(), M.end());
  for (double& x : rest) x = std::max(x, 0.0);
  std::vector<BvnTerm> terms;
  std::vector<char> allowed(m * m);
  double mass = 1.0;
  while (mass > tol) {
    for (std::size_t c = 0; c < m * m; ++c) allowed[c] = rest[c] > tol ? 1 : 0;
    auto perm = perfect_matching(allowed, m);
    if (!perm) break;
    double theta = 2.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t c = i * m + (*perm)[i];
      if (rest[c] < theta) {
        theta = rest[c];
        arg = c;
      }
    }
    for (std::size_t i = 0; i < m; ++i) rest[i * m + (*perm)[i]] -= theta;
    rest[arg] = 0.0;
    mass -= theta;
    terms.push_back({theta, std::move(*perm)});
  }
  return terms;
}

std::vector<double> sample_integral(const FeasibleFamily& family,
                                    std::span<const double> y, SplitMix64& rng) {
  if (!family.contains(y)) throw DataError("sample_integral: allocation is infeasible");
  const double u = rng.uniform();
  std::vector<double> out(family.dim(), 0.0);
  switch (family.kind()) {
    case FamilyKind::kSharedCache: {
      for (std::size_t j : madow_sample(y, family.capacity(), u)) out[j] = 1.0;
      break;
    }
    case FamilyKind::kJobSimplex: {
      const double total = std::accumulate(y.begin(), y.end(), 0.0);
      double acc = 0.0;
      std::size_t pick = y.size();
      for (std::size_t j = 0; j < y.size(); ++j) {
        acc += std::max(y[j], 0.0) / total;
        if (u < acc) {
          pick = j;
          break;
        }
      }
      if (pick == y.size()) {
        // u landed in the rounding gap at the top; take the last positive entry.
        for (std::size_t j = y.size(); j-- > 0;) {
          if (y[j] > 0.0) {
            pick = j;
            break;
          }
        }
      }
      out[pick] = 1.0;
      break;
    }
    case FamilyKind::kBirkhoff: {
      const std::size_t m = family.agents();
      const auto terms = bvn_decompose(y, m);
      double total = 0.0;
      for (const auto& t : terms) total += t.coefficient;
      double acc = 0.0;
      const BvnTerm* pick = &terms.back();
      for (const auto& t : terms) {
        acc += t.coefficient / total;
        if (u < acc) {
          pick = &t;
          break;
        }
      }
      for (std::size_t i = 0; i < m; ++i) out[i * m + pick->perm[i]] = 1.0;
      break;
    }
  }
  return out;
}

void check_demand_shape(const FeasibleFamily& family, const DemandMatrix& demand) {
  if (demand.rows() != family.library() || demand.cols() != family.agents()) {
    std::ostringstream os;
    os << "demand shape " << demand.rows() << "x" << demand.cols()
       << " does not match " << family.describe();
    throw DataError(os.str());
  }
}

void agent_rewards(const FeasibleFamily& family, const DemandMatrix& demand,
                   std::span<const double> y, std::span<double> out) {
  check_demand_shape(family, demand);
  const std::size_t m = family.agents();
  switch (family.kind()) {
    case FamilyKind::kSharedCache:
      for (std::size_t i = 0; i < m; ++i) out[i] = demand.dot(i, y);
      break;
    case FamilyKind::kJobSimplex:
      for (std::size_t i = 0; i < m; ++i) out[i] = demand.at(0, i) * y[i];
      break;
    case FamilyKind::kBirkhoff:
      for (std::size_t i = 0; i < m; ++i) out[i] = demand.dot(i, y.subspan(i * m, m));
      break;
  }
}

std::vector<double> agent_rewards(const FeasibleFamily& family,
                                  const DemandMatrix& demand,
                                  std::span<const double> y) {
  std::vector<double> out(family.agents());
  agent_rewards(family, demand, y, out);
  return out;
}

void add_agent_gradient(const FeasibleFamily& family, const DemandMatrix& demand,
                        std::span<const double> coeff, std::span<double> out) {
  check_demand_shape(family, demand);
  const std::size_t m = family.agents();
  switch (family.kind()) {
    case FamilyKind::kSharedCache:
      for (std::size_t i = 0; i < m; ++i) demand.axpy(i, coeff[i], out);
      break;
    case FamilyKind::kJobSimplex:
      for (std::size_t i = 0; i < m; ++i) out[i] += coeff[i] * demand.at(0, i);
      break;
    case FamilyKind::kBirkhoff:
      for (std::size_t i = 0; i < m; ++i) demand.axpy(i, coeff[i], out.subspan(i * m, m));
      break;
  }
}

AllocationMatrix to_allocation_matrix(const FeasibleFamily& family,
                                      std::span<const double> y) {
  const std::size_t m = family.agents();
  switch (family.kind()) {
    case FamilyKind::kSharedCache:
      return AllocationMatrix::shared(y, m);
    case FamilyKind::kJobSimplex:
      return AllocationMatrix(1, m, std::vector<double>(y.begin(), y.end()));
    case FamilyKind::kBirkhoff:
      break;
  }
  return AllocationMatrix(m, m, std::vector<double>(y.begin(), y.end()));
}

}  // namespace fairalloc
