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

#include "fairalloc/assignment.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace fairalloc {

std::vector<std::size_t> max_weight_assignment(std::span<const double> w,
                                               std::size_t n) {
  if (w.size() != n * n) throw std::invalid_argument("assignment: bad matrix size");
  if (n == 0) return {};
  // Minimize cost = -weight. 1-based arrays per the classic formulation.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = -w[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> perm(n);
  for (std::size_t j = 1; j <= n; ++j) perm[p[j] - 1] = j - 1;
  return perm;
}

namespace {

bool augment(std::size_t r, std::span<const char> allowed, std::size_t n,
             std::vector<char>& seen, std::vector<std::size_t>& col_owner) {
  constexpr std::size_t kFree = std::numeric_limits<std::size_t>::max();
  for (std::size_t c = 0; c < n; ++c) {
    if (!allowed[r * n + c] || seen[c]) continue;
    seen[c] = 1;
    if (col_owner[c] == kFree || augment(col_owner[c], allowed, n, seen, col_owner)) {
      col_owner[c] = r;
      return true;
    }
  }
  return false;
}

}  // namespace

std::optional<std::vector<std::size_t>> perfect_matching(
    std::span<const char> allowed, std::size_t n) {
  if (allowed.size() != n * n) throw std::invalid_argument("matching: bad matrix size");
  constexpr std::size_t kFree = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> col_owner(n, kFree);
  std::vector<char> seen(n);
  for (std::size_t r = 0; r < n; ++r) {
    std::fill(seen.begin(), seen.end(), 0);
    if (!augment(r, allowed, n, seen, col_owner)) return std::nullopt;
  }
  std::vector<std::size_t> perm(n);
  for (std::size_t c = 0; c < n; ++c) perm[col_owner[c]] = c;
  return perm;
}

}  // namespace fairalloc
