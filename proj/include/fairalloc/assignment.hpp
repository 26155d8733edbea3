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

#ifndef FAIRALLOC_ASSIGNMENT_HPP_
#define FAIRALLOC_ASSIGNMENT_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace fairalloc {

// Square weight matrix stored row-major: weight(r, c) = w[r * n + c].
// Returns perm with perm[r] = column matched to row r, maximizing the total
// weight. Hungarian method with potentials, O(n^3).
std::vector<std::size_t> max_weight_assignment(std::span<const double> w,
                                               std::size_t n);

// Perfect matching using only cells where allowed(r, c) is true
// (row-major, n x n). Augmenting paths (Kuhn), rows visited in index order.
std::optional<std::vector<std::size_t>> perfect_matching(
    std::span<const char> allowed, std::size_t n);

}  // namespace fairalloc

#endif  // FAIRALLOC_ASSIGNMENT_HPP_
