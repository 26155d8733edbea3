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

#ifndef FAIRALLOC_CORE_MODEL_HPP_
#define FAIRALLOC_CORE_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fairalloc {

// Membership tolerance used by every feasibility predicate.
inline constexpr double kFeasibilityTol = 1e-9;

enum class FamilyKind { kSharedCache, kJobSimplex, kBirkhoff };

std::string_view family_tag(FamilyKind kind);
// Accepts "cache", "sched" and "match". Throws DataError otherwise.
FamilyKind parse_family_tag(std::string_view tag);

// Experiment-level fairness parameters.
//
// `mu` is the scale of the all-ones point that must lie in the feasible set;
// callers usually take it from FeasibleFamily::uniform_level(). Empty
// `weights` means all agents weigh one.
struct FairnessParams {
  double alpha = 0.0;
  double delta = 1.0;
  double mu = 1.0;
  std::vector<double> weights;

  // Throws std::invalid_argument on alpha outside [0,1), delta outside (0,1],
  // non-positive mu or negative weights.
  void validate() const;
  double weight(std::size_t agent) const {
    return weights.empty() ? 1.0 : weights[agent];
  }
  std::vector<double> weight_vector(std::size_t agents) const;
};

// N x m nonnegative demand matrix; column i is agent i's demand x_i.
//
// Columns are stored either as a one-hot file index or densely. The
// representation is an internal shortcut; all accessors have dense semantics
// and equality compares values, not representation.
class DemandMatrix {
 public:
  DemandMatrix() = default;

  // files[i] is the 0-based row that agent i requests with unit demand.
  static DemandMatrix one_hot(std::size_t rows, std::vector<std::int32_t> files);
  // Column-major rows x cols entries.
  static DemandMatrix dense(std::size_t rows, std::size_t cols,
                            std::vector<double> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return hot_.size(); }

  double at(std::size_t row, std::size_t col) const;
  bool is_one_hot(std::size_t col) const { return hot_[col] >= 0; }
  std::int32_t hot_index(std::size_t col) const { return hot_[col]; }
  // Dense column view; only valid when !is_one_hot(col).
  std::span<const double> dense_column(std::size_t col) const;

  // <x_col, y> for y of length rows().
  double dot(std::size_t col, std::span<const double> y) const;
  double l1_norm(std::size_t col) const;
  bool all_finite() const;

  // out[j] += scale * x_col[j].
  void axpy(std::size_t col, double scale, std::span<double> out) const;

  template <typename Fn>
  void for_each_nonzero(std::size_t col, Fn&& fn) const {
    if (hot_[col] >= 0) {
      fn(static_cast<std::size_t>(hot_[col]), 1.0);
      return;
    }
    const double* c = dense_.data() + col * rows_;
    for (std::size_t j = 0; j < rows_; ++j) {
      if (c[j] != 0.0) fn(j, c[j]);
    }
  }

  friend bool operator==(const DemandMatrix& a, const DemandMatrix& b);

 private:
  std::size_t rows_ = 0;
  std::vector<std::int32_t> hot_;  // -1 marks a dense column
  std::vector<double> dense_;      // rows_ * cols() when any column is dense
};

// Demand sequence for a fixed (N, m) and intended family.
class DemandTrace {
 public:
  DemandTrace(std::size_t rows, std::size_t agents, FamilyKind family)
      : rows_(rows), agents_(agents), family_(family) {}

  std::size_t rows() const { return rows_; }
  std::size_t agents() const { return agents_; }
  FamilyKind family() const { return family_; }
  std::size_t horizon() const { return rounds_.size(); }

  // Throws DataError when the matrix shape differs from the trace shape.
  void push_back(DemandMatrix round);
  const DemandMatrix& operator[](std::size_t t) const { return rounds_[t]; }
  const std::vector<DemandMatrix>& rounds() const { return rounds_; }
  DemandTrace prefix(std::size_t horizon) const;

  friend bool operator==(const DemandTrace& a, const DemandTrace& b) = default;

 private:
  std::size_t rows_;
  std::size_t agents_;
  FamilyKind family_;
  std::vector<DemandMatrix> rounds_;
};

// Dense N x m allocation; column i is y_i.
class AllocationMatrix {
 public:
  AllocationMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  // Every agent sees the same vector (shared cache).
  static AllocationMatrix shared(std::span<const double> y, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> column(std::size_t col) const {
    return {entries_.data() + col * rows_, rows_};
  }
  double at(std::size_t row, std::size_t col) const {
    return entries_[col * rows_ + row];
  }
  std::span<const double> entries() const { return entries_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> entries_;
};

// Cumulative rewards. Starts at one per agent.
struct RewardState {
  std::vector<double> R;
  std::size_t t = 0;

  static RewardState initial(std::size_t agents) {
    return RewardState{std::vector<double>(agents, 1.0), 0};
  }
};

struct TraceViolation {
  std::size_t round;  // 0-based
  std::optional<std::size_t> agent;
  std::string message;
};

// Checks shape consistency and delta <= ||x_i(t)||_1 <= 1 for every round and
// agent. An empty result means the trace satisfies the demand assumption.
std::vector<TraceViolation> validate_trace(const DemandTrace& trace,
                                           const FairnessParams& params);

// R_i += <x_i, y_i>; t += 1. Throws DataError on shape mismatch.
RewardState accrue(const RewardState& state, const DemandMatrix& demand,
                   const AllocationMatrix& alloc);

}  // namespace fairalloc

#endif  // FAIRALLOC_CORE_MODEL_HPP_
