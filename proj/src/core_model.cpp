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

#include "fairalloc/core_model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fairalloc/errors.hpp"

namespace fairalloc {

std::string_view family_tag(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::kSharedCache:
      return "cache";
    case FamilyKind::kJobSimplex:
      return "sched";
    case FamilyKind::kBirkhoff:
      return "match";
  }
  return "?";
}

FamilyKind parse_family_tag(std::string_view tag) {
  if (tag == "cache") return FamilyKind::kSharedCache;
  if (tag == "sched") return FamilyKind::kJobSimplex;
  if (tag == "match") return FamilyKind::kBirkhoff;
  throw DataError("unknown family tag '" + std::string(tag) + "'");
}

void FairnessParams::validate() const {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in [0, 1)");
  }
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1]");
  }
  if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("weights must be finite and nonnegative");
    }
  }
}

std::vector<double> FairnessParams::weight_vector(std::size_t agents) const {
  if (weights.empty()) return std::vector<double>(agents, 1.0);
  if (weights.size() != agents) {
    throw std::invalid_argument("weight count does not match agent count");
  }
  return weights;
}

DemandMatrix DemandMatrix::one_hot(std::size_t rows,
                                   std::vector<std::int32_t> files) {
  for (auto f : files) {
    if (f < 0 || static_cast<std::size_t>(f) >= rows) {
      throw DataError("one-hot index " + std::to_string(f) +
                      " outside library of size " + std::to_string(rows));
    }
  }
  DemandMatrix d;
  d.rows_ = rows;
  d.hot_ = std::move(files);
  return d;
}

DemandMatrix DemandMatrix::dense(std::size_t rows, std::size_t cols,
                                 std::vector<double> entries) {
  if (entries.size() != rows * cols) {
    throw DataError("dense demand has " + std::to_string(entries.size()) +
                    " entries, expected " + std::to_string(rows * cols));
  }
  for (double v : entries) {
    if (!std::isfinite(v) || v < 0.0) {
      throw DataError("demand entries must be finite and nonnegative");
    }
  }
  DemandMatrix d;
  d.rows_ = rows;
  d.hot_.assign(cols, -1);
  d.dense_ = std::move(entries);
  return d;
}

double DemandMatrix::at(std::size_t row, std::size_t col) const {
  if (hot_[col] >= 0) return static_cast<std::size_t>(hot_[col]) == row ? 1.0 : 0.0;
  return dense_[col * rows_ + row];
}

std::span<const double> DemandMatrix::dense_column(std::size_t col) const {
  return {dense_.data() + col * rows_, rows_};
}

double DemandMatrix::dot(std::size_t col, std::span<const double> y) const {
  if (hot_[col] >= 0) return y[static_cast<std::size_t>(hot_[col])];
  const double* c = dense_.data() + col * rows_;
  double s = 0.0;
  for (std::size_t j = 0; j < rows_; ++j) s += c[j] * y[j];
  return s;
}

double DemandMatrix::l1_norm(std::size_t col) const {
  if (hot_[col] >= 0) return 1.0;
  const double* c = dense_.data() + col * rows_;
  double s = 0.0;
  for (std::size_t j = 0; j < rows_; ++j) s += c[j];
  return s;
}

bool DemandMatrix::all_finite() const {
  for (double v : dense_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void DemandMatrix::axpy(std::size_t col, double scale,
                        std::span<double> out) const {
  if (hot_[col] >= 0) {
    out[static_cast<std::size_t>(hot_[col])] += scale;
    return;
  }
  const double* c = dense_.data() + col * rows_;
  for (std::size_t j = 0; j < rows_; ++j) out[j] += scale * c[j];
}

bool operator==(const DemandMatrix& a, const DemandMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (std::size_t i = 0; i < a.cols(); ++i) {
    if (a.is_one_hot(i) && b.is_one_hot(i)) {
      if (a.hot_index(i) != b.hot_index(i)) return false;
      continue;
    }
    for (std::size_t j = 0; j < a.rows(); ++j) {
      if (a.at(j, i) != b.at(j, i)) return false;
    }
  }
  return true;
}

void DemandTrace::push_back(DemandMatrix round) {
  if (round.rows() != rows_ || round.cols() != agents_) {
    std::ostringstream os;
    os << "round " << rounds_.size() + 1 << " has shape " << round.rows() << "x"
       << round.cols() << ", trace is " << rows_ << "x" << agents_;
    throw DataError(os.str());
  }
  rounds_.push_back(std::move(round));
}

DemandTrace DemandTrace::prefix(std::size_t horizon) const {
  if (horizon > rounds_.size()) {
    throw std::out_of_range("prefix longer than trace");
  }
  DemandTrace out(rows_, agents_, family_);
  out.rounds_.assign(rounds_.begin(), rounds_.begin() + static_cast<std::ptrdiff_t>(horizon));
  return out;
}

AllocationMatrix::AllocationMatrix(std::size_t rows, std::size_t cols,
                                   std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) {
    throw DataError("allocation entry count does not match its shape");
  }
}

AllocationMatrix AllocationMatrix::shared(std::span<const double> y,
                                          std::size_t cols) {
  std::vector<double> e;
  e.reserve(y.size() * cols);
  for (std::size_t i = 0; i < cols; ++i) e.insert(e.end(), y.begin(), y.end());
  return AllocationMatrix(y.size(), cols, std::move(e));
}

std::vector<TraceViolation> validate_trace(const DemandTrace& trace,
                                           const FairnessParams& params) {
  std::vector<TraceViolation> out;
  if (trace.horizon() == 0) {
    out.push_back({0, std::nullopt, "trace has no rounds"});
  }
  for (std::size_t t = 0; t < trace.horizon(); ++t) {
    const DemandMatrix& x = trace[t];
    if (x.rows() != trace.rows() || x.cols() != trace.agents()) {
      out.push_back({t, std::nullopt, "shape mismatch"});
      continue;
    }
    for (std::size_t i = 0; i < x.cols(); ++i) {
      const double l1 = x.l1_norm(i);
      if (l1 < params.delta - kFeasibilityTol) {
        std::ostringstream os;
        os << "round " << t + 1 << " agent " << i + 1 << ": l1 norm " << l1
           << " below delta " << params.delta;
        out.push_back({t, i, os.str()});
      } else if (l1 > 1.0 + kFeasibilityTol) {
        std::ostringstream os;
        os << "round " << t + 1 << " agent " << i + 1 << ": l1 norm " << l1
           << " exceeds 1";
        out.push_back({t, i, os.str()});
      }
    }
  }
  return out;
}

RewardState accrue(const RewardState& state, const DemandMatrix& demand,
                   const AllocationMatrix& alloc) {
  if (demand.rows() != alloc.rows() || demand.cols() != alloc.cols() ||
      demand.cols() != state.R.size()) {
    throw DataError("accrue: demand, allocation and reward shapes differ");
  }
  RewardState next = state;
  for (std::size_t i = 0; i < demand.cols(); ++i) {
    next.R[i] += demand.dot(i, alloc.column(i));
  }
  ++next.t;
  return next;
}

}  // namespace fairalloc
