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

#include "fairalloc/opf_policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fairalloc/errors.hpp"
#include "fairalloc/fairness.hpp"

namespace fairalloc {

std::string_view mode_tag(Mode mode) {
  return mode == Mode::kFractional ? "frac" : "int";
}

Mode parse_mode(std::string_view tag) {
  if (tag == "frac") return Mode::kFractional;
  if (tag == "int") return Mode::kIntegral;
  throw std::invalid_argument("mode must be 'frac' or 'int'");
}

OpfPolicy::OpfPolicy(FeasibleFamily family, PolicyConfig config)
    : family_(std::move(family)),
      config_(std::move(config)),
      rng_(derive_seed(config_.seed, 0x5A4D504CULL)) {
  config_.params.validate();
  weights_ = config_.params.weight_vector(family_.agents());
  if (!(config_.step_scale > 0.0) || !std::isfinite(config_.step_scale)) {
    throw std::invalid_argument("step scale must be positive");
  }
  diameter_ = config_.diameter.value_or(family_.diameter());
  if (!(diameter_ > 0.0)) throw std::invalid_argument("diameter must be positive");
  const std::size_t m = family_.agents();
  y_ = family_.uniform_point();
  R_.assign(m, 1.0);
  realized_R_.assign(m, 1.0);
  g_.assign(family_.dim(), 0.0);
  inc_.assign(m, 0.0);
  realized_inc_.assign(m, 0.0);
  coeff_.assign(m, 0.0);
  if (family_.kind() == FamilyKind::kSharedCache) {
    support_.resize(family_.dim());
    std::iota(support_.begin(), support_.end(), 0);
  }
}

const std::vector<double>& OpfPolicy::act() {
  if (config_.mode == Mode::kFractional) return y_;
  if (!sampled_) {
    sample_ = sample_integral(family_, y_, rng_);
    sampled_ = true;
  }
  return sample_;
}

const std::vector<double>& OpfPolicy::realized_rewards() const {
  return config_.mode == Mode::kIntegral ? realized_R_ : R_;
}

const std::vector<double>& OpfPolicy::last_realized_increments() const {
  return config_.mode == Mode::kIntegral ? realized_inc_ : inc_;
}

void OpfPolicy::feed(const DemandMatrix& demand) {
  check_demand_shape(family_, demand);
  if (!demand.all_finite()) throw DataError("demand is not finite");
  if (config_.mode == Mode::kIntegral) {
    act();
    agent_rewards(family_, demand, sample_, realized_inc_);
    for (std::size_t i = 0; i < R_.size(); ++i) realized_R_[i] += realized_inc_[i];
    sampled_ = false;
  }
  agent_rewards(family_, demand, y_, inc_);
  for (std::size_t i = 0; i < R_.size(); ++i) {
    R_[i] += inc_[i];
    coeff_[i] = weights_[i] * phi_prime(config_.params.alpha, R_[i]);
  }
  if (family_.kind() == FamilyKind::kSharedCache) {
    ascend_shared_cache(demand);
  } else {
    ascend_dense(demand);
  }
  ++rounds_;
}

// The gradient is nonnegative, so the projection shift is nonnegative and
// coordinates with y_j = 0 and g_j = 0 stay at zero. Only the current support
// and the gradient support take part in the projection.
void OpfPolicy::ascend_shared_cache(const DemandMatrix& demand) {
  for (std::size_t j : touched_) g_[j] = 0.0;
  touched_.clear();
  for (std::size_t i = 0; i < demand.cols(); ++i) {
    const double c = coeff_[i];
    demand.for_each_nonzero(i, [&](std::size_t j, double v) {
      if (g_[j] == 0.0) touched_.push_back(j);
      g_[j] += c * v;
    });
  }
  std::sort(touched_.begin(), touched_.end());
  touched_.erase(std::unique(touched_.begin(), touched_.end()), touched_.end());
  double norm2 = 0.0;
  for (std::size_t j : touched_) norm2 += g_[j] * g_[j];
  if (norm2 == 0.0) return;
  S_ += norm2;
  last_step_ = config_.step_scale * diameter_ / std::sqrt(S_);

  candidates_.clear();
  std::set_union(support_.begin(), support_.end(), touched_.begin(), touched_.end(),
                 std::back_inserter(candidates_));
  scratch_in_.resize(candidates_.size());
  scratch_out_.resize(candidates_.size());
  for (std::size_t c = 0; c < candidates_.size(); ++c) {
    const std::size_t j = candidates_[c];
    scratch_in_[c] = y_[j] + last_step_ * g_[j];
  }
  project_capped_simplex(scratch_in_, static_cast<double>(family_.capacity()), scratch_out_);
  support_.clear();
  for (std::size_t c = 0; c < candidates_.size(); ++c) {
    const std::size_t j = candidates_[c];
    y_[j] = scratch_out_[c];
    if (y_[j] > 0.0) support_.push_back(j);
  }
}

void OpfPolicy::ascend_dense(const DemandMatrix& demand) {
  std::fill(g_.begin(), g_.end(), 0.0);
  add_agent_gradient(family_, demand, coeff_, g_);
  double norm2 = 0.0;
  for (double v : g_) norm2 += v * v;
  if (norm2 == 0.0) return;
  S_ += norm2;
  last_step_ = config_.step_scale * diameter_ / std::sqrt(S_);
  std::vector<double> v(y_.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = y_[j] + last_step_ * g_[j];
  y_ = project(family_, v);
}

std::vector<double> RunRecord::rewards_after(std::size_t rounds) const {
  if (rounds > horizon) throw std::out_of_range("rounds beyond horizon");
  if (rounds == horizon) return final_rewards;
  return {rewards_before.begin() + static_cast<std::ptrdiff_t>(rounds * agents),
          rewards_before.begin() + static_cast<std::ptrdiff_t>((rounds + 1) * agents)};
}

std::vector<double> RunRecord::realized_after(std::size_t rounds) const {
  if (mode == Mode::kFractional) return rewards_after(rounds);
  if (rounds > horizon) throw std::out_of_range("rounds beyond horizon");
  std::vector<double> r(agents, 1.0);
  for (std::size_t t = 0; t < rounds; ++t) {
    for (std::size_t i = 0; i < agents; ++i) r[i] += realized_increments[t * agents + i];
  }
  return r;
}

RunRecord run_policy(const FeasibleFamily& family, const DemandTrace& trace,
                     const PolicyConfig& config, const RunOptions& options) {
  if (trace.rows() != family.library() || trace.agents() != family.agents()) {
    throw DataError("trace shape does not match " + family.describe());
  }
  const auto violations = validate_trace(trace, config.params);
  if (!violations.empty()) {
    throw DataError("invalid trace: " + violations.front().message +
                    (violations.size() > 1
                         ? " (+" + std::to_string(violations.size() - 1) + " more)"
                         : std::string()));
  }
  OpfPolicy policy(family, config);
  const std::size_t T = trace.horizon();
  const std::size_t m = family.agents();
  RunRecord rec(family);
  rec.mode = config.mode;
  rec.alpha = config.params.alpha;
  rec.weights = config.params.weight_vector(m);
  rec.horizon = T;
  rec.agents = m;
  rec.increments.reserve(T * m);
  rec.rewards_before.reserve(T * m);
  if (config.mode == Mode::kIntegral) rec.realized_increments.reserve(T * m);
  for (std::size_t t = 0; t < T; ++t) {
    const auto& committed = policy.act();
    if (options.keep_allocations) rec.allocations.push_back(committed);
    rec.rewards_before.insert(rec.rewards_before.end(), policy.rewards().begin(),
                              policy.rewards().end());
    policy.feed(trace[t]);
    rec.increments.insert(rec.increments.end(), policy.last_increments().begin(),
                          policy.last_increments().end());
    if (config.mode == Mode::kIntegral) {
      const auto& ri = policy.last_realized_increments();
      rec.realized_increments.insert(rec.realized_increments.end(), ri.begin(), ri.end());
    }
    if (options.keep_gradients) rec.gradients.push_back(policy.last_gradient());
  }
  rec.final_rewards = policy.rewards();
  rec.final_realized_rewards = policy.realized_rewards();
  return rec;
}

}  // namespace fairalloc
