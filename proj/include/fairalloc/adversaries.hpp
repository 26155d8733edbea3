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

#ifndef FAIRALLOC_ADVERSARIES_HPP_
#define FAIRALLOC_ADVERSARIES_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "fairalloc/core_model.hpp"
#include "fairalloc/feasible_sets.hpp"

namespace fairalloc {

// Two-instance caching construction with m = 2 users and k = 1. Rounds
// 1..floor(eta*T) are (e1, e2). Afterwards instance 1 has user 1 on file 2
// and user 2 uniform over the library; instance 2 has user 1 uniform and
// user 2 on file 1.
DemandTrace lower_bound_trace(std::size_t T, double eta, int instance, std::size_t N,
                              std::uint64_t seed);

// Number of rounds in the first phase of lower_bound_trace.
std::size_t lower_bound_phase_end(std::size_t T, double eta);

// Each user requests file j with probability proportional to j^-s, one-hot.
DemandTrace zipf_trace(std::size_t N, std::size_t m, double s, std::size_t T,
                       std::uint64_t seed);

// Uniform i.i.d. workload for a family. Cache and matching demands are
// one-hot over the library; scheduling rewards are uniform on [delta, 1].
DemandTrace uniform_trace(const FeasibleFamily& family, std::size_t T, double delta,
                          std::uint64_t seed);

enum class TraceKind { kLowerBound, kZipf, kUniform, kFile };

struct TraceSpec {
  TraceKind kind = TraceKind::kUniform;
  double eta = 0.0;
  int instance = 1;
  double zipf_s = 0.0;
  double delta = 1.0;
  std::string path;

  // Parses "zipf:s", "lb:eta:inst" or "uniform". Throws std::invalid_argument.
  static TraceSpec parse_generator(std::string_view text);
  static TraceSpec file(std::string path);
  void validate() const;
  std::string describe() const;
};

// Builds the trace of length T for the family. Generated traces are
// prefix-stable in T except lower_bound, whose phase boundary moves with T.
// File traces must have at least T rounds and are truncated to T.
DemandTrace make_trace(const TraceSpec& spec, const FeasibleFamily& family, std::size_t T,
                       std::uint64_t seed);

// True when make_trace(spec, f, T1, s) is a prefix of make_trace(spec, f, T2, s).
bool prefix_stable(const TraceSpec& spec);

}  // namespace fairalloc

#endif  // FAIRALLOC_ADVERSARIES_HPP_
