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

#include "fairalloc/adversaries.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "fairalloc/errors.hpp"
#include "fairalloc/rng.hpp"
#include "fairalloc/trace_io.hpp"

namespace fairalloc {
namespace {

constexpr std::uint64_t kLowerBoundTag = 0x4C42'5452'4143'4531ULL;
constexpr std::uint64_t kZipfTag = 0x5A49'5046'5452'4143ULL;
constexpr std::uint64_t kUniformTag = 0x554E'4946'5452'4143ULL;

double parse_double(std::string_view s, const char* what) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw std::invalid_argument(std::string("bad ") + what + ": '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::size_t lower_bound_phase_end(std::size_t T, double eta) {
  const double v = std::floor(eta * static_cast<double>(T) + 1e-9);
  return std::min(T, static_cast<std::size_t>(std::max(0.0, v)));
}

DemandTrace lower_bound_trace(std::size_t T, double eta, int instance, std::size_t N,
                              std::uint64_t seed) {
  if (!(eta >= 0.0 && eta <= 0.5)) throw std::invalid_argument("eta must lie in [0, 1/2]");
  if (instance != 1 && instance != 2) throw std::invalid_argument("instance must be 1 or 2");
  if (N < 3) throw std::invalid_argument("lower-bound library needs N >= 3");
  if (T == 0) throw std::invalid_argument("horizon must be positive");
  SplitMix64 rng(derive_seed(seed, kLowerBoundTag));
  const std::size_t phase_end = lower_bound_phase_end(T, eta);
  DemandTrace trace(N, 2, FamilyKind::kSharedCache);
  for (std::size_t t = 0; t < T; ++t) {
    if (t < phase_end) {
      trace.push_back(DemandMatrix::one_hot(N, {0, 1}));
      continue;
    }
    const auto random_file = static_cast<std::int32_t>(rng.below(N));
    if (instance == 1) {
      trace.push_back(DemandMatrix::one_hot(N, {1, random_file}));
    } else {
      trace.push_back(DemandMatrix::one_hot(N, {random_file, 0}));
    }
  }
  return trace;
}

DemandTrace zipf_trace(std::size_t N, std::size_t m, double s, std::size_t T,
                       std::uint64_t seed) {
  if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("zipf exponent must be >= 0");
  if (N == 0 || m == 0) throw std::invalid_argument("N and m must be positive");
  std::vector<double> cdf(N);
  double acc = 0.0;
  for (std::size_t j = 0; j < N; ++j) {
    acc += std::pow(static_cast<double>(j + 1), -s);
    cdf[j] = acc;
  }
  for (double& c : cdf) c /= acc;
  SplitMix64 rng(derive_seed(seed, kZipfTag));
  DemandTrace trace(N, m, FamilyKind::kSharedCache);
  std::vector<std::int32_t> files(m);
  for (std::size_t t = 0; t < T; ++t) {
    for (auto& f : files) {
      const double u = rng.uniform();
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      f = static_cast<std::int32_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), N - 1));
    }
    trace.push_back(DemandMatrix::one_hot(N, files));
  }
  return trace;
}

DemandTrace uniform_trace(const FeasibleFamily& family, std::size_t T, double delta,
                          std::uint64_t seed) {
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
  SplitMix64 rng(derive_seed(seed, kUniformTag));
  const std::size_t N = family.library();
  const std::size_t m = family.agents();
  DemandTrace trace(N, m, family.kind());
  if (family.kind() == FamilyKind::kJobSimplex) {
    std::vector<double> x(m);
    for (std::size_t t = 0; t < T; ++t) {
      for (double& v : x) v = delta + (1.0 - delta) * rng.uniform();
      trace.push_back(DemandMatrix::dense(1, m, x));
    }
    return trace;
  }
  std::vector<std::int32_t> files(m);
  for (std::size_t t = 0; t < T; ++t) {
    for (auto& f : files) f = static_cast<std::int32_t>(rng.below(N));
    trace.push_back(DemandMatrix::one_hot(N, files));
  }
  return trace;
}

TraceSpec TraceSpec::parse_generator(std::string_view text) {
  TraceSpec spec;
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto colon = text.find(':', start);
    parts.push_back(text.substr(start, colon == std::string_view::npos ? colon : colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  if (parts[0] == "uniform" && parts.size() == 1) {
    spec.kind = TraceKind::kUniform;
  } else if (parts[0] == "zipf" && parts.size() == 2) {
    spec.kind = TraceKind::kZipf;
    spec.zipf_s = parse_double(parts[1], "zipf exponent");
  } else if (parts[0] == "lb" && parts.size() == 3) {
    spec.kind = TraceKind::kLowerBound;
    spec.eta = parse_double(parts[1], "eta");
    const double inst = parse_double(parts[2], "instance");
    if (inst != 1.0 && inst != 2.0) throw std::invalid_argument("instance must be 1 or 2");
    spec.instance = static_cast<int>(inst);
  } else {
    throw std::invalid_argument("generator must be zipf:s, lb:eta:inst or uniform, got '" +
                                std::string(text) + "'");
  }
  spec.validate();
  return spec;
}

TraceSpec TraceSpec::file(std::string path) {
  TraceSpec spec;
  spec.kind = TraceKind::kFile;
  spec.path = std::move(path);
  return spec;
}

void TraceSpec::validate() const {
  switch (kind) {
    case TraceKind::kLowerBound:
      if (!(eta >= 0.0 && eta <= 0.5)) throw std::invalid_argument("eta must lie in [0, 1/2]");
      if (instance != 1 && instance != 2) throw std::invalid_argument("instance must be 1 or 2");
      break;
    case TraceKind::kZipf:
      if (!(zipf_s >= 0.0) || !std::isfinite(zipf_s)) {
        throw std::invalid_argument("zipf exponent must be >= 0");
      }
      break;
    case TraceKind::kUniform:
      if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
      break;
    case TraceKind::kFile:
      if (path.empty()) throw std::invalid_argument("trace path is empty");
      break;
  }
}

std::string TraceSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case TraceKind::kLowerBound: os << "lb:" << eta << ":" << instance; break;
    case TraceKind::kZipf: os << "zipf:" << zipf_s; break;
    case TraceKind::kUniform: os << "uniform"; break;
    case TraceKind::kFile: os << "file:" << path; break;
  }
  return os.str();
}

bool prefix_stable(const TraceSpec& spec) { return spec.kind != TraceKind::kLowerBound; }

DemandTrace make_trace(const TraceSpec& spec, const FeasibleFamily& family, std::size_t T,
                       std::uint64_t seed) {
  spec.validate();
  if (T == 0) throw std::invalid_argument("horizon must be positive");
  switch (spec.kind) {
    case TraceKind::kLowerBound:
      if (family.kind() != FamilyKind::kSharedCache || family.agents() != 2 ||
          family.capacity() != 1) {
        throw std::invalid_argument("lower-bound traces need the cache family with m=2, k=1");
      }
      return lower_bound_trace(T, spec.eta, spec.instance, family.library(), seed);
    case TraceKind::kZipf: {
      DemandTrace z = zipf_trace(family.library(), family.agents(), spec.zipf_s, T, seed);
      if (family.kind() == FamilyKind::kSharedCache) return z;
      DemandTrace out(z.rows(), z.agents(), family.kind());
      for (const auto& x : z.rounds()) out.push_back(x);
      return out;
    }
    case TraceKind::kUniform:
      return uniform_trace(family, T, spec.delta, seed);
    case TraceKind::kFile: {
      DemandTrace loaded = load_trace(spec.path);
      if (loaded.family() != family.kind() || loaded.rows() != family.library() ||
          loaded.agents() != family.agents()) {
        throw DataError("trace file " + spec.path + " does not match " + family.describe());
      }
      if (loaded.horizon() < T) {
        throw DataError("trace file " + spec.path + " has " +
                        std::to_string(loaded.horizon()) + " rounds, need " +
                        std::to_string(T));
      }
      return loaded.horizon() == T ? loaded : loaded.prefix(T);
    }
  }
  throw std::logic_error("unknown trace kind");
}

}  // namespace fairalloc
