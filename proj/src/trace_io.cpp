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

#include "fairalloc/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fairalloc/csv.hpp"
#include "fairalloc/errors.hpp"

namespace fairalloc {
namespace {

constexpr std::string_view kMagic = "# fairalloc-trace v1 ";

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw DataError("line " + std::to_string(line) + ": " + msg);
}

[[noreturn]] void fail_field(std::size_t line, std::size_t field, const std::string& msg) {
  throw DataError("line " + std::to_string(line) + ", field " + std::to_string(field) + ": " +
                  msg);
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

std::size_t parse_size(std::string_view s, std::size_t line, const char* key) {
  std::size_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || v == 0) {
    fail(line, std::string("bad ") + key + " value '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

void write_trace(const DemandTrace& trace, std::ostream& out) {
  const std::size_t N = trace.rows();
  out << kMagic << "N=" << N << " m=" << trace.agents()
      << " family=" << family_tag(trace.family()) << '\n';
  std::string line;
  for (const auto& x : trace.rounds()) {
    line.clear();
    for (std::size_t i = 0; i < x.cols(); ++i) {
      if (i) line += '|';
      if (x.is_one_hot(i)) {
        line += std::to_string(x.hot_index(i) + 1);
        continue;
      }
      const auto col = x.dense_column(i);
      for (std::size_t j = 0; j < N; ++j) {
        if (j) line += ',';
        line += format_double(col[j]);
      }
      // A lone integral value would read back as a file id.
      if (N == 1 && all_digits(format_double(col[0]))) line += ".0";
    }
    line += '\n';
    out << line;
  }
}

DemandTrace read_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(1, "missing header");
  if (line.rfind(kMagic, 0) != 0) fail(1, "header must start with '# fairalloc-trace v1'");
  const auto keys = split(std::string_view(line).substr(kMagic.size()), ' ');
  if (keys.size() != 3 || keys[0].rfind("N=", 0) != 0 || keys[1].rfind("m=", 0) != 0 ||
      keys[2].rfind("family=", 0) != 0) {
    fail(1, "header must read 'N=<n> m=<m> family=<tag>'");
  }
  const std::size_t N = parse_size(keys[0].substr(2), 1, "N");
  const std::size_t m = parse_size(keys[1].substr(2), 1, "m");
  FamilyKind family;
  try {
    family = parse_family_tag(keys[2].substr(7));
  } catch (const DataError& e) {
    fail(1, e.what());
  }
  if (family == FamilyKind::kJobSimplex && N != 1) fail(1, "sched traces need N=1");
  if (family == FamilyKind::kBirkhoff && N != m) fail(1, "match traces need N=m");

  DemandTrace trace(N, m, family);
  std::size_t lineno = 1;
  std::vector<std::int32_t> hot(m);
  std::vector<double> dense;
  while (std::getline(in, line)) {
    ++lineno;
    if (in.eof()) fail(lineno, "truncated line (no trailing newline)");
    const auto fields = split(line, '|');
    if (fields.size() != m) {
      fail(lineno, "dimension mismatch: expected " + std::to_string(m) + " fields, found " +
                       std::to_string(fields.size()));
    }
    bool any_dense = false;
    for (std::size_t i = 0; i < m; ++i) {
      if (all_digits(fields[i])) {
        std::size_t id = 0;
        const auto [p, ec] = std::from_chars(fields[i].data(), fields[i].data() + fields[i].size(), id);
        if (ec != std::errc() || id < 1 || id > N) {
          fail_field(lineno, i + 1, "file id '" + std::string(fields[i]) + "' outside 1.." +
                                        std::to_string(N));
        }
        hot[i] = static_cast<std::int32_t>(id - 1);
      } else {
        hot[i] = -1;
        any_dense = true;
      }
    }
    if (!any_dense) {
      trace.push_back(DemandMatrix::one_hot(N, hot));
      continue;
    }
    dense.assign(N * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      if (hot[i] >= 0) {
        dense[i * N + static_cast<std::size_t>(hot[i])] = 1.0;
        continue;
      }
      const auto vals = split(fields[i], ',');
      if (vals.size() != N) {
        fail_field(lineno, i + 1, "dimension mismatch: expected " + std::to_string(N) +
                                      " values, found " + std::to_string(vals.size()));
      }
      for (std::size_t j = 0; j < N; ++j) {
        double v = 0.0;
        const auto [p, ec] = std::from_chars(vals[j].data(), vals[j].data() + vals[j].size(), v);
        if (ec != std::errc() || p != vals[j].data() + vals[j].size() || vals[j].empty()) {
          fail_field(lineno, i + 1, "bad number '" + std::string(vals[j]) + "'");
        }
        dense[i * N + j] = v;
      }
    }
    try {
      trace.push_back(DemandMatrix::dense(N, m, dense));
    } catch (const DataError& e) {
      fail(lineno, e.what());
    }
  }
  if (trace.horizon() == 0) fail(lineno + 1, "trace has no rounds");
  return trace;
}

void save_trace(const DemandTrace& trace, const std::filesystem::path& path) {
  std::ostringstream os;
  write_trace(trace, os);
  atomic_write(path, os.str());
}

DemandTrace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open trace file " + path.string());
  try {
    return read_trace(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace fairalloc
