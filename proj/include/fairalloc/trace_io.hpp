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

#ifndef FAIRALLOC_TRACE_IO_HPP_
#define FAIRALLOC_TRACE_IO_HPP_

#include <filesystem>
#include <iosfwd>

#include "fairalloc/core_model.hpp"

namespace fairalloc {

// Line-oriented text format, documented in docs/trace_format.md:
//   # fairalloc-trace v1 N=<n> m=<m> family=<tag>
//   one line per round, m fields separated by '|', each a 1-based one-hot
//   file id or N comma-separated reals.
// Loading throws DataError naming the line (and field) on malformed input.
void write_trace(const DemandTrace& trace, std::ostream& out);
DemandTrace read_trace(std::istream& in);

// save_trace writes to a sibling temporary file and renames it into place.
void save_trace(const DemandTrace& trace, const std::filesystem::path& path);
DemandTrace load_trace(const std::filesystem::path& path);

}  // namespace fairalloc

#endif  // FAIRALLOC_TRACE_IO_HPP_
