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

#ifndef FAIRALLOC_CSV_HPP_
#define FAIRALLOC_CSV_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fairalloc {

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

// Writes content to a temporary sibling, then renames it over path. The
// temporary is removed if anything fails, so no partial file is left.
void atomic_write(const std::filesystem::path& path, std::string_view content);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Comma-separated, '\n' line endings, no quoting (fields never contain
  // commas).
  std::string str() const;
};

}  // namespace fairalloc

#endif  // FAIRALLOC_CSV_HPP_
