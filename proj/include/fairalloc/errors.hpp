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

#ifndef FAIRALLOC_ERRORS_HPP_
#define FAIRALLOC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace fairalloc {

// Malformed or inconsistent input data (traces, demands, allocations).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative solver hit its iteration cap before certifying its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double final_gap)
      : std::runtime_error(what), final_gap_(final_gap) {}
  double final_gap() const { return final_gap_; }

 private:
  double final_gap_;
};

}  // namespace fairalloc

#endif  // FAIRALLOC_ERRORS_HPP_
