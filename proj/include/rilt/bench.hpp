// Copyright 2026 The rilt Authors
//
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

// Benchmark suites: the acceptance criteria and the reproduced tables.

#ifndef RILT_BENCH_HPP
#define RILT_BENCH_HPP

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rilt/problem.hpp"

namespace rilt {

struct CriterionResult {
  std::string id;
  std::string title;
  double measured = 0;
  double threshold = 0;
  bool pass = false;
  double seconds = 0;
  std::string detail;
};

struct SuiteOptions {
  /// Run a single criterion by id.
  std::optional<std::string> only;
  std::uint64_t seed = 20260101;
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned jobs = 0;
};

std::vector<std::string> suite_names();
std::vector<std::string> suite_criteria(const std::string& suite);
std::vector<CriterionResult> run_suite(const std::string& suite, const SuiteOptions& opts = {});

std::string manifest_csv(const std::vector<CriterionResult>& results);
std::string manifest_json(const std::vector<CriterionResult>& results);

/// Parses a problem shipped with the library.
Problem load_builtin(const std::string& name);

/// Rossler-family parameters matched against the published t = 0.1 state.
struct RosslerIdentification {
  mpq_class A, B, C;
  double defect = 0;
  bool identified = false;
};
RosslerIdentification identify_rossler();

}  // namespace rilt

#endif  // RILT_BENCH_HPP
