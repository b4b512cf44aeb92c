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

// Runs every acceptance criterion and prints one PASS/FAIL line each.
// Thresholds are fixed in the criterion definitions; nothing here relaxes them.

#include <cstdio>
#include <cstdlib>
#include <exception>

#include "rilt/bench.hpp"

int main() {
  try {
    rilt::SuiteOptions opts;
    const auto results = rilt::run_suite("acceptance", opts);
    int failed = 0;
    for (const auto& r : results) {
      std::printf("%s %-6s measured=%.3e threshold=%.3e %6.2fs  %s%s%s\n", r.pass ? "PASS" : "FAIL", r.id.c_str(), r.measured,
                  r.threshold, r.seconds, r.title.c_str(), r.detail.empty() ? "" : " | ", r.detail.c_str());
      failed += r.pass ? 0 : 1;
    }
    std::printf("%zu criteria, %d failed\n", results.size(), failed);
    return failed ? EXIT_FAILURE : EXIT_SUCCESS;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance run aborted: %s\n", e.what());
    return EXIT_FAILURE;
  }
}
