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

#ifndef RILT_TESTS_SUPPORT_HPP
#define RILT_TESTS_SUPPORT_HPP

#include <random>
#include <string>

#include "rilt/scalar.hpp"
#include "rilt/series.hpp"

namespace rilt::testing {

inline Scalar q(long n, long d = 1) { return Scalar::ratio(n, d); }

inline Float relative_error(const Float& got, const Float& want) {
  if (want.is_zero()) return abs(got);
  return abs(got - want) / abs(want);
}

inline bool near(const Scalar& a, const Scalar& b, const char* tol) {
  return abs((a - b).to_float()) <= Float::parse(tol);
}

/// Random series on the given space with small rational coefficients.
inline Series random_series(std::mt19937_64& rng, const std::shared_ptr<const ParamSpace>& space, Truncation t,
                            std::int64_t q, unsigned max_terms, bool with_logs) {
  Series s(space, t, q);
  std::uniform_int_distribution<int> coef(-9, 9), den(1, 5), nterms(0, static_cast<int>(max_terms));
  const auto max_num = static_cast<int>(t.power_cap.num() * q / t.power_cap.den());
  std::uniform_int_distribution<int> pnum(0, std::max(0, max_num));
  std::uniform_int_distribution<int> lpow(0, with_logs ? static_cast<int>(t.log_cap) : 0);
  const int n = nterms(rng);
  for (int i = 0; i < n; ++i) {
    ParamScalar c(Scalar::ratio(coef(rng), den(rng)));
    if (space->size() && coef(rng) > 0) c = c * ParamScalar::variable(0);
    s.add_term({Exponent(pnum(rng), q), static_cast<unsigned>(lpow(rng))}, c);
  }
  return s;
}

}  // namespace rilt::testing

#endif  // RILT_TESTS_SUPPORT_HPP
