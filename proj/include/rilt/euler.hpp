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

// Closed-form solutions of Cauchy-Euler equations with 1/ln(x)^p forcing.
//
// Writing y(x) = int_0^inf f(t) x^t dt turns sum_j a_j x^j y^(j) into
// Q(t) f(t) with Q(t) = sum_j a_j t(t-1)...(t-j+1), and 1/ln(x)^p into
// (-1)^p t^(p-1)/(p-1)!. The particular solution is f = P/Q.

#ifndef RILT_EULER_HPP
#define RILT_EULER_HPP

#include <gmpxx.h>

#include <string>
#include <vector>

#include "rilt/problem.hpp"
#include "rilt/scalar.hpp"

namespace rilt {

/// Dense polynomial in t, coefficients from degree 0 upward.
using RationalPoly = std::vector<mpq_class>;

std::string poly_str(const RationalPoly& p, const std::string& var = "t");
RationalPoly poly_trim(RationalPoly p);
RationalPoly poly_gcd(RationalPoly a, RationalPoly b);

struct EulerSolution {
  RationalPoly numerator;    // reduced, denominator monic
  RationalPoly denominator;
  std::vector<Float> roots;  // of the denominator, increasing
  std::vector<Float> residues;
  RationalPoly quotient;     // polynomial part of numerator/denominator

  /// f(t) printed as P(t)/Q(t).
  std::string str() const;
  /// y(x) for 0 < x < 1.
  Float eval(const Float& x) const;
};

EulerSolution euler_solve(const EulerDecl& eq);
EulerSolution euler_solve(const Problem& pb);

}  // namespace rilt

#endif  // RILT_EULER_HPP
