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

#ifndef RILT_OPERATORS_HPP
#define RILT_OPERATORS_HPP

#include <cstddef>

#include <gmpxx.h>

#include "rilt/exponent.hpp"
#include "rilt/scalar.hpp"
#include "rilt/series.hpp"

namespace rilt {

/// Order of a Caputo derivative. A variable order alpha(x) = alpha0 + delta(x)
/// carries delta as a formal parameter of the series' ParamSpace; its weight
/// in that space is the valuation of delta(x).
struct OrderSpec {
  enum class Kind { constant, variable };

  Kind kind = Kind::constant;
  mpq_class alpha0;
  // Variable orders only.
  Series delta;                 // alpha(x) - alpha0 as a series in x
  std::size_t delta_param = 0;  // index of the formal offset in the ParamSpace
  Float range_lo;               // inf of alpha(x) over the domain
  Float range_hi;               // sup of alpha(x) over the domain

  static OrderSpec constant(const mpq_class& alpha);
  static OrderSpec variable(const mpq_class& alpha0, Series delta, std::size_t delta_param, Float lo, Float hi);

  bool is_variable() const { return kind == Kind::variable; }
  /// Number of initial conditions, ceil(alpha0).
  unsigned ic_count() const;
  std::string str() const;
};

enum class GateResult { drop, keep };

/// Theta gate for a term of power k; throws for variable orders when k lies
/// strictly inside the range of alpha(x) (other than k = alpha0).
GateResult gate(const Exponent& k, const OrderSpec& order);

/// Forward Caputo derivative. With `standard_form` the result is multiplied by
/// x^alpha (powers preserved); otherwise powers shift by -alpha.
Series caputo_apply(const Series& u, const OrderSpec& order, bool standard_form = false);
/// The inverse kernel: maps x^alpha D^alpha u back to u on the gated subspace.
Series rilt_kernel_apply(const Series& rhs, const OrderSpec& order);
/// int_0^x f(z) (x - z)^(-mu) dz term by term.
Series volterra_apply(const Series& integrand, const mpq_class& mu);
Series delay_apply(const Series& u, const Scalar& lambda, const Scalar& b);

}  // namespace rilt

#endif  // RILT_OPERATORS_HPP
