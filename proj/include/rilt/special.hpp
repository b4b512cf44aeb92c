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

#ifndef RILT_SPECIAL_HPP
#define RILT_SPECIAL_HPP

#include <cstddef>
#include <memory>
#include <vector>

#include <gmpxx.h>

#include "rilt/exponent.hpp"
#include "rilt/scalar.hpp"

namespace rilt {

// All functions evaluate at the thread's working precision (user digits plus
// guard digits). Poles and other domain violations throw ErrorCode::domain.

Float gamma(const Float& t);
/// Exact for positive integers, Float otherwise.
Scalar gamma(const Scalar& t);
Float lngamma(const Float& t);
Float digamma(const Float& t);
/// n-th derivative of the digamma function; n = 0 is digamma itself.
Float polygamma(unsigned n, const Float& t);
/// Hurwitz zeta(s, t) for integer s >= 2 and t > 0.
Float hurwitz_zeta(unsigned s, const Float& t);
Float beta(const Float& a, const Float& b);
/// Exponential integral Ei; principal value for z > 0.
Float expint_ei(const Float& z);
/// Exact Bernoulli number B_n (B_1 = -1/2).
const mpq_class& bernoulli(unsigned n);

/// Mixed partials D[a][b] = d^a/dt^a d^b/dalpha^b of a gamma-ratio kernel at
/// (t, alpha) = (k, alpha0).
struct KernelDerivs {
  Exponent k;
  mpq_class alpha0;
  unsigned max_t = 0;
  unsigned max_a = 0;
  std::vector<std::vector<Scalar>> table;

  const Scalar& at(unsigned a, unsigned b) const { return table.at(a).at(b); }
};

/// R(t, alpha) = Gamma(t - alpha + 1) / Gamma(t + 1). Requires k >= alpha0.
std::shared_ptr<const KernelDerivs> gamma_ratio_derivs(const Exponent& k, const mpq_class& alpha0, unsigned max_t,
                                                       unsigned max_a);
/// Q(t, alpha) = Gamma(t + 1) / Gamma(t - alpha + 1) = 1 / R. Requires k >= alpha0.
std::shared_ptr<const KernelDerivs> reciprocal_ratio_derivs(const Exponent& k, const mpq_class& alpha0, unsigned max_t,
                                                            unsigned max_a);
/// d^j/da^j B(a + 1, 1 - mu) for j = 0..max_d; requires a > -1 and 0 < mu < 1.
std::vector<Scalar> beta_derivs(const Exponent& a, const mpq_class& mu, unsigned max_d);

std::size_t kernel_cache_size();
void clear_kernel_cache();

}  // namespace rilt

#endif  // RILT_SPECIAL_HPP
