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

#include "rilt/operators.hpp"

#include "rilt/error.hpp"
#include "rilt/special.hpp"

namespace rilt {

OrderSpec OrderSpec::constant(const mpq_class& alpha) {
  if (alpha <= 0) throw domain_error("derivative order must be positive");
  OrderSpec o;
  o.alpha0 = alpha;
  o.range_lo = Float(alpha);
  o.range_hi = Float(alpha);
  return o;
}

OrderSpec OrderSpec::variable(const mpq_class& alpha0, Series delta, std::size_t delta_param, Float lo, Float hi) {
  if (alpha0 <= 0) throw domain_error("derivative order must be positive");
  if (lo.sign() <= 0) throw domain_error("variable order must stay positive on the domain");
  const auto v = delta.weighted_valuation();
  if (v && *v <= Exponent(0)) throw domain_error("variable order offset must vanish at x = 0");
  OrderSpec o;
  o.kind = Kind::variable;
  o.alpha0 = alpha0;
  o.delta = std::move(delta);
  o.delta_param = delta_param;
  o.range_lo = std::move(lo);
  o.range_hi = std::move(hi);
  return o;
}

unsigned OrderSpec::ic_count() const {
  mpz_class c;
  mpz_cdiv_q(c.get_mpz_t(), alpha0.get_num_mpz_t(), alpha0.get_den_mpz_t());
  return static_cast<unsigned>(c.get_ui());
}

std::string OrderSpec::str() const {
  if (!is_variable()) return alpha0.get_str();
  return alpha0.get_str() + " + delta(x)";
}

GateResult gate(const Exponent& k, const OrderSpec& order) {
  const mpq_class kq = k.rational();
  if (kq == order.alpha0) return GateResult::keep;
  if (order.is_variable()) {
    const Float kf(kq);
    if (kf > order.range_lo && kf < order.range_hi)
      throw Error(ErrorCode::solve, "term x^" + k.str() + " lies inside the range of the variable order [" + order.range_lo.str(8) +
                                        ", " + order.range_hi.str(8) + "]; the gate is undefined there");
  }
  return kq < order.alpha0 ? GateResult::drop : GateResult::keep;
}

namespace {

// Largest formal-offset degree b with k + w*b <= cap.
unsigned alpha_depth(const Series& s, const Exponent& k, const OrderSpec& order) {
  if (!order.is_variable() || order.delta.empty()) return 0;
  const Exponent w = s.space()->weights.at(order.delta_param);
  if (w <= Exponent(0)) throw Error(ErrorCode::internal, "variable order offset has no truncation weight");
  const Exponent room = s.truncation().power_cap - k;
  if (room < Exponent(0)) return 0;
  const Exponent ratio = room * Exponent(w.den(), w.num());
  return static_cast<unsigned>(ratio.floor());
}

ParamScalar offset_power(const OrderSpec& order, unsigned b) {
  if (b == 0) return ParamScalar(1);
  Monomial m{};
  m[order.delta_param] = static_cast<std::uint8_t>(b);
  return ParamScalar::monomial(m, Scalar(1));
}

// Shared body of the forward and inverse kernels: term (k, m) maps to
// sum_r C(m, r) sum_b D[m-r][b] / b! delta^b x^k ln^r.
Series apply_ratio_kernel(const Series& u, const OrderSpec& order, bool reciprocal) {
  Series out = u.zero_like();
  const unsigned dcap = u.space()->degree_cap;
  for (const auto& [key, c] : u.terms()) {
    if (gate(key.power, order) == GateResult::drop) continue;
    const unsigned depth = alpha_depth(u, key.power, order);
    const auto tbl = reciprocal ? reciprocal_ratio_derivs(key.power, order.alpha0, key.logpow, depth)
                                : gamma_ratio_derivs(key.power, order.alpha0, key.logpow, depth);
    for (unsigned r = 0; r <= key.logpow; ++r) {
      ParamScalar coef;
      Scalar fb(1);
      for (unsigned b = 0; b <= depth; ++b) {
        if (b > 0) fb *= Scalar(static_cast<long>(b));
        const Scalar& d = tbl->at(key.logpow - r, b);
        if (d.is_zero()) continue;
        coef += offset_power(order, b) * (d / fb);
      }
      out.add_term({key.power, r}, c.mul(coef, dcap) * binomial(key.logpow, r));
    }
  }
  return out;
}

}  // namespace

Series caputo_apply(const Series& u, const OrderSpec& order, bool standard_form) {
  Series out = apply_ratio_kernel(u, order, true);
  if (standard_form) return out;
  const Exponent a0 = Exponent::from_rational(order.alpha0);
  if (!order.is_variable() || order.delta.empty()) return shift(out, -a0);
  // x^(-alpha(x)) = x^(-alpha0) exp(-delta ln x) with delta formal.
  Series dl = mul(u.monomial_like(Exponent(0), 1, offset_power(order, 1)), u.constant_like(ParamScalar(1)));
  const Series factor = expand_function(SeriesFunction::exp, neg(dl));
  return shift(mul(out, factor), -a0);
}

Series rilt_kernel_apply(const Series& rhs, const OrderSpec& order) { return apply_ratio_kernel(rhs, order, false); }

Series volterra_apply(const Series& integrand, const mpq_class& mu) {
  if (mu <= 0 || mu >= 1) throw domain_error("Volterra kernel exponent must lie in (0, 1)");
  const Exponent shift_by = Exponent(1) - Exponent::from_rational(mu);
  Series out = integrand.zero_like();
  out.extend_lattice(shift_by.den());
  for (const auto& [key, c] : integrand.terms()) {
    const Exponent p = key.power + shift_by;
    if (p > out.truncation().power_cap) continue;
    const auto b = beta_derivs(key.power, mu, key.logpow);
    for (unsigned r = 0; r <= key.logpow; ++r) out.add_term({p, r}, c * (binomial(key.logpow, r) * b[key.logpow - r]));
  }
  return out;
}

Series delay_apply(const Series& u, const Scalar& lambda, const Scalar& b) { return substitute_affine(u, lambda, b); }

}  // namespace rilt
