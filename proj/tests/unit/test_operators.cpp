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

#include <random>

#include <doctest.h>

#include "rilt/error.hpp"
#include "rilt/operators.hpp"
#include "rilt/special.hpp"
#include "support.hpp"

using namespace rilt;
using rilt::testing::q;

namespace {

Series mono(const std::shared_ptr<const ParamSpace>& sp, long cap_num, long cap_den, long pn, long pd, unsigned l, const Scalar& c,
            unsigned log_cap = 4) {
  return Series::monomial(sp, {Exponent(cap_num, cap_den), log_cap}, Exponent(pn, pd), l, ParamScalar(c));
}

Float fl(const ParamScalar& c) { return c.constant().to_float(); }

bool close(const Float& a, const Float& b, const char* tol = "1e-40") { return rilt::testing::relative_error(a, b) <= Float::parse(tol); }

}  // namespace

TEST_SUITE("operators") {
  TEST_CASE("Caputo half-derivative of x") {
    const auto sp = ParamSpace::empty();
    const Series u = mono(sp, 4, 1, 1, 1, 0, q(1));
    const Series d = caputo_apply(u, OrderSpec::constant(mpq_class(1, 2)));
    REQUIRE(d.size() == 1);
    const Float want = Float(2) / sqrt(Float::pi());
    CHECK(close(fl(d.coeff(Exponent(1, 2))), want));
    const Series ds = caputo_apply(u, OrderSpec::constant(mpq_class(1, 2)), true);
    CHECK(close(fl(ds.coeff(Exponent(1))), want));
  }

  TEST_CASE("Caputo of x^3 at order 1/3") {
    const Series u = mono(ParamSpace::empty(), 4, 1, 3, 1, 0, q(1));
    const Series d = caputo_apply(u, OrderSpec::constant(mpq_class(1, 3)));
    CHECK(close(fl(d.coeff(Exponent(8, 3))), Float(6) / gamma(Float(mpq_class(11, 3)))));
  }

  TEST_CASE("Caputo annihilates constants and integer order is exact") {
    const auto sp = ParamSpace::empty();
    CHECK(caputo_apply(mono(sp, 3, 1, 0, 1, 0, q(5)), OrderSpec::constant(mpq_class(1, 2))).empty());
    const Series d = caputo_apply(mono(sp, 5, 1, 3, 1, 0, q(1)), OrderSpec::constant(mpq_class(2)));
    REQUIRE(d.is_exact());
    CHECK(d.coeff(Exponent(1)).constant() == q(6));
  }

  TEST_CASE("kernel on x^2 ln x at order one") {
    const Series u = mono(ParamSpace::empty(), 4, 1, 2, 1, 1, q(1));
    const Series k = rilt_kernel_apply(u, OrderSpec::constant(mpq_class(1)));
    CHECK(k.is_exact());
    CHECK(k.coeff(Exponent(2), 1).constant() == q(1, 2));
    CHECK(k.coeff(Exponent(2), 0).constant() == q(-1, 4));
  }

  TEST_CASE("kernel gate") {
    const auto sp = ParamSpace::empty();
    const OrderSpec half = OrderSpec::constant(mpq_class(1, 2));
    CHECK(rilt_kernel_apply(mono(sp, 3, 1, 1, 4, 0, q(1)), half).empty());
    CHECK_FALSE(rilt_kernel_apply(mono(sp, 3, 1, 1, 2, 0, q(1)), half).empty());
    CHECK(gate(Exponent(1, 2), half) == GateResult::keep);
    CHECK(gate(Exponent(0), half) == GateResult::drop);
  }

  TEST_CASE("variable order gate rejects the open range") {
    const auto sp = ParamSpace::make({"d"}, {Exponent(1)});
    Series delta = Series::monomial(sp, {Exponent(3), 0}, Exponent(1), 0, ParamScalar(q(1, 2)));
    const OrderSpec o = OrderSpec::variable(mpq_class(1, 2), delta, 0, Float(mpq_class(1, 2)), Float(1));
    CHECK(gate(Exponent(1, 2), o) == GateResult::keep);
    CHECK(gate(Exponent(1, 4), o) == GateResult::drop);
    CHECK(gate(Exponent(1), o) == GateResult::keep);
    CHECK_THROWS_AS(gate(Exponent(3, 4), o), Error);
  }

  TEST_CASE("variable order expands around alpha0") {
    const auto sp = ParamSpace::make({"d"}, {Exponent(1)});
    Series delta = Series::monomial(sp, {Exponent(4), 0}, Exponent(1), 0, ParamScalar(q(1)));
    const OrderSpec o = OrderSpec::variable(mpq_class(1, 2), delta, 0, Float(mpq_class(1, 2)), Float(mpq_class(3, 2)));
    const Series u = Series::monomial(sp, {Exponent(4), 0}, Exponent(2), 0, ParamScalar(q(1)));
    const Series d = caputo_apply(u, o, true);
    const ParamScalar c = d.coeff(Exponent(2));
    const auto parts = c.split_by(0);
    const Float t(mpq_class(5, 2));
    CHECK(close(parts.at(0).constant().to_float(), Float(2) / gamma(t)));
    CHECK(close(parts.at(1).constant().to_float(), Float(2) * digamma(t) / gamma(t)));
    // weight 1, cap 4, base power 2: degrees up to 2 survive
    CHECK(c.degree(0) == 2);
  }

  TEST_CASE("variable order with zero offset matches the constant path") {
    const auto sp = ParamSpace::make({"d"}, {Exponent(1)});
    const OrderSpec v = OrderSpec::variable(mpq_class(3, 4), Series(sp, {Exponent(3), 2}), 0, Float(mpq_class(3, 4)),
                                            Float(mpq_class(3, 4)));
    const OrderSpec c = OrderSpec::constant(mpq_class(3, 4));
    std::mt19937_64 rng(11);
    for (int i = 0; i < 20; ++i) {
      const Series u = rilt::testing::random_series(rng, sp, {Exponent(3), 2}, 4, 6, true);
      CHECK(caputo_apply(u, v).identical(caputo_apply(u, c)));
      CHECK(rilt_kernel_apply(u, v).identical(rilt_kernel_apply(u, c)));
    }
  }

  TEST_CASE("Volterra kernel") {
    const auto sp = ParamSpace::empty();
    const Series v = volterra_apply(mono(sp, 3, 1, 0, 1, 0, q(1)), mpq_class(1, 2));
    CHECK(v.coeff(Exponent(1, 2)).constant() == q(2));
    const Series v2 = volterra_apply(mono(sp, 3, 1, 1, 1, 0, q(1)), mpq_class(1, 2));
    CHECK(v2.coeff(Exponent(3, 2)).constant() == q(4, 3));
    CHECK_THROWS_AS(volterra_apply(v, mpq_class(3, 2)), Error);
  }

  TEST_CASE("delay") {
    const auto sp = ParamSpace::empty();
    const Series u = mono(sp, 3, 1, 2, 1, 0, q(1));
    const Series d = delay_apply(u, q(1, 2), q(0));
    CHECK(d.coeff(Exponent(2)).constant() == q(1, 4));
  }
}

TEST_SUITE("operators properties") {
  TEST_CASE("linearity of Caputo, kernel and Volterra") {
    std::mt19937_64 rng(5);
    const auto sp = ParamSpace::empty();
    const Truncation t{Exponent(3), 2};
    for (const mpq_class a : {mpq_class(1, 2), mpq_class(1), mpq_class(7, 4)}) {
      const OrderSpec o = OrderSpec::constant(a);
      for (int i = 0; i < 15; ++i) {
        const Series u = rilt::testing::random_series(rng, sp, t, 4, 6, true);
        const Series w = rilt::testing::random_series(rng, sp, t, 4, 6, true);
        const ParamScalar s(q(3, 7));
        const Series lhs = caputo_apply(add(u, scale(w, s)), o);
        const Series rhs = add(caputo_apply(u, o), scale(caputo_apply(w, o), s));
        CHECK(sub(lhs, rhs).max_abs_coeff().to_float() <= Float::parse("1e-45"));
        const Series kl = rilt_kernel_apply(add(u, scale(w, s)), o);
        const Series kr = add(rilt_kernel_apply(u, o), scale(rilt_kernel_apply(w, o), s));
        CHECK(sub(kl, kr).max_abs_coeff().to_float() <= Float::parse("1e-45"));
      }
    }
    for (int i = 0; i < 15; ++i) {
      const Series u = rilt::testing::random_series(rng, sp, t, 4, 6, true);
      const Series w = rilt::testing::random_series(rng, sp, t, 4, 6, true);
      CHECK(sub(volterra_apply(add(u, w), mpq_class(1, 3)),
                add(volterra_apply(u, mpq_class(1, 3)), volterra_apply(w, mpq_class(1, 3))))
                .max_abs_coeff()
                .to_float() <= Float::parse("1e-45"));
    }
  }

  TEST_CASE("kernel inverts the standard-form Caputo on the gated subspace") {
    std::mt19937_64 rng(9);
    const auto sp = ParamSpace::empty();
    const Truncation t{Exponent(4), 3};
    for (const mpq_class a : {mpq_class(1, 2), mpq_class(1), mpq_class(2), mpq_class(5, 3)}) {
      const OrderSpec o = OrderSpec::constant(a);
      for (int i = 0; i < 20; ++i) {
        const Series u = rilt::testing::random_series(rng, sp, t, 6, 8, true);
        Series gated = u.zero_like();
        for (const auto& [k, c] : u.terms())
          if (gate(k.power, o) == GateResult::keep) gated.add_term(k, c);
        const Series back = rilt_kernel_apply(caputo_apply(u, o, true), o);
        CHECK(sub(back, gated).max_abs_coeff().to_float() <= Float::parse("1e-45"));
        if (a.get_den() == 1) CHECK(back.identical(gated));
      }
    }
  }

  TEST_CASE("Volterra maps positive coefficients to positive coefficients") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> pn(0, 12), mu(1, 9);
    for (int i = 0; i < 40; ++i) {
      const Series u = mono(ParamSpace::empty(), 4, 1, pn(rng), 4, 0, q(1));
      const Series v = volterra_apply(u, Scalar::ratio(mu(rng), 10).rational());
      for (const auto& [k, c] : v.terms()) CHECK(c.constant() > q(0));
    }
  }

  TEST_CASE("power preservation of the standard form") {
    std::mt19937_64 rng(21);
    const auto sp = ParamSpace::empty();
    const Truncation t{Exponent(3), 2};
    const OrderSpec o = OrderSpec::constant(mpq_class(2, 3));
    for (int i = 0; i < 20; ++i) {
      const Series u = rilt::testing::random_series(rng, sp, t, 3, 6, true);
      const Series d = caputo_apply(u, o, true);
      for (const auto& [k, c] : d.terms()) {
        bool found = false;
        for (const auto& [ku, cu] : u.terms()) found = found || ku.power == k.power;
        CHECK(found);
      }
    }
  }
}
