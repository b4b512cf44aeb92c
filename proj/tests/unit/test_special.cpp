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

#include <doctest.h>

#include <random>
#include <thread>

#include "rilt/error.hpp"
#include "rilt/special.hpp"
#include "support.hpp"

using namespace rilt;
using rilt::testing::relative_error;

namespace {

Float tol(const char* s) { return Float::parse(s); }

// R(t, a) straight from log-gamma at the current precision.
Float ratio_direct(const Float& t, const Float& a) { return exp(lngamma(t - a + Float(1)) - lngamma(t + Float(1))); }

}  // namespace

TEST_SUITE("special") {
  TEST_CASE("gamma identities") {
    const Float half(mpq_class(1, 2));
    CHECK(relative_error(gamma(half), sqrt(Float::pi())) < tol("1e-50"));
    CHECK(relative_error(gamma(half) * gamma(half), Float::pi()) < tol("1e-50"));
    CHECK(gamma(Scalar(5)) == Scalar(24));
    const Float g = gamma(Float(mpq_class(11, 3)));
    CHECK(relative_error(g, Float(mpq_class(8, 3)) * Float(mpq_class(5, 3)) * Float(mpq_class(2, 3)) * gamma(Float(mpq_class(2, 3)))) <
          tol("1e-50"));
    CHECK_THROWS_AS(gamma(Float(0)), Error);
    CHECK_THROWS_AS(gamma(Float(-1)), Error);
  }

  TEST_CASE("polygamma values") {
    const Float pi2_6 = Float::pi() * Float::pi() / Float(6);
    CHECK(relative_error(polygamma(1, Float(1)), pi2_6) < tol("1e-50"));
    CHECK(relative_error(polygamma(0, Float(1)), -Float::euler_gamma()) < tol("1e-50"));
    // psi''(1) = -2 zeta(3)
    Float z3;
    mpfr_zeta_ui(z3.get(), 3, MPFR_RNDN);
    CHECK(relative_error(polygamma(2, Float(1)), Float(-2) * z3) < tol("1e-50"));
    CHECK_THROWS_AS(polygamma(2, Float(0)), Error);
  }

  TEST_CASE("recurrences at random arguments") {
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<long> num(1, 2000);
    for (int i = 0; i < 100; ++i) {
      const Float t = Float(num(rng)) / Float(100) + Float(mpq_class(1, 10));
      const Float t1 = t + Float(1);
      CHECK(relative_error(gamma(t1), t * gamma(t)) < tol("1e-50"));
      CHECK(abs(digamma(t1) - digamma(t) - Float(1) / t) < tol("1e-50") * (Float(1) + abs(digamma(t1))));
      for (unsigned n = 1; n <= 3; ++n) {
        Float shiftv = factorial(n).to_float() / pow(t, static_cast<long>(n + 1));
        if (n % 2) shiftv = -shiftv;
        const Float want = polygamma(n, t) + shiftv;
        CHECK(relative_error(polygamma(n, t1), want) < tol("1e-48"));
      }
    }
  }

  TEST_CASE("Ei") {
    // -Ei(-1) = E1(1) = int_1^inf e^-t/t dt = 0.21938393439552027367...
    CHECK(abs(expint_ei(Float(-1)) + Float::parse("0.2193839343955202736771637754601216")) < tol("1e-33"));
    for (const char* z : {"1e-6", "-1e-6"}) {
      const Float zz = Float::parse(z);
      CHECK(abs(expint_ei(zz) - log(abs(zz)) - Float::euler_gamma()) < tol("2e-6"));
    }
    const Float h = tol("1e-20");
    const Float fd = (expint_ei(Float(2) + h) - expint_ei(Float(2) - h)) / (Float(2) * h);
    CHECK(relative_error(fd, exp(Float(2)) / Float(2)) < tol("1e-25"));
    CHECK_THROWS_AS(expint_ei(Float(0)), Error);
  }

  TEST_CASE("gamma ratio closed forms") {
    const auto r = gamma_ratio_derivs(Exponent(2), mpq_class(1), 2, 0);
    CHECK(r->at(0, 0) == Scalar::ratio(1, 2));
    CHECK(r->at(1, 0) == Scalar::ratio(-1, 4));
    CHECK(r->at(2, 0) == Scalar::ratio(1, 4));
    const auto h = gamma_ratio_derivs(Exponent(1), mpq_class(1, 2), 0, 0);
    CHECK(relative_error(h->at(0, 0).to_float(), sqrt(Float::pi()) / Float(2)) < tol("1e-50"));
    const auto qk = reciprocal_ratio_derivs(Exponent(3), mpq_class(1), 2, 0);
    CHECK(qk->at(0, 0) == Scalar(3));
    CHECK(qk->at(1, 0) == Scalar(1));
    CHECK(qk->at(2, 0) == Scalar(0));
    const auto qh = reciprocal_ratio_derivs(Exponent(1), mpq_class(1, 2), 0, 0);
    CHECK(relative_error(qh->at(0, 0).to_float(), Float(2) / sqrt(Float::pi())) < tol("1e-50"));
    CHECK_THROWS_AS(gamma_ratio_derivs(Exponent(1, 3), mpq_class(1, 2), 1, 0), Error);
  }

  TEST_CASE("kernel tables against finite differences") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<long> kn(0, 40), an(1, 30);
    for (int i = 0; i < 12; ++i) {
      mpq_class alpha(an(rng), 12), kq(kn(rng), 6);
      alpha.canonicalize();
      kq.canonicalize();
      const Exponent k = Exponent::from_rational(alpha + kq);
      const auto r = gamma_ratio_derivs(k, alpha, 2, 2);
      const auto qq = reciprocal_ratio_derivs(k, alpha, 2, 2);
      Float d10, d01, d11, d20, base;
      {
        PrecisionScope hi({150, 12});
        const Float t(k.rational()), a(alpha), h = pow10(-40);
        base = ratio_direct(t, a);
        d10 = (ratio_direct(t + h, a) - ratio_direct(t - h, a)) / (Float(2) * h);
        d01 = (ratio_direct(t, a + h) - ratio_direct(t, a - h)) / (Float(2) * h);
        d11 = (ratio_direct(t + h, a + h) - ratio_direct(t + h, a - h) - ratio_direct(t - h, a + h) + ratio_direct(t - h, a - h)) /
              (Float(4) * h * h);
        d20 = (ratio_direct(t + h, a) - Float(2) * base + ratio_direct(t - h, a)) / (h * h);
      }
      CHECK(relative_error(r->at(0, 0).to_float(), Float(base)) < tol("1e-45"));
      CHECK(relative_error(r->at(1, 0).to_float(), Float(d10)) < tol("1e-25"));
      CHECK(relative_error(r->at(0, 1).to_float(), Float(d01)) < tol("1e-25"));
      CHECK(relative_error(r->at(1, 1).to_float(), Float(d11)) < tol("1e-25"));
      CHECK(relative_error(r->at(2, 0).to_float(), Float(d20)) < tol("1e-25"));
      CHECK(abs((r->at(0, 0) * qq->at(0, 0)).to_float() - Float(1)) < tol("1e-45"));
    }
  }

  TEST_CASE("kernel consistency R * Q = 1") {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<long> kn(0, 60), an(1, 40);
    for (int i = 0; i < 50; ++i) {
      mpq_class alpha(an(rng), 10), kq(kn(rng), 7);
      alpha.canonicalize();
      kq.canonicalize();
      const Exponent k = Exponent::from_rational(alpha + kq);
      const Scalar prod = gamma_ratio_derivs(k, alpha, 0, 0)->at(0, 0) * reciprocal_ratio_derivs(k, alpha, 0, 0)->at(0, 0);
      CHECK(abs(prod.to_float() - Float(1)) < tol("1e-50"));
    }
  }

  TEST_CASE("beta") {
    const auto b = beta_derivs(Exponent(3), mpq_class(1, 2), 1);
    CHECK(b[0] == Scalar::ratio(32, 35));
    const Float via_gamma = gamma(Float(4)) * gamma(Float(mpq_class(1, 2))) / gamma(Float(mpq_class(9, 2)));
    CHECK(relative_error(b[0].to_float(), via_gamma) < tol("1e-50"));
    CHECK(beta_derivs(Exponent(0), mpq_class(1, 2), 0)[0] == Scalar(2));
    const auto b1 = beta_derivs(Exponent(1), mpq_class(1, 2), 1);
    Float fd;
    {
      PrecisionScope hi({150, 12});
      const Float h = pow10(-40), a(2), m(mpq_class(1, 2));
      fd = (beta(a + h, m) - beta(a - h, m)) / (Float(2) * h);
    }
    CHECK(relative_error(b1[1].to_float(), Float(fd)) < tol("1e-25"));
    CHECK_THROWS_AS(beta_derivs(Exponent(1), mpq_class(1), 0), Error);
    CHECK_THROWS_AS(beta_derivs(Exponent(-1), mpq_class(1, 2), 0), Error);
  }

  TEST_CASE("kernel cache is shared across threads") {
    clear_kernel_cache();
    std::vector<std::thread> workers;
    std::vector<Scalar> got(8);
    for (int i = 0; i < 8; ++i)
      workers.emplace_back([&, i] { got[i] = gamma_ratio_derivs(Exponent(5, 2), mpq_class(1, 3), 3, 2)->at(3, 2); });
    for (auto& w : workers) w.join();
    for (const auto& g : got) CHECK(g.identical(got[0]));
    CHECK(kernel_cache_size() == 1);
  }
}
