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

#include "rilt/special.hpp"

#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <tuple>

#include "rilt/error.hpp"

namespace rilt {

namespace {

void require_positive(const Float& t, const char* fn) {
  if (!t.is_finite() || t.sign() <= 0) throw domain_error(std::string(fn) + " requires a positive argument");
}

Float epsilon() { return ldexp(Float(1), -static_cast<long>(working_bits())); }

}  // namespace

Float gamma(const Float& t) {
  require_positive(t, "gamma");
  Float r;
  mpfr_gamma(r.get(), t.get(), MPFR_RNDN);
  return r;
}

Scalar gamma(const Scalar& t) {
  if (t.is_integer() && t.sign() > 0) {
    const mpz_class& n = t.rational().get_num();
    if (n.fits_ulong_p() && n.get_ui() <= 10000) return factorial(static_cast<unsigned>(n.get_ui() - 1));
  }
  return Scalar(gamma(t.to_float()));
}

Float lngamma(const Float& t) {
  require_positive(t, "lngamma");
  Float r;
  mpfr_lngamma(r.get(), t.get(), MPFR_RNDN);
  return r;
}

Float digamma(const Float& t) {
  require_positive(t, "digamma");
  Float r;
  mpfr_digamma(r.get(), t.get(), MPFR_RNDN);
  return r;
}

const mpq_class& bernoulli(unsigned n) {
  static std::mutex mu;
  static std::vector<mpq_class> table{mpq_class(1)};
  std::lock_guard lock(mu);
  while (table.size() <= n) {
    const unsigned m = static_cast<unsigned>(table.size());
    mpq_class s(0);
    mpz_class c(1);  // C(m+1, j)
    for (unsigned j = 0; j < m; ++j) {
      s += c * table[j];
      c = c * (m + 1 - j) / (j + 1);
    }
    mpq_class b = -s / (m + 1);
    b.canonicalize();
    table.push_back(b);
  }
  return table[n];
}

Float hurwitz_zeta(unsigned s, const Float& t) {
  if (s < 2) throw domain_error("hurwitz_zeta requires s >= 2");
  require_positive(t, "hurwitz_zeta");
  const long digits = static_cast<long>(static_cast<double>(working_bits()) * 0.30103) + 1;
  const Float target(std::max<long>(digits + static_cast<long>(s), 20));
  Float a = t;
  Float sum;
  const long ns = static_cast<long>(s);
  while (a < target) {
    sum += pow(a, -ns);
    a += Float(1);
  }
  // Euler-Maclaurin tail at a.
  sum += pow(a, 1 - ns) / Float(ns - 1) + pow(a, -ns) / Float(2);
  const Float inv_a2 = Float(1) / (a * a);
  Float apow = pow(a, -ns - 1);
  Float rising(ns);
  Float fact(2);
  const Float eps = epsilon();
  for (unsigned k = 1; k < 4 * static_cast<unsigned>(digits) + 100; ++k) {
    const Float term = Float(bernoulli(2 * k)) / fact * rising * apow;
    sum += term;
    if (abs(term) <= eps * abs(sum)) return sum;
    rising *= Float(ns + 2 * static_cast<long>(k) - 1) * Float(ns + 2 * static_cast<long>(k));
    fact *= Float(2 * static_cast<long>(k) + 1) * Float(2 * static_cast<long>(k) + 2);
    apow *= inv_a2;
  }
  throw Error(ErrorCode::internal, "hurwitz_zeta did not converge");
}

Float polygamma(unsigned n, const Float& t) {
  if (n == 0) return digamma(t);
  require_positive(t, "polygamma");
  Float f = factorial(n).to_float() * hurwitz_zeta(n + 1, t);
  return n % 2 ? f : -f;
}

Float beta(const Float& a, const Float& b) {
  require_positive(a, "beta");
  require_positive(b, "beta");
  return exp(lngamma(a) + lngamma(b) - lngamma(a + b));
}

Float expint_ei(const Float& z) {
  if (z.is_zero()) throw domain_error("Ei(0) is undefined");
  Float r;
  mpfr_eint(r.get(), z.get(), MPFR_RNDN);
  if (!r.is_finite()) throw domain_error("Ei argument out of range");
  return r;
}

// ---------------------------------------------------------------------------
// Kernel tables

namespace {

enum class KernelKind { ratio, reciprocal, beta };

using CacheKey = std::tuple<int, std::int64_t, std::int64_t, std::string, unsigned, unsigned, long>;

struct KernelCache {
  std::shared_mutex mu;
  std::map<CacheKey, std::shared_ptr<const KernelDerivs>> entries;
};

KernelCache& cache() {
  static KernelCache c;
  return c;
}

// Bivariate exp recursion: given Taylor coefficients l of L (l[0][0] unused)
// and r00 = exp(L00), returns Taylor coefficients of exp(L).
std::vector<std::vector<Scalar>> exp_recursion(const std::vector<std::vector<Scalar>>& l, const Scalar& r00, unsigned max_t,
                                               unsigned max_a) {
  std::vector<std::vector<Scalar>> r(max_t + 1, std::vector<Scalar>(max_a + 1));
  r[0][0] = r00;
  for (unsigned b = 1; b <= max_a; ++b) {
    Scalar s(0);
    for (unsigned j = 1; j <= b; ++j) s += Scalar(static_cast<long>(j)) * l[0][j] * r[0][b - j];
    r[0][b] = s / Scalar(static_cast<long>(b));
  }
  for (unsigned a = 1; a <= max_t; ++a) {
    for (unsigned b = 0; b <= max_a; ++b) {
      Scalar s(0);
      for (unsigned i = 1; i <= a; ++i)
        for (unsigned j = 0; j <= b; ++j) s += Scalar(static_cast<long>(i)) * l[i][j] * r[a - i][b - j];
      r[a][b] = s / Scalar(static_cast<long>(a));
    }
  }
  return r;
}

std::shared_ptr<const KernelDerivs> compute_ratio(const Exponent& k, const mpq_class& alpha0, unsigned max_t, unsigned max_a,
                                                  bool reciprocal) {
  const mpq_class kq = k.rational();
  if (kq < alpha0) throw domain_error("kernel gate violated: k = " + k.str() + " < alpha0 = " + alpha0.get_str());
  const int sign = reciprocal ? -1 : 1;
  const bool integer_order = alpha0.get_den() == 1 && alpha0 >= 0;
  const long n = integer_order ? alpha0.get_num().get_si() : 0;

  // Derivatives of L = lnGamma(t - alpha + 1) - lnGamma(t + 1).
  std::vector<Float> psi_shift;  // psi^(m)(k - alpha0 + 1)
  std::vector<Float> psi_top;    // psi^(m)(k + 1)
  const bool need_float = !integer_order || max_a > 0;
  if (need_float) {
    const Float s1(mpq_class(kq - alpha0 + 1));
    const Float s2(mpq_class(kq + 1));
    for (unsigned m = 0; m + 1 <= max_t + max_a; ++m) psi_shift.push_back(polygamma(m, s1));
    if (!integer_order)
      for (unsigned m = 0; m + 1 <= max_t; ++m) psi_top.push_back(polygamma(m, s2));
  }

  std::vector<std::vector<Scalar>> l(max_t + 1, std::vector<Scalar>(max_a + 1));
  Scalar fa(1);
  for (unsigned a = 0; a <= max_t; ++a) {
    if (a > 0) fa *= Scalar(static_cast<long>(a));
    Scalar fb(1);
    for (unsigned b = 0; b <= max_a; ++b) {
      if (b > 0) fb *= Scalar(static_cast<long>(b));
      if (a + b == 0) continue;
      Scalar v;
      if (b == 0 && integer_order) {
        // -sum_i (-1)^(a-1) (a-1)! / (k - i)^a
        Scalar s(0);
        for (long i = 0; i < n; ++i) s += Scalar(mpq_class(1)) / pow(Scalar(mpq_class(kq - i)), static_cast<long>(a));
        v = -(s * factorial(a - 1) * Scalar((a - 1) % 2 ? -1 : 1));
      } else {
        Float f = psi_shift[a + b - 1];
        if (b % 2) f = -f;
        if (b == 0) f -= psi_top[a - 1];
        v = Scalar(f);
      }
      l[a][b] = (sign > 0 ? v : -v) / (fa * fb);
    }
  }

  Scalar r00;
  if (integer_order) {
    mpq_class prod(1);
    for (long i = 0; i < n; ++i) prod *= kq - i;
    r00 = Scalar(mpq_class(1 / prod));
  } else {
    r00 = Scalar(gamma(Float(mpq_class(kq - alpha0 + 1))) / gamma(Float(mpq_class(kq + 1))));
  }
  if (reciprocal) r00 = Scalar(1) / r00;

  auto out = std::make_shared<KernelDerivs>();
  out->k = k;
  out->alpha0 = alpha0;
  out->max_t = max_t;
  out->max_a = max_a;
  out->table = exp_recursion(l, r00, max_t, max_a);
  Scalar fa2(1);
  for (unsigned a = 0; a <= max_t; ++a) {
    if (a > 0) fa2 *= Scalar(static_cast<long>(a));
    Scalar fb(1);
    for (unsigned b = 0; b <= max_a; ++b) {
      if (b > 0) fb *= Scalar(static_cast<long>(b));
      out->table[a][b] *= fa2 * fb;
    }
  }
  return out;
}

std::shared_ptr<const KernelDerivs> compute_beta(const Exponent& a, const mpq_class& mu, unsigned max_d) {
  const mpq_class aq = a.rational();
  if (aq <= -1) throw domain_error("beta_derivs requires a > -1");
  if (mu <= 0 || mu >= 1) throw domain_error("beta_derivs requires 0 < mu < 1");
  Scalar b0;
  if (aq.get_den() == 1 && aq >= 0) {
    const long n = aq.get_num().get_si();
    mpq_class prod(1);
    for (long i = 0; i <= n; ++i) prod *= mpq_class(i + 1) - mu;
    b0 = factorial(static_cast<unsigned>(n)) / Scalar(prod);
  } else {
    b0 = Scalar(beta(Float(mpq_class(aq + 1)), Float(mpq_class(1 - mu))));
  }
  std::vector<std::vector<Scalar>> l(max_d + 1, std::vector<Scalar>(1));
  if (max_d > 0) {
    const Float s1(mpq_class(aq + 1));
    const Float s2(mpq_class(aq + 2 - mu));
    Scalar fj(1);
    for (unsigned j = 1; j <= max_d; ++j) {
      fj *= Scalar(static_cast<long>(j));
      l[j][0] = Scalar(polygamma(j - 1, s1) - polygamma(j - 1, s2)) / fj;
    }
  }
  auto out = std::make_shared<KernelDerivs>();
  out->k = a;
  out->alpha0 = mu;
  out->max_t = max_d;
  out->table = exp_recursion(l, b0, max_d, 0);
  Scalar fj(1);
  for (unsigned j = 1; j <= max_d; ++j) {
    fj *= Scalar(static_cast<long>(j));
    out->table[j][0] *= fj;
  }
  return out;
}

std::shared_ptr<const KernelDerivs> memoized(KernelKind kind, const Exponent& k, const mpq_class& alpha, unsigned max_t,
                                             unsigned max_a) {
  const CacheKey key{static_cast<int>(kind), k.num(), k.den(), alpha.get_str(), max_t, max_a, static_cast<long>(working_bits())};
  auto& c = cache();
  {
    std::shared_lock lock(c.mu);
    auto it = c.entries.find(key);
    if (it != c.entries.end()) return it->second;
  }
  std::shared_ptr<const KernelDerivs> value;
  switch (kind) {
    case KernelKind::ratio: value = compute_ratio(k, alpha, max_t, max_a, false); break;
    case KernelKind::reciprocal: value = compute_ratio(k, alpha, max_t, max_a, true); break;
    case KernelKind::beta: value = compute_beta(k, alpha, max_t); break;
  }
  std::unique_lock lock(c.mu);
  return c.entries.emplace(key, value).first->second;
}

}  // namespace

std::shared_ptr<const KernelDerivs> gamma_ratio_derivs(const Exponent& k, const mpq_class& alpha0, unsigned max_t,
                                                       unsigned max_a) {
  return memoized(KernelKind::ratio, k, alpha0, max_t, max_a);
}

std::shared_ptr<const KernelDerivs> reciprocal_ratio_derivs(const Exponent& k, const mpq_class& alpha0, unsigned max_t,
                                                            unsigned max_a) {
  return memoized(KernelKind::reciprocal, k, alpha0, max_t, max_a);
}

std::vector<Scalar> beta_derivs(const Exponent& a, const mpq_class& mu, unsigned max_d) {
  const auto t = memoized(KernelKind::beta, a, mu, max_d, 0);
  std::vector<Scalar> out;
  out.reserve(max_d + 1);
  for (unsigned j = 0; j <= max_d; ++j) out.push_back(t->table[j][0]);
  return out;
}

std::size_t kernel_cache_size() {
  std::shared_lock lock(cache().mu);
  return cache().entries.size();
}

void clear_kernel_cache() {
  std::unique_lock lock(cache().mu);
  cache().entries.clear();
}

}  // namespace rilt
