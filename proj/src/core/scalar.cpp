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

#include "rilt/scalar.hpp"

#include <cctype>
#include <cmath>
#include <vector>

#include "rilt/error.hpp"

namespace rilt {

namespace {

thread_local PrecisionConfig g_precision{};

mpfr_prec_t digits_to_bits(unsigned digits) {
  return static_cast<mpfr_prec_t>(std::ceil(digits * 3.321928094887362)) + 8;
}

}  // namespace

PrecisionConfig current_precision() { return g_precision; }

mpfr_prec_t working_bits() { return digits_to_bits(g_precision.digits + g_precision.guard); }

PrecisionScope::PrecisionScope(PrecisionConfig cfg) : saved_(g_precision) {
  if (cfg.digits < 10) throw Error(ErrorCode::usage, "precision must be at least 10 digits");
  g_precision = cfg;
}

PrecisionScope::~PrecisionScope() { g_precision = saved_; }

// ---------------------------------------------------------------------------
// Float

Float::Float() {
  mpfr_init2(value_, working_bits());
  mpfr_set_zero(value_, 1);
}

Float::Float(long v) {
  mpfr_init2(value_, working_bits());
  mpfr_set_si(value_, v, MPFR_RNDN);
}

Float::Float(const mpq_class& q) {
  mpfr_init2(value_, working_bits());
  mpfr_set_q(value_, q.get_mpq_t(), MPFR_RNDN);
}

Float::Float(const Float& o) {
  mpfr_init2(value_, mpfr_get_prec(o.value_));
  mpfr_set(value_, o.value_, MPFR_RNDN);
}

Float::Float(Float&& o) noexcept {
  mpfr_init2(value_, MPFR_PREC_MIN);
  mpfr_swap(value_, o.value_);
}

Float& Float::operator=(const Float& o) {
  if (this != &o) {
    mpfr_set_prec(value_, mpfr_get_prec(o.value_));
    mpfr_set(value_, o.value_, MPFR_RNDN);
  }
  return *this;
}

Float& Float::operator=(Float&& o) noexcept {
  mpfr_swap(value_, o.value_);
  return *this;
}

Float::~Float() { mpfr_clear(value_); }

Float Float::parse(std::string_view text) {
  Float r;
  std::string s(text);
  char* end = nullptr;
  if (mpfr_strtofr(r.value_, s.c_str(), &end, 10, MPFR_RNDN), end == s.c_str() || *end != '\0')
    throw Error(ErrorCode::parse, "malformed number '" + s + "'");
  return r;
}

Float Float::pi() {
  Float r;
  mpfr_const_pi(r.value_, MPFR_RNDN);
  return r;
}

Float Float::euler_gamma() {
  Float r;
  mpfr_const_euler(r.value_, MPFR_RNDN);
  return r;
}

std::string Float::str(unsigned digits) const {
  if (digits == 0) digits = static_cast<unsigned>(mpfr_get_str_ndigits(10, mpfr_get_prec(value_)));
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Re", static_cast<int>(digits - 1), value_);
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}

namespace {

template <class Op>
Float binary(const Float& a, const Float& b, Op op) {
  Float r;
  op(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}

template <class Op>
Float unary(const Float& a, Op op) {
  Float r;
  op(r.get(), a.get(), MPFR_RNDN);
  return r;
}

}  // namespace

Float& Float::operator+=(const Float& o) { return *this = binary(*this, o, mpfr_add); }
Float& Float::operator-=(const Float& o) { return *this = binary(*this, o, mpfr_sub); }
Float& Float::operator*=(const Float& o) { return *this = binary(*this, o, mpfr_mul); }
Float& Float::operator/=(const Float& o) {
  if (o.is_zero()) throw domain_error("division by zero");
  return *this = binary(*this, o, mpfr_div);
}
Float Float::operator-() const { return unary(*this, mpfr_neg); }

std::partial_ordering operator<=>(const Float& a, const Float& b) {
  if (mpfr_unordered_p(a.value_, b.value_)) return std::partial_ordering::unordered;
  const int c = mpfr_cmp(a.value_, b.value_);
  return c < 0 ? std::partial_ordering::less : c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent;
}

Float abs(const Float& x) { return unary(x, mpfr_abs); }
Float sqrt(const Float& x) {
  if (x.sign() < 0) throw domain_error("sqrt of a negative number");
  return unary(x, mpfr_sqrt);
}
Float exp(const Float& x) { return unary(x, mpfr_exp); }
Float log(const Float& x) {
  if (x.sign() <= 0) throw domain_error("log of a non-positive number");
  return unary(x, mpfr_log);
}
Float pow(const Float& x, const Float& y) { return binary(x, y, mpfr_pow); }
Float pow(const Float& x, long n) {
  Float r;
  mpfr_pow_si(r.get(), x.get(), n, MPFR_RNDN);
  return r;
}
Float sin(const Float& x) { return unary(x, mpfr_sin); }
Float cos(const Float& x) { return unary(x, mpfr_cos); }
Float tan(const Float& x) { return unary(x, mpfr_tan); }
Float tanh(const Float& x) { return unary(x, mpfr_tanh); }
Float atan(const Float& x) { return unary(x, mpfr_atan); }
Float sinh(const Float& x) { return unary(x, mpfr_sinh); }
Float cosh(const Float& x) { return unary(x, mpfr_cosh); }
Float ceil(const Float& x) {
  Float r;
  mpfr_ceil(r.get(), x.get());
  return r;
}
Float ldexp(const Float& x, long e) {
  Float r;
  mpfr_mul_2si(r.get(), x.get(), e, MPFR_RNDN);
  return r;
}
Float pow10(long e) {
  Float r;
  mpfr_ui_pow_ui(r.get(), 10, static_cast<unsigned long>(e < 0 ? -e : e), MPFR_RNDN);
  if (e < 0) r = Float(1) / r;
  return r;
}

// ---------------------------------------------------------------------------
// Scalar

Scalar::Scalar(mpq_class q) : v_(std::move(q)) { std::get<mpq_class>(v_).canonicalize(); }

Scalar Scalar::ratio(long num, long den) {
  if (den == 0) throw domain_error("zero denominator");
  mpq_class q(num, den);
  q.canonicalize();
  return Scalar(std::move(q));
}

namespace {

// Decimal literal -> exact rational. Returns false when text is malformed.
bool parse_decimal(std::string_view s, mpq_class& out) {
  std::size_t i = 0;
  bool neg = false;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = s[i++] == '-';
  std::string digits;
  long frac = 0;
  bool seen_digit = false, seen_dot = false;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits += c;
      seen_digit = true;
      if (seen_dot) ++frac;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      break;
    }
  }
  if (!seen_digit) return false;
  long exponent = 0;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) eneg = s[i++] == '-';
    if (i >= s.size()) return false;
    for (; i < s.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
      exponent = exponent * 10 + (s[i] - '0');
      if (exponent > 100000) return false;
    }
    if (eneg) exponent = -exponent;
  }
  if (i != s.size()) return false;
  mpz_class num(digits, 10);
  const long e10 = exponent - frac;
  mpz_class p10;
  mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(e10 < 0 ? -e10 : e10));
  out = e10 < 0 ? mpq_class(num, p10) : mpq_class(num * p10);
  out.canonicalize();
  if (neg) out = -out;
  return true;
}

}  // namespace

Scalar Scalar::parse_exact(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  const auto slash = text.find('/');
  mpq_class q;
  if (slash != std::string_view::npos) {
    mpq_class n, d;
    if (!parse_decimal(text.substr(0, slash), n) || !parse_decimal(text.substr(slash + 1), d))
      throw Error(ErrorCode::parse, "malformed rational '" + std::string(text) + "'");
    if (d == 0) throw Error(ErrorCode::parse, "zero denominator in '" + std::string(text) + "'");
    q = n / d;
  } else if (!parse_decimal(text, q)) {
    throw Error(ErrorCode::parse, "malformed number '" + std::string(text) + "'");
  }
  return Scalar(q);
}

Scalar Scalar::parse_series_coefficient(std::string_view text) {
  if (text.find_first_of(".eE") != std::string_view::npos && text.find('/') == std::string_view::npos)
    return Scalar(Float::parse(text));
  return parse_exact(text);
}

bool Scalar::is_zero() const {
  return is_exact() ? sgn(std::get<mpq_class>(v_)) == 0 : std::get<Float>(v_).is_zero();
}

int Scalar::sign() const { return is_exact() ? sgn(std::get<mpq_class>(v_)) : std::get<Float>(v_).sign(); }

bool Scalar::is_integer() const { return is_exact() && std::get<mpq_class>(v_).get_den() == 1; }

const mpq_class& Scalar::rational() const {
  if (!is_exact()) throw domain_error("value is not an exact rational");
  return std::get<mpq_class>(v_);
}

Float Scalar::to_float() const { return is_exact() ? Float(std::get<mpq_class>(v_)) : std::get<Float>(v_); }

Scalar Scalar::abs() const {
  if (is_exact()) return Scalar(mpq_class(::abs(std::get<mpq_class>(v_))));
  return Scalar(rilt::abs(std::get<Float>(v_)));
}

std::string Scalar::str() const { return str(current_precision().digits); }

std::string Scalar::str(unsigned digits) const {
  if (is_exact()) return std::get<mpq_class>(v_).get_str();
  return std::get<Float>(v_).str(digits);
}

Scalar& Scalar::operator+=(const Scalar& o) {
  if (is_exact() && o.is_exact())
    std::get<mpq_class>(v_) += std::get<mpq_class>(o.v_);
  else
    v_ = to_float() + o.to_float();
  return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) {
  if (is_exact() && o.is_exact())
    std::get<mpq_class>(v_) -= std::get<mpq_class>(o.v_);
  else
    v_ = to_float() - o.to_float();
  return *this;
}

Scalar& Scalar::operator*=(const Scalar& o) {
  // An exact zero annihilates floats too, which keeps pruning exact.
  if (is_exact() && o.is_exact())
    std::get<mpq_class>(v_) *= std::get<mpq_class>(o.v_);
  else if ((is_exact() && is_zero()) || (o.is_exact() && o.is_zero()))
    v_ = mpq_class(0);
  else
    v_ = to_float() * o.to_float();
  return *this;
}

Scalar& Scalar::operator/=(const Scalar& o) {
  if (o.is_zero()) throw domain_error("division by zero");
  if (is_exact() && o.is_exact())
    std::get<mpq_class>(v_) /= std::get<mpq_class>(o.v_);
  else if (is_exact() && is_zero())
    v_ = mpq_class(0);
  else
    v_ = to_float() / o.to_float();
  return *this;
}

Scalar Scalar::operator-() const {
  if (is_exact()) return Scalar(mpq_class(-std::get<mpq_class>(v_)));
  return Scalar(-std::get<Float>(v_));
}

bool operator==(const Scalar& a, const Scalar& b) { return (a <=> b) == std::partial_ordering::equivalent; }

std::partial_ordering operator<=>(const Scalar& a, const Scalar& b) {
  if (a.is_exact() && b.is_exact()) {
    const int c = cmp(std::get<mpq_class>(a.v_), std::get<mpq_class>(b.v_));
    return c < 0 ? std::partial_ordering::less : c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent;
  }
  if (a.is_exact()) {
    const int c = -mpfr_cmp_q(std::get<Float>(b.v_).get(), std::get<mpq_class>(a.v_).get_mpq_t());
    return c < 0 ? std::partial_ordering::less : c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent;
  }
  if (b.is_exact()) {
    const int c = mpfr_cmp_q(std::get<Float>(a.v_).get(), std::get<mpq_class>(b.v_).get_mpq_t());
    return c < 0 ? std::partial_ordering::less : c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent;
  }
  return std::get<Float>(a.v_) <=> std::get<Float>(b.v_);
}

bool Scalar::identical(const Scalar& o) const {
  if (is_exact() != o.is_exact()) return false;
  if (is_exact()) return std::get<mpq_class>(v_) == std::get<mpq_class>(o.v_);
  return std::get<Float>(v_) == std::get<Float>(o.v_);
}

Scalar pow(const Scalar& x, long n) {
  if (n < 0) return Scalar(1) / pow(x, -n);
  if (x.is_exact()) {
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), x.rational().get_num_mpz_t(), static_cast<unsigned long>(n));
    mpz_pow_ui(den.get_mpz_t(), x.rational().get_den_mpz_t(), static_cast<unsigned long>(n));
    return Scalar(mpq_class(num, den));
  }
  return Scalar(pow(x.to_float(), n));
}

Scalar factorial(unsigned n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return Scalar(mpq_class(f));
}

Scalar binomial(unsigned n, unsigned k) {
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), n, k);
  return Scalar(mpq_class(b));
}

}  // namespace rilt
