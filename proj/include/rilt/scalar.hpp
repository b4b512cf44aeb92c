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

#ifndef RILT_SCALAR_HPP
#define RILT_SCALAR_HPP

#include <compare>
#include <string>
#include <string_view>
#include <variant>

#include <gmpxx.h>
#include <mpfr.h>

namespace rilt {

/// User-facing decimal digits P plus internal guard digits.
struct PrecisionConfig {
  unsigned digits = 50;
  unsigned guard = 12;
};

/// Working precision is thread-local so independent solves can run concurrently.
PrecisionConfig current_precision();
mpfr_prec_t working_bits();

class PrecisionScope {
 public:
  explicit PrecisionScope(PrecisionConfig cfg);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  PrecisionConfig saved_;
};

/// MPFR value. New results are rounded to the thread's working precision.
class Float {
 public:
  Float();
  Float(long v);  // NOLINT(google-explicit-constructor)
  explicit Float(const mpq_class& q);
  Float(const Float& o);
  Float(Float&& o) noexcept;
  Float& operator=(const Float& o);
  Float& operator=(Float&& o) noexcept;
  ~Float();

  static Float parse(std::string_view text);
  static Float pi();
  static Float euler_gamma();

  mpfr_srcptr get() const { return value_; }
  mpfr_ptr get() { return value_; }

  bool is_zero() const { return mpfr_zero_p(value_) != 0; }
  bool is_finite() const { return mpfr_number_p(value_) != 0; }
  int sign() const { return mpfr_sgn(value_); }
  double to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }
  /// Scientific notation with `digits` significant digits; 0 prints enough
  /// digits to read the value back exactly.
  std::string str(unsigned digits) const;

  Float& operator+=(const Float& o);
  Float& operator-=(const Float& o);
  Float& operator*=(const Float& o);
  Float& operator/=(const Float& o);
  Float operator-() const;

  friend Float operator+(Float a, const Float& b) { return a += b; }
  friend Float operator-(Float a, const Float& b) { return a -= b; }
  friend Float operator*(Float a, const Float& b) { return a *= b; }
  friend Float operator/(Float a, const Float& b) { return a /= b; }
  friend bool operator==(const Float& a, const Float& b) { return mpfr_equal_p(a.value_, b.value_) != 0; }
  friend std::partial_ordering operator<=>(const Float& a, const Float& b);

 private:
  mpfr_t value_;
};

Float abs(const Float& x);
Float sqrt(const Float& x);
Float exp(const Float& x);
Float log(const Float& x);
Float pow(const Float& x, const Float& y);
Float pow(const Float& x, long n);
Float sin(const Float& x);
Float cos(const Float& x);
Float tan(const Float& x);
Float tanh(const Float& x);
Float atan(const Float& x);
Float sinh(const Float& x);
Float cosh(const Float& x);
Float ceil(const Float& x);
Float ldexp(const Float& x, long e);
/// 10^e at working precision.
Float pow10(long e);

/// Exact rational or working-precision float. Arithmetic stays exact until a
/// float operand appears.
class Scalar {
 public:
  Scalar() : v_(mpq_class(0)) {}
  Scalar(long v) : v_(mpq_class(v)) {}  // NOLINT(google-explicit-constructor)
  Scalar(int v) : v_(mpq_class(v)) {}   // NOLINT(google-explicit-constructor)
  Scalar(mpq_class q);                  // NOLINT(google-explicit-constructor)
  Scalar(Float f) : v_(std::move(f)) {}  // NOLINT(google-explicit-constructor)

  static Scalar ratio(long num, long den);
  /// Exact parse of an integer, `p/q`, or a decimal literal with optional exponent.
  static Scalar parse_exact(std::string_view text);
  /// Like parse_exact, but text containing '.', 'e' or 'E' becomes a Float.
  static Scalar parse_series_coefficient(std::string_view text);

  bool is_exact() const { return std::holds_alternative<mpq_class>(v_); }
  bool is_zero() const;
  int sign() const;
  bool is_integer() const;
  const mpq_class& rational() const;
  Float to_float() const;
  Scalar floated() const { return Scalar(to_float()); }
  Scalar abs() const;

  /// Rationals print as `p` or `p/q`; floats in scientific notation at the
  /// user-facing precision.
  std::string str() const;
  std::string str(unsigned digits) const;

  Scalar& operator+=(const Scalar& o);
  Scalar& operator-=(const Scalar& o);
  Scalar& operator*=(const Scalar& o);
  Scalar& operator/=(const Scalar& o);
  Scalar operator-() const;

  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }

  /// Numerical comparison; an exact 1/3 and a float 0.333... are unequal.
  friend bool operator==(const Scalar& a, const Scalar& b);
  friend std::partial_ordering operator<=>(const Scalar& a, const Scalar& b);

  /// Structural identity: same representation kind and same value.
  bool identical(const Scalar& o) const;

 private:
  std::variant<mpq_class, Float> v_;
};

Scalar pow(const Scalar& x, long n);
Scalar factorial(unsigned n);
Scalar binomial(unsigned n, unsigned k);

}  // namespace rilt

#endif  // RILT_SCALAR_HPP
