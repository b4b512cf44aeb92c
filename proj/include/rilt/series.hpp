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

#ifndef RILT_SERIES_HPP
#define RILT_SERIES_HPP

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rilt/exponent.hpp"
#include "rilt/param_scalar.hpp"
#include "rilt/scalar.hpp"

namespace rilt {

struct TermKey {
  Exponent power;
  unsigned logpow = 0;
  friend bool operator==(const TermKey&, const TermKey&) = default;
  friend std::strong_ordering operator<=>(const TermKey& a, const TermKey& b) {
    if (auto c = a.power <=> b.power; c != 0) return c;
    return a.logpow <=> b.logpow;
  }
};

struct Truncation {
  Exponent power_cap{0};
  unsigned log_cap = 0;
  friend bool operator==(const Truncation&, const Truncation&) = default;
};

using Bindings = std::vector<std::optional<Scalar>>;

/// Truncated sum of c * x^p * ln(x)^l with nonnegative rational p.
class Series {
 public:
  using TermMap = std::map<TermKey, ParamScalar>;

  Series() : space_(ParamSpace::empty()) {}
  Series(std::shared_ptr<const ParamSpace> space, Truncation trunc, std::int64_t lattice = 1);

  static Series constant(std::shared_ptr<const ParamSpace> space, Truncation trunc, const ParamScalar& c);
  static Series monomial(std::shared_ptr<const ParamSpace> space, Truncation trunc, const Exponent& p, unsigned l,
                         const ParamScalar& c);
  /// Series of the same shape with no terms.
  Series zero_like() const { return Series(space_, trunc_, lattice_); }
  Series constant_like(const ParamScalar& c) const;
  Series monomial_like(const Exponent& p, unsigned l, const ParamScalar& c) const;

  const std::shared_ptr<const ParamSpace>& space() const { return space_; }
  const Truncation& truncation() const { return trunc_; }
  std::int64_t lattice() const { return lattice_; }
  const TermMap& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  ParamScalar coeff(const Exponent& p, unsigned l = 0) const;
  /// Accumulates a term, applying truncation. Negative powers and log-cap
  /// overflow are errors.
  void add_term(const TermKey& key, const ParamScalar& c);
  void extend_lattice(std::int64_t q);
  Series with_truncation(const Truncation& t) const;

  bool is_polynomial() const;
  bool has_logs() const;
  bool is_exact() const;
  /// Smallest power plus parameter weight over all stored monomials.
  std::optional<Exponent> weighted_valuation() const;
  Scalar max_abs_coeff() const;
  /// Largest |coefficient| among terms with power <= cap.
  Scalar max_abs_coeff(const Exponent& cap) const;

  std::string str() const;
  friend bool operator==(const Series& a, const Series& b);
  bool identical(const Series& o) const;

 private:
  std::shared_ptr<const ParamSpace> space_;
  Truncation trunc_{};
  std::int64_t lattice_ = 1;
  TermMap terms_;
};

enum class SeriesFunction { sin, cos, exp, ln1p };

Series add(const Series& a, const Series& b);
Series sub(const Series& a, const Series& b);
Series neg(const Series& a);
Series scale(const Series& a, const ParamScalar& s);
Series mul(const Series& a, const Series& b);
Series ipow(const Series& a, unsigned p);
/// Multiplies by x^e; resulting negative powers are errors.
Series shift(const Series& a, const Exponent& e);
Series substitute_affine(const Series& a, const Scalar& lambda, const Scalar& b);
Series compose(const Series& outer, const Series& inner);
Series diff(const Series& a);
Series antideriv(const Series& a);
Scalar eval(const Series& a, const Scalar& x, const Bindings& bindings = {});
Scalar eval(const Series& a, const Scalar& x, const std::map<std::string, Scalar>& bindings);
/// Evaluates coefficients at the bindings but keeps free parameters; x = 1
/// and polynomial series stay exact.
ParamScalar eval_partial(const Series& a, const Scalar& x, const Bindings& bindings = {});
Series expand_function(SeriesFunction fn, const Series& arg);
Series expand_variable_exponent(const Series& beta, int sign);
/// Replaces parameter `index` by the series `value`.
Series substitute_param(const Series& a, std::size_t index, const Series& value);
Series bind_params(const Series& a, const Bindings& bindings);
/// Integer powers without logarithms only.
Series polynomial_part(const Series& a);
Series floated(const Series& a);
/// The series ln(x) on the given shape.
Series log_x(const Series& shape);

std::string serialize(const Series& a);
Series parse_series(std::string_view text);
/// Parses with a caller-supplied parameter space (must match the text's names).
Series parse_series(std::string_view text, std::shared_ptr<const ParamSpace> space);

}  // namespace rilt

#endif  // RILT_SERIES_HPP
