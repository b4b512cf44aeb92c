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

#ifndef RILT_PARAM_SCALAR_HPP
#define RILT_PARAM_SCALAR_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rilt/exponent.hpp"
#include "rilt/scalar.hpp"

namespace rilt {

inline constexpr std::size_t kMaxParams = 8;
inline constexpr unsigned kDefaultDegreeCap = 64;

using Monomial = std::array<std::uint8_t, kMaxParams>;

unsigned total_degree(const Monomial& m);

/// Canonical monomial order: total degree, then lexicographic on exponents
/// (earlier parameters first).
struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Declared parameter set of a problem. A nonzero weight makes a parameter
/// count toward the truncation order like a power of x.
struct ParamSpace {
  std::vector<std::string> names;
  std::vector<Exponent> weights;
  unsigned degree_cap = kDefaultDegreeCap;

  static std::shared_ptr<const ParamSpace> make(std::vector<std::string> names, std::vector<Exponent> weights = {},
                                                unsigned degree_cap = kDefaultDegreeCap);
  static const std::shared_ptr<const ParamSpace>& empty();

  std::size_t size() const { return names.size(); }
  std::optional<std::size_t> index_of(std::string_view name) const;
  Exponent weight_of(const Monomial& m) const;
  bool has_weights() const;
  bool compatible(const ParamSpace& o) const;
};

/// Polynomial in the declared parameters with Scalar coefficients.
class ParamScalar {
 public:
  using TermMap = std::map<Monomial, Scalar, MonomialLess>;

  ParamScalar() = default;
  ParamScalar(Scalar s);  // NOLINT(google-explicit-constructor)
  ParamScalar(long v) : ParamScalar(Scalar(v)) {}  // NOLINT(google-explicit-constructor)
  ParamScalar(int v) : ParamScalar(Scalar(v)) {}   // NOLINT(google-explicit-constructor)
  static ParamScalar variable(std::size_t index);
  static ParamScalar monomial(const Monomial& m, Scalar c);
  static ParamScalar parse(std::string_view text, const ParamSpace& space);

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  bool is_exact() const;
  /// Coefficient of the constant monomial.
  Scalar constant() const;
  unsigned degree(std::size_t index) const;
  unsigned total_degree() const;
  Scalar max_abs() const;

  ParamScalar& operator+=(const ParamScalar& o);
  ParamScalar& operator-=(const ParamScalar& o);
  ParamScalar& operator*=(const Scalar& s);
  ParamScalar operator-() const;
  friend ParamScalar operator+(ParamScalar a, const ParamScalar& b) { return a += b; }
  friend ParamScalar operator-(ParamScalar a, const ParamScalar& b) { return a -= b; }
  friend ParamScalar operator*(ParamScalar a, const Scalar& s) { return a *= s; }
  friend ParamScalar operator*(const Scalar& s, ParamScalar a) { return a *= s; }
  ParamScalar mul(const ParamScalar& o, unsigned degree_cap = kDefaultDegreeCap) const;
  friend ParamScalar operator*(const ParamScalar& a, const ParamScalar& b) { return a.mul(b); }

  /// Substitutes values for the parameters that have one.
  ParamScalar bind(const std::vector<std::optional<Scalar>>& values) const;
  /// Groups terms by the degree in one parameter; that parameter is removed
  /// from the returned polynomials.
  std::map<unsigned, ParamScalar> split_by(std::size_t index) const;
  /// Drops monomials whose weighted degree pushes `base` past `cap`.
  ParamScalar truncated(const ParamSpace& space, const Exponent& base, const Exponent& cap) const;
  ParamScalar floated() const;
  bool identical(const ParamScalar& o) const;

  std::string str(const ParamSpace& space) const;
  std::string str(const ParamSpace& space, unsigned digits) const;

  friend bool operator==(const ParamScalar& a, const ParamScalar& b);

 private:
  void add_term(const Monomial& m, const Scalar& c);
  TermMap terms_;
};

}  // namespace rilt

#endif  // RILT_PARAM_SCALAR_HPP
