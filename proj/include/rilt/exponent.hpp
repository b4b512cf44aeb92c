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

#ifndef RILT_EXPONENT_HPP
#define RILT_EXPONENT_HPP

#include <compare>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace rilt {

/// Reduced rational k/q with q > 0.
class Exponent {
 public:
  constexpr Exponent() = default;
  constexpr Exponent(std::int64_t n) : num_(n) {}  // NOLINT(google-explicit-constructor)
  Exponent(std::int64_t n, std::int64_t d);
  static Exponent from_rational(const mpq_class& q);
  static Exponent parse(std::string_view text);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool is_integer() const { return den_ == 1; }
  std::int64_t floor() const;
  std::int64_t ceil() const;
  mpq_class rational() const { return mpq_class(mpz_class(static_cast<long>(num_)), mpz_class(static_cast<long>(den_))); }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

  Exponent operator-() const { return Exponent(-num_, den_); }
  friend Exponent operator+(const Exponent& a, const Exponent& b);
  friend Exponent operator-(const Exponent& a, const Exponent& b) { return a + (-b); }
  friend Exponent operator*(const Exponent& a, const Exponent& b);
  Exponent& operator+=(const Exponent& o) { return *this = *this + o; }
  Exponent& operator-=(const Exponent& o) { return *this = *this - o; }

  friend bool operator==(const Exponent&, const Exponent&) = default;
  friend std::strong_ordering operator<=>(const Exponent& a, const Exponent& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

std::int64_t lcm_checked(std::int64_t a, std::int64_t b);

}  // namespace rilt

#endif  // RILT_EXPONENT_HPP
