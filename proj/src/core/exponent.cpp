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

#include "rilt/exponent.hpp"

#include <charconv>
#include <limits>

#include "rilt/error.hpp"

namespace rilt {

namespace {

constexpr std::int64_t kLimit = std::int64_t{1} << 40;

void check_range(__int128 v) {
  if (v > kLimit || v < -kLimit) throw domain_error("exponent out of supported range");
}

}  // namespace

Exponent::Exponent(std::int64_t n, std::int64_t d) {
  if (d == 0) throw domain_error("exponent with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
  num_ = g ? n / g : 0;
  den_ = g ? d / g : 1;
  check_range(num_);
  check_range(den_);
}

Exponent Exponent::from_rational(const mpq_class& q) {
  if (!q.get_num().fits_slong_p() || !q.get_den().fits_slong_p()) throw domain_error("exponent out of supported range");
  return Exponent(q.get_num().get_si(), q.get_den().get_si());
}

Exponent Exponent::parse(std::string_view text) {
  auto parse_int = [&](std::string_view s) {
    std::int64_t v = 0;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
      throw Error(ErrorCode::parse, "malformed exponent '" + std::string(text) + "'");
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Exponent(parse_int(text));
  return Exponent(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
}

std::int64_t Exponent::floor() const {
  std::int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ < 0) --q;
  return q;
}

std::int64_t Exponent::ceil() const {
  std::int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ > 0) ++q;
  return q;
}

std::string Exponent::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Exponent operator+(const Exponent& a, const Exponent& b) {
  const std::int64_t g = std::gcd(a.den_, b.den_);
  const __int128 n = static_cast<__int128>(a.num_) * (b.den_ / g) + static_cast<__int128>(b.num_) * (a.den_ / g);
  const __int128 d = static_cast<__int128>(a.den_) * (b.den_ / g);
  check_range(n);
  check_range(d);
  return Exponent(static_cast<std::int64_t>(n), static_cast<std::int64_t>(d));
}

Exponent operator*(const Exponent& a, const Exponent& b) {
  const __int128 n = static_cast<__int128>(a.num_) * b.num_;
  const __int128 d = static_cast<__int128>(a.den_) * b.den_;
  const __int128 an = n < 0 ? -n : n;
  __int128 x = an, y = d;
  while (y) {
    const __int128 t = x % y;
    x = y;
    y = t;
  }
  const __int128 g = x ? x : 1;
  check_range(n / g);
  check_range(d / g);
  return Exponent(static_cast<std::int64_t>(n / g), static_cast<std::int64_t>(d / g));
}

std::strong_ordering operator<=>(const Exponent& a, const Exponent& b) {
  const __int128 l = static_cast<__int128>(a.num_) * b.den_;
  const __int128 r = static_cast<__int128>(b.num_) * a.den_;
  return l < r ? std::strong_ordering::less : l > r ? std::strong_ordering::greater : std::strong_ordering::equal;
}

std::int64_t lcm_checked(std::int64_t a, std::int64_t b) {
  const std::int64_t l = std::lcm(a, b);
  if (l <= 0 || l > kLimit) throw domain_error("lattice denominator out of supported range");
  return l;
}

}  // namespace rilt
