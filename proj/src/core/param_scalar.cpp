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

#include "rilt/param_scalar.hpp"

#include <algorithm>
#include <cctype>

#include "rilt/error.hpp"

namespace rilt {

unsigned total_degree(const Monomial& m) {
  unsigned d = 0;
  for (auto e : m) d += e;
  return d;
}

bool MonomialLess::operator()(const Monomial& a, const Monomial& b) const {
  const unsigned da = total_degree(a), db = total_degree(b);
  if (da != db) return da < db;
  // Within a degree, powers of earlier parameters come later: c^2 before c*d.
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

std::shared_ptr<const ParamSpace> ParamSpace::make(std::vector<std::string> names, std::vector<Exponent> weights,
                                                   unsigned degree_cap) {
  if (names.size() > kMaxParams) throw Error(ErrorCode::usage, "at most 8 parameters are supported");
  if (degree_cap == 0 || degree_cap > 255) throw Error(ErrorCode::usage, "parameter degree cap must be in [1, 255]");
  for (std::size_t i = 0; i < names.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (names[i] == names[j]) throw Error(ErrorCode::usage, "duplicate parameter '" + names[i] + "'");
  weights.resize(names.size(), Exponent(0));
  auto s = std::make_shared<ParamSpace>();
  s->names = std::move(names);
  s->weights = std::move(weights);
  s->degree_cap = degree_cap;
  return s;
}

const std::shared_ptr<const ParamSpace>& ParamSpace::empty() {
  static const std::shared_ptr<const ParamSpace> e = make({});
  return e;
}

std::optional<std::size_t> ParamSpace::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  return std::nullopt;
}

Exponent ParamSpace::weight_of(const Monomial& m) const {
  Exponent w(0);
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (m[i] && weights[i] != Exponent(0)) w += weights[i] * Exponent(m[i]);
  return w;
}

bool ParamSpace::has_weights() const {
  return std::any_of(weights.begin(), weights.end(), [](const Exponent& w) { return w != Exponent(0); });
}

bool ParamSpace::compatible(const ParamSpace& o) const {
  return this == &o || (names == o.names && weights == o.weights && degree_cap == o.degree_cap);
}

// ---------------------------------------------------------------------------

ParamScalar::ParamScalar(Scalar s) {
  if (!s.is_zero()) terms_.emplace(Monomial{}, std::move(s));
}

ParamScalar ParamScalar::variable(std::size_t index) {
  if (index >= kMaxParams) throw domain_error("parameter index out of range");
  Monomial m{};
  m[index] = 1;
  return monomial(m, Scalar(1));
}

ParamScalar ParamScalar::monomial(const Monomial& m, Scalar c) {
  ParamScalar p;
  if (!c.is_zero()) p.terms_.emplace(m, std::move(c));
  return p;
}

void ParamScalar::add_term(const Monomial& m, const Scalar& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (inserted) return;
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

bool ParamScalar::is_constant() const { return terms_.empty() || (terms_.size() == 1 && rilt::total_degree(terms_.begin()->first) == 0); }

bool ParamScalar::is_exact() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.second.is_exact(); });
}

Scalar ParamScalar::constant() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? Scalar(0) : it->second;
}

unsigned ParamScalar::degree(std::size_t index) const {
  unsigned d = 0;
  for (const auto& [m, c] : terms_) d = std::max<unsigned>(d, m[index]);
  return d;
}

unsigned ParamScalar::total_degree() const {
  unsigned d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, rilt::total_degree(m));
  return d;
}

Scalar ParamScalar::max_abs() const {
  Scalar best(0);
  for (const auto& [m, c] : terms_) {
    Scalar a = c.abs();
    if (a > best) best = a;
  }
  return best;
}

ParamScalar& ParamScalar::operator+=(const ParamScalar& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

ParamScalar& ParamScalar::operator-=(const ParamScalar& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

ParamScalar& ParamScalar::operator*=(const Scalar& s) {
  if (s.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= s;
    it = it->second.is_zero() ? terms_.erase(it) : std::next(it);
  }
  return *this;
}

ParamScalar ParamScalar::operator-() const {
  ParamScalar r;
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
  return r;
}

ParamScalar ParamScalar::mul(const ParamScalar& o, unsigned degree_cap) const {
  ParamScalar r;
  if (terms_.size() == 1 && terms_.begin()->first == Monomial{}) return o * terms_.begin()->second;
  if (o.terms_.size() == 1 && o.terms_.begin()->first == Monomial{}) return *this * o.terms_.begin()->second;
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : o.terms_) {
      Monomial m{};
      for (std::size_t i = 0; i < kMaxParams; ++i) {
        const unsigned e = unsigned(ma[i]) + mb[i];
        if (e > degree_cap) throw Error(ErrorCode::solve, "parameter degree exceeds cap " + std::to_string(degree_cap));
        m[i] = static_cast<std::uint8_t>(e);
      }
      r.add_term(m, ca * cb);
    }
  }
  return r;
}

ParamScalar ParamScalar::bind(const std::vector<std::optional<Scalar>>& values) const {
  ParamScalar r;
  for (const auto& [m, c] : terms_) {
    Monomial rest = m;
    Scalar v = c;
    for (std::size_t i = 0; i < values.size() && i < kMaxParams; ++i) {
      if (m[i] && values[i]) {
        v *= pow(*values[i], m[i]);
        rest[i] = 0;
      }
    }
    r.add_term(rest, v);
  }
  return r;
}

std::map<unsigned, ParamScalar> ParamScalar::split_by(std::size_t index) const {
  std::map<unsigned, ParamScalar> out;
  for (const auto& [m, c] : terms_) {
    Monomial rest = m;
    rest[index] = 0;
    out[m[index]].add_term(rest, c);
  }
  return out;
}

ParamScalar ParamScalar::truncated(const ParamSpace& space, const Exponent& base, const Exponent& cap) const {
  if (!space.has_weights()) return base <= cap ? *this : ParamScalar();
  ParamScalar r;
  for (const auto& [m, c] : terms_)
    if (base + space.weight_of(m) <= cap) r.terms_.emplace(m, c);
  return r;
}

ParamScalar ParamScalar::floated() const {
  ParamScalar r;
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, c.floated());
  return r;
}

bool ParamScalar::identical(const ParamScalar& o) const {
  if (terms_.size() != o.terms_.size()) return false;
  auto a = terms_.begin();
  for (auto b = o.terms_.begin(); b != o.terms_.end(); ++a, ++b)
    if (a->first != b->first || !a->second.identical(b->second)) return false;
  return true;
}

bool operator==(const ParamScalar& a, const ParamScalar& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  auto x = a.terms_.begin();
  for (auto y = b.terms_.begin(); y != b.terms_.end(); ++x, ++y)
    if (x->first != y->first || !(x->second == y->second)) return false;
  return true;
}

std::string ParamScalar::str(const ParamSpace& space) const { return str(space, current_precision().digits); }

std::string ParamScalar::str(const ParamSpace& space, unsigned digits) const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    std::string mono;
    for (std::size_t i = 0; i < kMaxParams; ++i) {
      if (!m[i]) continue;
      if (i >= space.size()) throw domain_error("monomial refers to an undeclared parameter");
      if (!mono.empty()) mono += "*";
      mono += space.names[i];
      if (m[i] > 1) mono += "^" + std::to_string(m[i]);
    }
    const bool neg = c.sign() < 0;
    const Scalar a = c.abs();
    std::string term;
    if (mono.empty())
      term = a.str(digits);
    else if (a.is_exact() && a == Scalar(1))
      term = mono;
    else
      term = a.str(digits) + "*" + mono;
    if (first)
      out = (neg ? "-" : "") + term;
    else
      out += (neg ? " - " : " + ") + term;
    first = false;
  }
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_number_start(char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == '.'; }

}  // namespace

ParamScalar ParamScalar::parse(std::string_view text, const ParamSpace& space) {
  const std::string original(text);
  auto fail = [&](const std::string& why) -> Error {
    return Error(ErrorCode::parse, "malformed coefficient '" + original + "': " + why);
  };
  text = trim(text);
  if (text.empty()) throw fail("empty");
  ParamScalar result;
  std::size_t pos = 0;
  while (pos < text.size()) {
    bool neg = false;
    while (pos < text.size() && (text[pos] == '+' || text[pos] == '-' || std::isspace(static_cast<unsigned char>(text[pos])))) {
      if (text[pos] == '-') neg = !neg;
      ++pos;
    }
    std::size_t end = pos;
    while (end < text.size()) {
      const char ch = text[end];
      if ((ch == '+' || ch == '-') && end > pos) {
        const char prev = text[end - 1];
        const bool exponent_sign = (prev == 'e' || prev == 'E') && end >= 2 && is_number_start(text[end - 2]);
        if (!exponent_sign) break;
      }
      ++end;
    }
    const std::string_view term = trim(text.substr(pos, end - pos));
    if (term.empty()) throw fail("empty term");
    Scalar coeff(neg ? -1 : 1);
    Monomial mono{};
    std::size_t fpos = 0;
    while (fpos <= term.size()) {
      std::size_t star = term.find('*', fpos);
      if (star == std::string_view::npos) star = term.size();
      const std::string_view factor = trim(term.substr(fpos, star - fpos));
      if (factor.empty()) throw fail("empty factor");
      if (is_number_start(factor.front())) {
        coeff *= Scalar::parse_series_coefficient(factor);
      } else {
        const auto caret = factor.find('^');
        const std::string_view name = trim(factor.substr(0, caret));
        const auto idx = space.index_of(name);
        if (!idx) throw fail("unknown parameter '" + std::string(name) + "'");
        unsigned e = 1;
        if (caret != std::string_view::npos) {
          const std::string_view es = trim(factor.substr(caret + 1));
          if (es.empty() || !std::all_of(es.begin(), es.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
            throw fail("bad exponent");
          e = static_cast<unsigned>(std::stoul(std::string(es)));
        }
        const unsigned total = mono[*idx] + e;
        if (total > space.degree_cap) throw fail("degree exceeds cap");
        mono[*idx] = static_cast<std::uint8_t>(total);
      }
      fpos = star + 1;
    }
    result.add_term(mono, coeff);
    pos = end;
  }
  return result;
}

}  // namespace rilt
