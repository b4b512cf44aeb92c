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

#include "rilt/euler.hpp"

#include <algorithm>
#include <sstream>

#include "rilt/engine.hpp"
#include "rilt/error.hpp"
#include "rilt/special.hpp"

namespace rilt {

namespace {

RationalPoly mul(const RationalPoly& a, const RationalPoly& b) {
  if (a.empty() || b.empty()) return {};
  RationalPoly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return poly_trim(r);
}

std::pair<RationalPoly, RationalPoly> divmod(RationalPoly a, const RationalPoly& b) {
  if (b.empty()) throw Error(ErrorCode::internal, "polynomial division by zero");
  a = poly_trim(a);
  if (a.size() < b.size()) return {{}, a};
  RationalPoly q(a.size() - b.size() + 1, 0);
  for (std::size_t shift = q.size(); shift-- > 0;) {
    const mpq_class c = a[shift + b.size() - 1] / b.back();
    q[shift] = c;
    for (std::size_t j = 0; j < b.size(); ++j) a[shift + j] -= c * b[j];
  }
  return {poly_trim(q), poly_trim(a)};
}

RationalPoly derivative(const RationalPoly& p) {
  RationalPoly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<long>(i));
  return poly_trim(d);
}

Float eval_poly(const RationalPoly& p, const Float& t) {
  Float s(0);
  for (std::size_t i = p.size(); i-- > 0;) s = s * t + Float(p[i]);
  return s;
}

RationalPoly monic(RationalPoly p) {
  const mpq_class lead = p.back();
  for (auto& c : p) c /= lead;
  return p;
}

}  // namespace

RationalPoly poly_trim(RationalPoly p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
  return p;
}

RationalPoly poly_gcd(RationalPoly a, RationalPoly b) {
  a = poly_trim(a);
  b = poly_trim(b);
  while (!b.empty()) {
    RationalPoly r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a.empty() ? a : monic(a);
}

std::string poly_str(const RationalPoly& p, const std::string& var) {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = p.size(); i-- > 0;) {
    if (p[i] == 0) continue;
    mpq_class c = p[i];
    if (!first) {
      os << (c < 0 ? " - " : " + ");
      c = abs(c);
    } else if (c < 0) {
      os << "-";
      c = abs(c);
    }
    first = false;
    if (c != 1 || i == 0) os << c.get_str() << (i ? "*" : "");
    if (i) os << var << (i > 1 ? "^" + std::to_string(i) : "");
  }
  return first ? "0" : os.str();
}

std::string EulerSolution::str() const {
  if (numerator.empty()) return "0";
  return "(" + poly_str(numerator) + ")/(" + poly_str(denominator) + ")";
}

Float EulerSolution::eval(const Float& x) const {
  if (!(x > Float(0)) || !(x < Float(1))) throw domain_error("Euler solution is evaluated on 0 < x < 1");
  if (numerator.empty()) return Float(0);
  const Float s = -log(x);
  // int_0^inf t^k x^t dt = k!/s^(k+1)
  Float y(0);
  for (std::size_t k = 0; k < quotient.size(); ++k)
    y += Float(quotient[k]) * factorial(static_cast<unsigned>(k)).to_float() / pow(s, static_cast<long>(k + 1));
  // int_0^inf x^t/(t - a) dt = -x^a Ei(a s), a principal value when a > 0
  for (std::size_t i = 0; i < roots.size(); ++i) y -= residues[i] * exp(-roots[i] * s) * expint_ei(roots[i] * s);
  return y;
}

EulerSolution euler_solve(const EulerDecl& eq) {
  RationalPoly q;
  RationalPoly falling{1};
  for (std::size_t j = 0; j < eq.coefficients.size(); ++j) {
    if (q.size() < falling.size()) q.resize(falling.size(), 0);
    for (std::size_t i = 0; i < falling.size(); ++i) q[i] += eq.coefficients[j] * falling[i];
    falling = mul(falling, {mpq_class(-static_cast<long>(j)), 1});
  }
  q = poly_trim(q);
  if (q.empty()) throw Error(ErrorCode::usage, "Euler operator vanishes identically");
  RationalPoly p;
  for (const auto& [c, pw] : eq.forcing) {
    if (pw == 0) throw Error(ErrorCode::usage, "forcing terms need a positive power of ln(x)");
    if (p.size() < pw) p.resize(pw, 0);
    mpq_class v = c / factorial(pw - 1).rational();
    if (pw % 2) v = -v;
    p[pw - 1] += v;
  }
  p = poly_trim(p);

  EulerSolution sol;
  if (p.empty()) {
    sol.denominator = monic(q);
    return sol;
  }
  const RationalPoly g = poly_gcd(p, q);
  p = divmod(p, g).first;
  q = divmod(q, g).first;
  const mpq_class lead = q.back();
  for (auto& c : p) c /= lead;
  q = monic(q);
  sol.numerator = p;
  sol.denominator = q;
  auto [quot, rem] = divmod(p, q);
  sol.quotient = quot;
  if (q.size() <= 1) return sol;
  if (poly_gcd(q, derivative(q)).size() > 1) throw Error(ErrorCode::domain, "denominator " + poly_str(q) + " has a repeated root");
  std::vector<Scalar> coeffs;
  for (const auto& c : q) coeffs.emplace_back(c);
  for (const auto& r : real_roots(coeffs)) sol.roots.push_back(r.to_float());
  if (sol.roots.size() + 1 != q.size())
    throw Error(ErrorCode::domain, "denominator " + poly_str(q) + " has complex roots");
  const RationalPoly dq = derivative(q);
  for (const auto& a : sol.roots) sol.residues.push_back(eval_poly(rem, a) / eval_poly(dq, a));
  return sol;
}

EulerSolution euler_solve(const Problem& pb) {
  if (pb.kind != ProblemKind::euler || !pb.euler) throw Error(ErrorCode::usage, "problem '" + pb.name + "' is not an Euler problem");
  PrecisionScope scope({pb.solver.precision, current_precision().guard});
  return euler_solve(*pb.euler);
}

}  // namespace rilt
