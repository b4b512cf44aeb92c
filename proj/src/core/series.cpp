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

#include "rilt/series.hpp"

#include <algorithm>
#include <json.hpp>

#include "rilt/error.hpp"

namespace rilt {

namespace {

void require_compatible(const Series& a, const Series& b) {
  if (!a.space()->compatible(*b.space())) throw Error(ErrorCode::domain, "series parameter sets differ");
}

Truncation merge(const Truncation& a, const Truncation& b) {
  return {std::max(a.power_cap, b.power_cap), std::max(a.log_cap, b.log_cap)};
}

Series merged_shape(const Series& a, const Series& b) {
  require_compatible(a, b);
  return Series(a.space(), merge(a.truncation(), b.truncation()), lcm_checked(a.lattice(), b.lattice()));
}

// x^p for p = k/q at x > 0.
Scalar power_of(const Scalar& x, const Exponent& p) {
  if (p == Exponent(0)) return Scalar(1);
  if (x.is_exact() && p.is_integer()) return pow(x, static_cast<long>(p.num()));
  if (x.is_exact() && x == Scalar(1)) return Scalar(1);
  return Scalar(pow(x.to_float(), Float(p.rational())));
}

Scalar log_of(const Scalar& x) {
  if (x.is_exact() && x == Scalar(1)) return Scalar(0);
  return Scalar(log(x.to_float()));
}

}  // namespace

Series::Series(std::shared_ptr<const ParamSpace> space, Truncation trunc, std::int64_t lattice)
    : space_(std::move(space)), trunc_(trunc), lattice_(lattice) {
  if (!space_) space_ = ParamSpace::empty();
  if (lattice_ <= 0) throw domain_error("lattice denominator must be positive");
  if (trunc_.power_cap < Exponent(0)) throw domain_error("negative truncation order");
  extend_lattice(trunc_.power_cap.den());
}

Series Series::constant(std::shared_ptr<const ParamSpace> space, Truncation trunc, const ParamScalar& c) {
  Series s(std::move(space), trunc);
  s.add_term({Exponent(0), 0}, c);
  return s;
}

Series Series::monomial(std::shared_ptr<const ParamSpace> space, Truncation trunc, const Exponent& p, unsigned l,
                        const ParamScalar& c) {
  Series s(std::move(space), trunc);
  s.add_term({p, l}, c);
  return s;
}

Series Series::constant_like(const ParamScalar& c) const {
  Series s = zero_like();
  s.add_term({Exponent(0), 0}, c);
  return s;
}

Series Series::monomial_like(const Exponent& p, unsigned l, const ParamScalar& c) const {
  Series s = zero_like();
  s.add_term({p, l}, c);
  return s;
}

ParamScalar Series::coeff(const Exponent& p, unsigned l) const {
  auto it = terms_.find({p, l});
  return it == terms_.end() ? ParamScalar() : it->second;
}

void Series::extend_lattice(std::int64_t q) {
  if (lattice_ % q != 0) lattice_ = lcm_checked(lattice_, q);
}

void Series::add_term(const TermKey& key, const ParamScalar& c) {
  if (c.is_zero()) return;
  if (key.power > trunc_.power_cap) return;
  if (key.power < Exponent(0)) throw domain_error("negative power x^" + key.power.str() + " in series");
  ParamScalar kept = c.truncated(*space_, key.power, trunc_.power_cap);
  if (kept.is_zero()) return;
  if (key.logpow > trunc_.log_cap)
    throw Error(ErrorCode::solve, "log power " + std::to_string(key.logpow) + " exceeds log cap " + std::to_string(trunc_.log_cap) +
                                      " at x^" + key.power.str());
  extend_lattice(key.power.den());
  auto [it, inserted] = terms_.try_emplace(key, kept);
  if (inserted) return;
  it->second += kept;
  if (it->second.is_zero()) terms_.erase(it);
}

Series Series::with_truncation(const Truncation& t) const {
  Series s(space_, t, lattice_);
  for (const auto& [k, c] : terms_) s.add_term(k, c);
  return s;
}

bool Series::is_polynomial() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.first.power.is_integer() && t.first.logpow == 0; });
}

bool Series::has_logs() const {
  return std::any_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.first.logpow > 0; });
}

bool Series::is_exact() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.second.is_exact(); });
}

std::optional<Exponent> Series::weighted_valuation() const {
  std::optional<Exponent> v;
  for (const auto& [k, c] : terms_)
    for (const auto& [m, s] : c.terms()) {
      const Exponent w = k.power + space_->weight_of(m);
      if (!v || w < *v) v = w;
    }
  return v;
}

Scalar Series::max_abs_coeff() const {
  Scalar best(0);
  for (const auto& [k, c] : terms_) {
    Scalar m = c.max_abs();
    if (m > best) best = m;
  }
  return best;
}

Scalar Series::max_abs_coeff(const Exponent& cap) const {
  Scalar best(0);
  for (const auto& [k, c] : terms_) {
    if (k.power > cap) break;
    Scalar m = c.max_abs();
    if (m > best) best = m;
  }
  return best;
}

std::string Series::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [k, c] : terms_) {
    if (!out.empty()) out += " + ";
    out += "(" + c.str(*space_) + ")";
    if (k.power != Exponent(0)) out += "*x^" + (k.power.is_integer() ? k.power.str() : "(" + k.power.str() + ")");
    if (k.logpow == 1) out += "*ln(x)";
    if (k.logpow > 1) out += "*ln(x)^" + std::to_string(k.logpow);
  }
  return out;
}

bool operator==(const Series& a, const Series& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  auto x = a.terms_.begin();
  for (auto y = b.terms_.begin(); y != b.terms_.end(); ++x, ++y)
    if (x->first != y->first || !(x->second == y->second)) return false;
  return true;
}

bool Series::identical(const Series& o) const {
  if (terms_.size() != o.terms_.size()) return false;
  auto x = terms_.begin();
  for (auto y = o.terms_.begin(); y != o.terms_.end(); ++x, ++y)
    if (x->first != y->first || !x->second.identical(y->second)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Arithmetic

Series add(const Series& a, const Series& b) {
  Series r = merged_shape(a, b);
  for (const auto& [k, c] : a.terms()) r.add_term(k, c);
  for (const auto& [k, c] : b.terms()) r.add_term(k, c);
  return r;
}

Series sub(const Series& a, const Series& b) { return add(a, neg(b)); }

Series neg(const Series& a) {
  Series r = a.zero_like();
  for (const auto& [k, c] : a.terms()) r.add_term(k, -c);
  return r;
}

Series scale(const Series& a, const ParamScalar& s) {
  Series r = a.zero_like();
  if (s.is_zero()) return r;
  const unsigned cap = a.space()->degree_cap;
  for (const auto& [k, c] : a.terms()) r.add_term(k, c.mul(s, cap));
  return r;
}

Series mul(const Series& a, const Series& b) {
  Series r = merged_shape(a, b);
  const Exponent cap = r.truncation().power_cap;
  const unsigned dcap = a.space()->degree_cap;
  for (const auto& [ka, ca] : a.terms()) {
    for (const auto& [kb, cb] : b.terms()) {
      const Exponent p = ka.power + kb.power;
      if (p > cap) break;
      r.add_term({p, ka.logpow + kb.logpow}, ca.mul(cb, dcap));
    }
  }
  return r;
}

Series ipow(const Series& a, unsigned p) {
  Series result = a.constant_like(ParamScalar(1));
  Series base = a;
  while (p) {
    if (p & 1U) result = mul(result, base);
    p >>= 1U;
    if (p) base = mul(base, base);
  }
  return result;
}

Series shift(const Series& a, const Exponent& e) {
  Series r = a.zero_like();
  r.extend_lattice(e.den());
  for (const auto& [k, c] : a.terms()) r.add_term({k.power + e, k.logpow}, c);
  return r;
}

Series log_x(const Series& shape) { return shape.monomial_like(Exponent(0), 1, ParamScalar(1)); }

Series substitute_affine(const Series& a, const Scalar& lambda, const Scalar& b) {
  if (lambda.sign() <= 0) throw domain_error("substitution scale must be positive");
  Series r = a.zero_like();
  if (b.is_zero()) {
    const Scalar ll = log_of(lambda);
    for (const auto& [k, c] : a.terms()) {
      const ParamScalar base = c * power_of(lambda, k.power);
      // (ln(lambda) + ln x)^m
      Scalar lp(1);
      for (unsigned j = 0; j <= k.logpow; ++j) {
        const unsigned r_log = k.logpow - j;
        r.add_term({k.power, r_log}, base * (binomial(k.logpow, j) * lp));
        if (ll.is_zero()) break;
        lp *= ll;
      }
    }
    return r;
  }
  if (!a.is_polynomial()) throw domain_error("shifted substitution requires a polynomial series");
  for (const auto& [k, c] : a.terms()) {
    const auto n = static_cast<unsigned>(k.power.num());
    // (lambda x + b)^n
    for (unsigned j = 0; j <= n; ++j)
      r.add_term({Exponent(j), 0}, c * (binomial(n, j) * pow(lambda, j) * pow(b, static_cast<long>(n - j))));
  }
  return r;
}

Series compose(const Series& outer, const Series& inner) {
  if (!outer.is_polynomial() || !inner.is_polynomial()) throw domain_error("composition requires polynomial series");
  require_compatible(outer, inner);
  Series shape = merged_shape(outer, inner);
  if (outer.empty()) return shape;
  const Series in = inner.with_truncation(shape.truncation());
  const auto top = outer.terms().rbegin()->first.power.num();
  Series result = shape;
  for (auto d = top; d >= 0; --d) {
    result = mul(result, in);
    result = add(result, shape.constant_like(outer.coeff(Exponent(d))));
  }
  return result;
}

Series diff(const Series& a) {
  Series r = a.zero_like();
  for (const auto& [k, c] : a.terms()) {
    const Exponent p = k.power - Exponent(1);
    if (k.power != Exponent(0)) {
      if (p < Exponent(0)) throw domain_error("derivative produces negative power x^" + p.str());
      r.add_term({p, k.logpow}, c * Scalar(k.power.rational()));
    }
    if (k.logpow > 0) {
      if (p < Exponent(0)) throw domain_error("derivative produces negative power x^" + p.str());
      r.add_term({p, k.logpow - 1}, c * Scalar(static_cast<long>(k.logpow)));
    }
  }
  return r;
}

Series antideriv(const Series& a) {
  Series r = a.zero_like();
  for (const auto& [k, c] : a.terms()) {
    if (k.power < Exponent(0)) throw domain_error("antiderivative requires nonnegative powers");
    const Exponent p = k.power + Exponent(1);
    const Scalar kp1(p.rational());
    // int_0^x t^k ln^m t dt = x^{k+1} sum_j (-1)^j m!/(m-j)! ln^{m-j} x / (k+1)^{j+1}
    Scalar f(1);
    Scalar denom = kp1;
    for (unsigned j = 0; j <= k.logpow; ++j) {
      const Scalar s = (j % 2 ? Scalar(-1) : Scalar(1)) * f / denom;
      r.add_term({p, k.logpow - j}, c * s);
      f *= Scalar(static_cast<long>(k.logpow - j));
      denom *= kp1;
    }
  }
  return r;
}

ParamScalar eval_partial(const Series& a, const Scalar& x, const Bindings& bindings) {
  if (x.sign() < 0) throw domain_error("series evaluated at negative x");
  ParamScalar total;
  if (x.is_zero()) {
    for (const auto& [k, c] : a.terms()) {
      if (k.power == Exponent(0) && k.logpow > 0) throw domain_error("series diverges at x = 0 (bare logarithm)");
      if (k.power == Exponent(0)) total += c.bind(bindings);
    }
    return total;
  }
  const Scalar lx = log_of(x);
  for (const auto& [k, c] : a.terms()) {
    Scalar f = power_of(x, k.power);
    if (k.logpow) f *= pow(lx, static_cast<long>(k.logpow));
    total += c.bind(bindings) * f;
  }
  return total;
}

Scalar eval(const Series& a, const Scalar& x, const Bindings& bindings) {
  const ParamScalar v = eval_partial(a, x, bindings);
  if (!v.is_constant()) throw domain_error("series has unbound parameters");
  return v.constant();
}

Scalar eval(const Series& a, const Scalar& x, const std::map<std::string, Scalar>& bindings) {
  Bindings b(a.space()->size());
  for (const auto& [name, v] : bindings) {
    const auto idx = a.space()->index_of(name);
    if (!idx) throw domain_error("unknown parameter '" + name + "'");
    b[*idx] = v;
  }
  return eval(a, x, b);
}

Series expand_function(SeriesFunction fn, const Series& arg) {
  const auto v = arg.weighted_valuation();
  Series result = arg.zero_like();
  if (!v) {
    if (fn == SeriesFunction::cos || fn == SeriesFunction::exp) result.add_term({Exponent(0), 0}, ParamScalar(1));
    return result;
  }
  if (*v <= Exponent(0)) throw domain_error("function argument must have positive valuation");
  Series power = arg.constant_like(ParamScalar(1));
  Scalar fact(1);
  for (unsigned n = 0; !power.empty(); ++n) {
    if (n > 0) fact *= Scalar(static_cast<long>(n));
    Scalar coef(0);
    switch (fn) {
      case SeriesFunction::exp: coef = Scalar(1) / fact; break;
      case SeriesFunction::sin:
        if (n % 2) coef = ((n / 2) % 2 ? Scalar(-1) : Scalar(1)) / fact;
        break;
      case SeriesFunction::cos:
        if (n % 2 == 0) coef = ((n / 2) % 2 ? Scalar(-1) : Scalar(1)) / fact;
        break;
      case SeriesFunction::ln1p:
        if (n > 0) coef = Scalar::ratio(n % 2 ? 1 : -1, static_cast<long>(n));
        break;
    }
    if (!coef.is_zero()) result = add(result, scale(power, ParamScalar(coef)));
    power = mul(power, arg);
  }
  return result;
}

Series expand_variable_exponent(const Series& beta, int sign) {
  if (sign != 1 && sign != -1) throw domain_error("exponent sign must be +1 or -1");
  const ParamScalar c0 = beta.coeff(Exponent(0), 0);
  if (!c0.is_constant() || !c0.constant().is_exact()) throw domain_error("variable exponent needs a rational constant term");
  const Exponent b0 = Exponent::from_rational(c0.constant().rational());
  Series h = beta;
  h.add_term({Exponent(0), 0}, -c0);
  const Exponent s0 = sign > 0 ? b0 : -b0;
  Truncation t = beta.truncation();
  const Exponent inner_cap = t.power_cap - s0;
  Series out = beta.zero_like();
  out.extend_lattice(b0.den());
  if (inner_cap < Exponent(0)) return out;
  t.power_cap = inner_cap;
  Series hl = mul(h.with_truncation(t), log_x(h.with_truncation(t)));
  if (sign < 0) hl = neg(hl);
  const Series e = expand_function(SeriesFunction::exp, hl);
  for (const auto& [k, c] : e.terms()) {
    const Exponent p = k.power + s0;
    if (p < Exponent(0)) throw domain_error("variable exponent produces negative power x^" + p.str());
    out.add_term({p, k.logpow}, c);
  }
  return out;
}

Series substitute_param(const Series& a, std::size_t index, const Series& value) {
  require_compatible(a, value);
  Series r = a.zero_like();
  r.extend_lattice(value.lattice());
  std::vector<Series> powers{a.constant_like(ParamScalar(1))};
  for (const auto& [k, c] : a.terms()) {
    for (const auto& [d, part] : c.split_by(index)) {
      while (powers.size() <= d) powers.push_back(mul(powers.back(), value));
      const Series& vp = powers[d];
      for (const auto& [kv, cv] : vp.terms()) {
        const Exponent p = k.power + kv.power;
        if (p > r.truncation().power_cap) break;
        r.add_term({p, k.logpow + kv.logpow}, part.mul(cv, a.space()->degree_cap));
      }
    }
  }
  return r;
}

Series bind_params(const Series& a, const Bindings& bindings) {
  Series r = a.zero_like();
  for (const auto& [k, c] : a.terms()) r.add_term(k, c.bind(bindings));
  return r;
}

Series polynomial_part(const Series& a) {
  Series r = a.zero_like();
  for (const auto& [k, c] : a.terms())
    if (k.power.is_integer() && k.logpow == 0) r.add_term(k, c);
  return r;
}

Series floated(const Series& a) {
  Series r = a.zero_like();
  for (const auto& [k, c] : a.terms()) r.add_term(k, c.floated());
  return r;
}

// ---------------------------------------------------------------------------
// Text format

std::string serialize(const Series& a) {
  nlohmann::ordered_json j;
  j["lattice"] = a.lattice();
  j["power_cap"] = a.truncation().power_cap.str();
  j["log_cap"] = a.truncation().log_cap;
  if (a.space()->size()) {
    j["params"] = a.space()->names;
    if (a.space()->has_weights()) {
      auto w = nlohmann::json::array();
      for (const auto& e : a.space()->weights) w.push_back(e.str());
      j["weights"] = w;
    }
  }
  auto terms = nlohmann::ordered_json::array();
  for (const auto& [k, c] : a.terms()) {
    nlohmann::ordered_json t;
    t["p"] = k.power.str();
    t["l"] = k.logpow;
    t["c"] = c.str(*a.space(), 0);
    terms.push_back(std::move(t));
  }
  j["terms"] = std::move(terms);
  return j.dump(2);
}

namespace {

Series parse_series_impl(std::string_view text, std::shared_ptr<const ParamSpace> space) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, std::string("series text is not valid JSON: ") + e.what());
  }
  try {
    if (!j.is_object() || !j.contains("terms") || !j.contains("lattice")) throw Error(ErrorCode::parse, "series text needs 'lattice' and 'terms'");
    std::vector<std::string> names;
    if (j.contains("params")) names = j.at("params").get<std::vector<std::string>>();
    std::vector<Exponent> weights;
    if (j.contains("weights"))
      for (const auto& w : j.at("weights")) weights.push_back(Exponent::parse(w.get<std::string>()));
    if (!space) {
      space = ParamSpace::make(names, weights);
    } else if (space->names != names) {
      throw Error(ErrorCode::parse, "series parameters do not match the expected set");
    }
    Exponent cap(0);
    unsigned log_cap = 0;
    const auto& terms = j.at("terms");
    if (!terms.is_array()) throw Error(ErrorCode::parse, "'terms' must be a list");
    for (const auto& t : terms) {
      cap = std::max(cap, Exponent::parse(t.at("p").get<std::string>()));
      log_cap = std::max(log_cap, t.at("l").get<unsigned>());
    }
    if (j.contains("power_cap")) cap = std::max(cap, Exponent::parse(j.at("power_cap").get<std::string>()));
    if (j.contains("log_cap")) log_cap = std::max(log_cap, j.at("log_cap").get<unsigned>());
    const auto lattice = j.at("lattice").get<std::int64_t>();
    if (lattice <= 0) throw Error(ErrorCode::parse, "lattice must be positive");
    Series s(space, {cap, log_cap}, lattice);
    for (const auto& t : terms) {
      const Exponent p = Exponent::parse(t.at("p").get<std::string>());
      if (p < Exponent(0)) throw Error(ErrorCode::parse, "negative power in series text");
      if (lattice % p.den() != 0) throw Error(ErrorCode::parse, "power " + p.str() + " is off the lattice");
      const ParamScalar c = ParamScalar::parse(t.at("c").get<std::string>(), *space);
      if (c.is_zero()) throw Error(ErrorCode::parse, "zero coefficient in series text");
      if (s.terms().count({p, t.at("l").get<unsigned>()})) throw Error(ErrorCode::parse, "duplicate term in series text");
      s.add_term({p, t.at("l").get<unsigned>()}, c);
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, std::string("malformed series text: ") + e.what());
  }
}

}  // namespace

Series parse_series(std::string_view text) { return parse_series_impl(text, nullptr); }

Series parse_series(std::string_view text, std::shared_ptr<const ParamSpace> space) {
  return parse_series_impl(text, std::move(space));
}

}  // namespace rilt
