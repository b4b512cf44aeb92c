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

#include "rilt/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <set>

#include "rilt/error.hpp"
#include "rilt/special.hpp"

namespace rilt {

namespace {

constexpr const char* kOffsetName = "%delta";

bool same_order(const NodePtr& a, const NodePtr& b) { return structurally_equal(a, b); }

std::optional<mpq_class> exact_constant(const NodePtr& n) {
  const ParamScalar* v = const_value(n);
  if (!v || !v->is_constant() || !v->constant().is_exact()) return std::nullopt;
  return v->constant().rational();
}

// ----------------------------------------------------------- normalization

NodePtr x_factor(const NodePtr& exponent) {
  if (auto r = exact_constant(exponent)) {
    if (*r == 0) return nullptr;
    return make_pow(make_x(), Exponent::from_rational(*r));
  }
  return make_var_exp(exponent);
}

// x^alpha * term, merging powers of x and fusing a matching Caputo factor.
NodePtr times_x_alpha(const NodePtr& term, const NodePtr& alpha) {
  std::vector<NodePtr> factors = term->kind == NodeKind::mul ? term->args : std::vector<NodePtr>{term};
  std::size_t caputo_count = 0, caputo_at = 0;
  bool others_constant = true;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (factors[i]->kind == NodeKind::caputo && same_order(factors[i]->order, alpha)) {
      ++caputo_count;
      caputo_at = i;
    } else if (!is_constant_valued(factors[i])) {
      others_constant = false;
    }
  }
  if (caputo_count == 1 && others_constant) {
    factors[caputo_at] = make_caputo_std(alpha, factors[caputo_at]->arg());
    return make_mul(std::move(factors));
  }
  std::vector<NodePtr> exps{alpha};
  std::vector<NodePtr> rest;
  for (const auto& f : factors) {
    if (f->kind == NodeKind::x)
      exps.push_back(make_const(ParamScalar(1)));
    else if (f->kind == NodeKind::pow && f->arg()->kind == NodeKind::x)
      exps.push_back(make_const(ParamScalar(Scalar(f->power.rational()))));
    else if (f->kind == NodeKind::var_exp)
      exps.push_back(f->arg());
    else
      rest.push_back(f);
  }
  if (NodePtr xf = x_factor(make_add(std::move(exps)))) rest.insert(rest.begin(), xf);
  return make_mul(std::move(rest));
}

NodePtr normalize(const NodePtr& rhs, const NodePtr& alpha) {
  if (rhs->kind != NodeKind::add) return times_x_alpha(rhs, alpha);
  std::vector<NodePtr> terms;
  for (const auto& t : rhs->args) terms.push_back(times_x_alpha(t, alpha));
  return make_add(std::move(terms));
}

// Splits top-level terms c * x^a D^a f with closed-form f.
std::pair<NodePtr, NodePtr> split_forcing(const NodePtr& standard, const NodePtr& alpha) {
  std::vector<NodePtr> terms = standard->kind == NodeKind::add ? standard->args : std::vector<NodePtr>{standard};
  std::vector<NodePtr> forcing, rest;
  for (const auto& t : terms) {
    std::vector<NodePtr> factors = t->kind == NodeKind::mul ? t->args : std::vector<NodePtr>{t};
    std::optional<std::size_t> at;
    bool ok = true;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      const auto& f = factors[i];
      if (f->kind == NodeKind::caputo_std && same_order(f->order, alpha) && !contains_unknown(f->arg()) && !at)
        at = i;
      else if (!is_constant_valued(f))
        ok = false;
    }
    if (ok && at) {
      factors[*at] = factors[*at]->arg();
      forcing.push_back(make_mul(std::move(factors)));
    } else {
      rest.push_back(t);
    }
  }
  NodePtr f = forcing.empty() ? nullptr : make_add(std::move(forcing));
  return {f, rest.empty() ? make_const(ParamScalar()) : make_add(std::move(rest))};
}

void walk(const NodePtr& n, const std::function<void(const NodePtr&)>& f) {
  f(n);
  for (const auto& c : n->args) walk(c, f);
  if (n->order) walk(n->order, f);
}

std::optional<ParamScalar> as_constant(const Series& s) {
  ParamScalar v;
  for (const auto& [k, c] : s.terms()) {
    if (!(k.power == Exponent(0)) || k.logpow != 0) return std::nullopt;
    v = c;
  }
  return v;
}

Scalar numeric_function(const std::string& name, const Scalar& a) {
  if (name == "gamma") return gamma(a);
  if (name == "sqrt" && a.is_exact() && a.sign() >= 0) {
    const mpq_class& q = a.rational();
    if (mpz_perfect_square_p(q.get_num_mpz_t()) && mpz_perfect_square_p(q.get_den_mpz_t())) {
      mpz_class n, d;
      mpz_sqrt(n.get_mpz_t(), q.get_num_mpz_t());
      mpz_sqrt(d.get_mpz_t(), q.get_den_mpz_t());
      return Scalar(mpq_class(n, d));
    }
  }
  if (a.is_exact() && a.is_zero()) {
    if (name == "sin" || name == "tan" || name == "tanh" || name == "atan" || name == "ln1p") return Scalar(0);
    if (name == "cos" || name == "exp") return Scalar(1);
  }
  const Float f = a.to_float();
  if (name == "sin") return sin(f);
  if (name == "cos") return cos(f);
  if (name == "exp") return exp(f);
  if (name == "ln") return log(f);
  if (name == "ln1p") return log(Float(1) + f);
  if (name == "tan") return tan(f);
  if (name == "tanh") return tanh(f);
  if (name == "atan") return atan(f);
  if (name == "sqrt") return sqrt(f);
  throw domain_error("unknown function " + name);
}

class Evaluator {
 public:
  Evaluator(const ProblemSpec& spec, const std::vector<Series>& current) : spec_(spec), cur_(current) {}

  Series eval(const NodePtr& n) {
    try {
      return dispatch(n);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      const std::string what = e.what();
      if (what.find(" [in ") != std::string::npos) throw;
      std::string text = print(n, spec_.names);
      if (text.size() > 80) text = text.substr(0, 77) + "...";
      throw Error(e.code(), what + " [in " + text + "]");
    }
  }

 private:
  const ProblemSpec& spec_;
  const std::vector<Series>& cur_;

  Series zero() const { return spec_.zero(); }
  Series offset_free(const Series& s) const { return resolve_order_offset(spec_, s); }

  const Series& unknown(std::size_t i) const {
    if (i >= cur_.size()) throw Error(ErrorCode::usage, "closed-form expression refers to an unknown");
    return cur_[i];
  }

  OrderSpec order_of(const NodePtr& order) const {
    if (auto r = exact_constant(order)) return OrderSpec::constant(*r);
    for (const auto& eq : spec_.equations)
      if (same_order(eq.order_expr, order)) return eq.order;
    throw Error(ErrorCode::solve, "only one variable order per problem is supported");
  }

  Series dispatch(const NodePtr& n) {
    switch (n->kind) {
      case NodeKind::constant:
        return zero().constant_like(n->value.bind(spec_.bindings));
      case NodeKind::x:
        return zero().monomial_like(Exponent(1), 0, ParamScalar(1));
      case NodeKind::unknown:
        return unknown(n->index);
      case NodeKind::add: {
        Series s = zero();
        for (const auto& c : n->args) s = add(s, eval(c));
        return s;
      }
      case NodeKind::mul: {
        Series s = eval(n->args[0]);
        for (std::size_t i = 1; i < n->args.size() && !s.empty(); ++i) s = mul(s, eval(n->args[i]));
        return s;
      }
      case NodeKind::pow:
        return power(n);
      case NodeKind::func:
        return function(n);
      case NodeKind::var_exp:
        return var_exp(n);
      case NodeKind::caputo:
        return caputo_apply(offset_free(eval(n->arg())), order_of(n->order), false);
      case NodeKind::caputo_std:
        return caputo_apply(offset_free(eval(n->arg())), order_of(n->order), true);
      case NodeKind::oderiv: {
        Series s = offset_free(eval(n->arg()));
        for (std::int64_t i = 0; i < n->power.num(); ++i) s = diff(s);
        return s;
      }
      case NodeKind::delay: {
        const Series& u = unknown(n->index);
        if (n->lambda.is_zero()) return u.constant_like(eval_partial(u, n->shift));
        return substitute_affine(u, n->lambda, n->shift);
      }
      case NodeKind::volterra:
        return volterra_apply(offset_free(eval(n->arg())), n->mu);
      case NodeKind::fredholm: {
        const ParamScalar c = ParamScalar::variable(n->param).bind(spec_.bindings);
        return scale(eval(n->args[0]), c);
      }
      case NodeKind::compose: {
        const Series& outer = unknown(n->index);
        if (!outer.is_polynomial())
          throw Error(ErrorCode::solve, "composition needs a polynomial iterate; use projection = polynomial");
        return compose(outer, offset_free(eval(n->arg())));
      }
    }
    throw Error(ErrorCode::internal, "unhandled node kind");
  }

  Series power(const NodePtr& n) {
    const Exponent& p = n->power;
    if (n->arg()->kind == NodeKind::x) return zero().monomial_like(p, 0, ParamScalar(1));
    const Series base = eval(n->arg());
    if (p.den() == 1 && p.num() >= 0) return ipow(base, static_cast<unsigned>(p.num()));
    auto c = as_constant(base);
    if (!c || !c->is_constant()) throw Error(ErrorCode::solve, "negative or fractional powers need a constant base");
    const Scalar b = c->constant();
    if (p.den() == 1) {
      if (b.is_zero()) throw domain_error("division by zero");
      return zero().constant_like(ParamScalar(pow(b, static_cast<long>(p.num()))));
    }
    if (b.sign() < 0) throw domain_error("fractional power of a negative constant");
    return zero().constant_like(ParamScalar(Scalar(rilt::pow(b.to_float(), Float(p.rational())))));
  }

  Series function(const NodePtr& n) {
    if (n->name == "pi") return zero().constant_like(ParamScalar(Scalar(Float::pi())));
    if (n->name == "ln" && n->arg()->kind == NodeKind::x) return log_x(zero());
    const Series a = offset_free(eval(n->arg()));
    if (auto c = as_constant(a)) {
      if (!c->is_constant()) throw Error(ErrorCode::solve, n->name + " of a symbolic parameter is not supported");
      return zero().constant_like(ParamScalar(numeric_function(n->name, c->constant())));
    }
    if (n->name == "sin") return expand_function(SeriesFunction::sin, a);
    if (n->name == "cos") return expand_function(SeriesFunction::cos, a);
    if (n->name == "exp") return expand_function(SeriesFunction::exp, a);
    if (n->name == "ln1p") return expand_function(SeriesFunction::ln1p, a);
    throw Error(ErrorCode::solve, n->name + " of a non-constant argument has no series expansion here");
  }

  Series var_exp(const NodePtr& n) {
    const Series beta = offset_free(eval(n->arg()));
    if (spec_.variable_order) {
      // x^(alpha(x) + r) = x^(alpha0 + r) exp(delta ln x) with delta formal.
      const Series diffr = sub(beta, spec_.alpha_series);
      if (auto r = as_constant(diffr); r && r->is_constant() && r->constant().is_exact()) {
        const Exponent e = Exponent::from_rational(spec_.equations.front().order.alpha0 + r->constant().rational());
        if (e < Exponent(0)) throw domain_error("x^alpha factor has a negative leading power");
        const Series dl = zero().monomial_like(Exponent(0), 1, ParamScalar::variable(spec_.delta_index));
        return shift(expand_function(SeriesFunction::exp, dl), e);
      }
    }
    return expand_variable_exponent(beta, 1);
  }
};

Series gate_series(const Series& s, const OrderSpec& order) {
  Series out = s.zero_like();
  for (const auto& [k, c] : s.terms())
    if (gate(k.power, order) == GateResult::keep) out.add_term(k, c);
  return out;
}

Scalar max_abs(const ParamScalar& v) { return v.is_zero() ? Scalar(0) : v.max_abs(); }

// Largest coefficient change relative to max(1, |c|); zero when identical.
bool stabilized(const ProblemSpec& spec, const Series& a, const Series& b, std::optional<Exponent>& moving) {
  std::set<TermKey> keys;
  for (const auto& [k, c] : a.terms()) keys.insert(k);
  for (const auto& [k, c] : b.terms()) keys.insert(k);
  for (const auto& k : keys) {
    const ParamScalar ca = a.coeff(k.power, k.logpow);
    const ParamScalar cb = b.coeff(k.power, k.logpow);
    const ParamScalar d = ca - cb;
    if (d.is_zero()) continue;
    const Scalar mag = max_abs(d);
    if (mag.is_zero()) continue;
    Scalar scale = max_abs(ca);
    if (scale < Scalar(1)) scale = Scalar(1);
    if (!spec.tau.is_zero() && mag <= spec.tau * scale) continue;
    if (!moving || k.power < *moving) moving = k.power;
  }
  return !moving;
}

Float sample_range(const NodePtr& order, const Scalar& domain, bool want_max) {
  NumericEnv env;
  Float best;
  const Float d = domain.to_float();
  for (int i = 0; i <= 200; ++i) {
    const Float x = d * Float(i) / Float(200);
    const Float v = eval_numeric(order, x, env);
    if (i == 0 || (want_max ? v > best : v < best)) best = v;
  }
  return best;
}

std::int64_t lattice_of(const ProblemSpec& spec) {
  std::int64_t q = 1;
  auto take = [&](std::int64_t d) { q = lcm_checked(q, d); };
  for (const auto& eq : spec.equations) {
    take(static_cast<std::int64_t>(eq.order.alpha0.get_den().get_si()));
    for (const NodePtr& root : {eq.standard, eq.natural})
      walk(root, [&](const NodePtr& n) {
        if (n->kind == NodeKind::pow && n->arg()->kind == NodeKind::x) take(n->power.den());
        if (n->kind == NodeKind::volterra) take(static_cast<std::int64_t>(n->mu.get_den().get_si()));
      });
  }
  if (spec.variable_order) take(spec.space->weights.at(spec.delta_index).den());
  return q;
}

ParamScalar integrate_unit(const Series& s) {
  // int_0^1 x^p ln^r x dx = (-1)^r r! / (p + 1)^(r + 1)
  ParamScalar total;
  for (const auto& [k, c] : s.terms()) {
    const Scalar p1(k.power.rational() + 1);
    Scalar v = factorial(k.logpow) / pow(p1, static_cast<long>(k.logpow + 1));
    if (k.logpow % 2) v = -v;
    total += c * v;
  }
  return total;
}

Scalar tolerance(const ProblemSpec& spec) {
  PrecisionScope ps({spec.precision, current_precision().guard});
  return Scalar(Float(1000) * pow10(-static_cast<long>(spec.precision) + 5));
}

}  // namespace

std::vector<std::size_t> ProblemSpec::free_params() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < bindings.size(); ++i)
    if (i != delta_index && !bindings[i]) out.push_back(i);
  return out;
}

ProblemSpec build_spec(const Problem& pb, const SolveOptions& opts) {
  if (pb.kind != ProblemKind::ivp) throw Error(ErrorCode::usage, "problem '" + pb.name + "' is not an initial value problem");
  ProblemSpec spec;
  spec.name = pb.name;
  spec.names = pb.names();
  spec.precision = opts.precision.value_or(pb.solver.precision);
  if (spec.precision < 10) throw Error(ErrorCode::usage, "precision must be at least 10 digits");
  PrecisionScope scope({spec.precision, current_precision().guard});
  const unsigned N = opts.order.value_or(pb.solver.order);
  if (N == 0) throw Error(ErrorCode::usage, "truncation order must be positive");
  spec.backend = opts.backend.value_or(pb.solver.backend);
  spec.projection = opts.projection.value_or(pb.solver.projection);
  spec.max_iterations = opts.max_iterations.value_or(pb.solver.max_iterations.value_or(4 * N));
  spec.domain = pb.solver.domain;
  spec.trunc = {Exponent(N), pb.solver.log_cap.value_or(2 * N + 4)};
  spec.tau = spec.backend == Backend::rational ? Scalar(0) : Scalar(pow10(-static_cast<long>(spec.precision) + 5));

  // Parameters: file defaults, then overrides.
  spec.bindings.assign(pb.params.size() + 1, std::nullopt);
  for (std::size_t i = 0; i < pb.params.size(); ++i) spec.bindings[i] = pb.params[i].value;
  for (const auto& [name, value] : opts.params) {
    auto idx = pb.param_index(name);
    if (!idx) throw Error(ErrorCode::usage, "problem has no parameter '" + name + "'");
    spec.bindings[*idx] = value;
  }
  spec.delta_index = pb.params.size();
  std::vector<std::string> names = spec.names.params;
  names.push_back(kOffsetName);

  // Orders first: the variable order fixes the weight of the formal offset.
  std::vector<NodePtr> orders;
  for (const auto& eq : pb.equations) {
    NodePtr o = bind_params(eq.order, spec.bindings);
    walk(o, [&](const NodePtr& n) {
      if (n->kind == NodeKind::constant && !n->value.is_constant())
        throw Error(ErrorCode::usage, "derivative order depends on a free parameter; bind it with --param");
    });
    if (contains_unknown(o)) throw Error(ErrorCode::usage, "derivative order cannot depend on unknowns");
    orders.push_back(o);
    if (!exact_constant(o)) {
      if (spec.variable_order_expr && !same_order(spec.variable_order_expr, o))
        throw Error(ErrorCode::usage, "only one variable order per problem is supported");
      spec.variable_order_expr = o;
    }
  }
  Exponent weight(0);
  if (spec.variable_order_expr) {
    ProblemSpec probe = spec;
    probe.space = ParamSpace::make(names);
    probe.alpha_series = probe.zero();
    const Series a = eval_rhs(probe, spec.variable_order_expr, {});
    if (a.has_logs() || !a.coeff(Exponent(0)).is_constant() || !a.coeff(Exponent(0)).is_exact())
      throw Error(ErrorCode::usage, "variable order must expand to a power series with exact alpha(0)");
    for (const auto& [k, c] : a.terms())
      if (!c.is_constant()) throw Error(ErrorCode::usage, "variable order depends on a free parameter");
    Series d = a.zero_like();
    for (const auto& [k, c] : a.terms())
      if (k.power > Exponent(0)) d.add_term(k, c);
    if (auto v = d.weighted_valuation()) {
      spec.variable_order = true;
      weight = *v;
    } else {
      spec.variable_order_expr = nullptr;  // constant after all
    }
  }
  std::vector<Exponent> weights(names.size(), Exponent(0));
  weights.back() = weight;
  spec.space = ParamSpace::make(names, weights);
  spec.alpha_series = spec.zero();
  spec.delta_series = spec.zero();
  if (spec.variable_order) {
    spec.alpha_series = eval_rhs(spec, spec.variable_order_expr, {});
    for (const auto& [k, c] : spec.alpha_series.terms())
      if (k.power > Exponent(0)) spec.delta_series.add_term(k, c);
  }

  for (std::size_t i = 0; i < pb.equations.size(); ++i) {
    const auto& eq = pb.equations[i];
    CompiledEquation ce;
    ce.order_expr = orders[i];
    if (auto r = exact_constant(orders[i])) {
      if (*r <= 0) throw Error(ErrorCode::usage, "derivative order must be positive");
      ce.order = OrderSpec::constant(*r);
    } else if (spec.variable_order) {
      const mpq_class a0 = spec.alpha_series.coeff(Exponent(0)).constant().rational();
      ce.order = OrderSpec::variable(a0, spec.delta_series, spec.delta_index, sample_range(orders[i], spec.domain, false),
                                     sample_range(orders[i], spec.domain, true));
    } else {
      const Series a = eval_rhs(spec, orders[i], {});
      ce.order = OrderSpec::constant(a.coeff(Exponent(0)).constant().rational());
      ce.order_expr = make_const(ParamScalar(Scalar(ce.order.alpha0)));
    }
    for (const auto& ic : pb.unknowns[i].ics) ce.ics.push_back(ic.bind(spec.bindings));
    if (ce.ics.size() != ce.order.ic_count())
      throw Error(ErrorCode::usage, "order " + ce.order.str() + " needs " + std::to_string(ce.order.ic_count()) +
                                        " initial condition(s) for '" + pb.unknowns[i].name + "', found " +
                                        std::to_string(ce.ics.size()));
    ce.natural = bind_params(eq.rhs, spec.bindings);
    ce.standard = normalize(ce.natural, ce.order_expr);
    std::tie(ce.forcing, ce.rest) = split_forcing(ce.standard, ce.order_expr);
    walk(ce.standard, [&](const NodePtr& n) {
      if (n->kind == NodeKind::fredholm && !spec.bindings[n->param]) spec.fredholm.push_back({n->param, n->args[1]});
    });
    spec.equations.push_back(std::move(ce));
  }
  for (const auto& c : pb.constraints) spec.constraints.push_back({c.unknown, c.at, c.value.bind(spec.bindings)});
  for (const auto& e : pb.benchmark.exact) spec.exact.push_back(e ? bind_params(e, spec.bindings) : nullptr);
  spec.grid = pb.benchmark.grid;
  spec.lattice = lattice_of(spec);
  return spec;
}

Series ic_series(const ProblemSpec& spec, std::size_t unknown) {
  const auto& ics = spec.equations.at(unknown).ics;
  Series s = spec.zero();
  for (std::size_t k = 0; k < ics.size(); ++k)
    s.add_term({Exponent(static_cast<std::int64_t>(k)), 0}, ics[k].bind(spec.bindings) * (Scalar(1) / factorial(static_cast<unsigned>(k))));
  return s;
}

Series eval_rhs(const ProblemSpec& spec, const NodePtr& node, const std::vector<Series>& current) {
  return Evaluator(spec, current).eval(node);
}

Series resolve_order_offset(const ProblemSpec& spec, const Series& s) {
  if (!spec.variable_order) return s;
  bool has = false;
  for (const auto& [k, c] : s.terms())
    if (c.degree(spec.delta_index) > 0) {
      has = true;
      break;
    }
  return has ? substitute_param(s, spec.delta_index, spec.delta_series) : s;
}

namespace {

std::vector<Series> forcing_series(const ProblemSpec& spec) {
  std::vector<Series> out;
  for (const auto& eq : spec.equations)
    out.push_back(eq.forcing ? gate_series(resolve_order_offset(spec, eval_rhs(spec, eq.forcing, {})), eq.order) : spec.zero());
  return out;
}

std::vector<Series> iterate_with(const ProblemSpec& spec, const std::vector<Series>& current, const std::vector<Series>& forcing) {
  std::vector<Series> next;
  for (std::size_t i = 0; i < spec.dimension(); ++i) {
    const auto& eq = spec.equations[i];
    Series u = add(ic_series(spec, i), forcing[i]);
    const Series a = eval_rhs(spec, eq.rest, current);
    u = add(u, resolve_order_offset(spec, rilt_kernel_apply(a, eq.order)));
    if (spec.projection == Projection::polynomial) u = polynomial_part(u);
    if (spec.backend == Backend::floating) u = floated(u);
    next.push_back(std::move(u));
  }
  return next;
}

}  // namespace

std::vector<Series> iterate_once(const ProblemSpec& spec, const std::vector<Series>& current) {
  PrecisionScope scope({spec.precision, current_precision().guard});
  return iterate_with(spec, current, forcing_series(spec));
}

SolveReport solve_fixed_point(const ProblemSpec& spec) {
  PrecisionScope scope({spec.precision, current_precision().guard});
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<Series> forcing = forcing_series(spec);
  std::vector<Series> u;
  for (std::size_t i = 0; i < spec.dimension(); ++i) {
    Series s = ic_series(spec, i);
    u.push_back(spec.backend == Backend::floating ? floated(s) : s);
  }
  SolveReport rep;
  bool done = false;
  std::optional<Exponent> moving;
  for (unsigned it = 1; it <= spec.max_iterations && !done; ++it) {
    std::vector<Series> next = iterate_with(spec, u, forcing);
    moving.reset();
    done = true;
    for (std::size_t i = 0; i < u.size(); ++i) done = stabilized(spec, next[i], u[i], moving) && done;
    u = std::move(next);
    rep.iterations = it;
  }
  if (!done)
    throw Error(ErrorCode::solve, "iteration did not stabilize within " + std::to_string(spec.max_iterations) +
                                      " iterations; lowest moving power x^" + (moving ? moving->str() : std::string("?")));
  rep.solution = std::move(u);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

std::vector<Series> residual(const ProblemSpec& spec, const std::vector<Series>& solution) {
  PrecisionScope scope({spec.precision, current_precision().guard});
  std::vector<Series> out;
  for (std::size_t i = 0; i < spec.dimension(); ++i) {
    const auto& eq = spec.equations[i];
    Series u = solution.at(i);
    if (eq.forcing) u = sub(u, resolve_order_offset(spec, eval_rhs(spec, eq.forcing, {})));
    const Series lhs = caputo_apply(u, eq.order, true);
    const Series rhs = eval_rhs(spec, eq.rest, solution);
    out.push_back(resolve_order_offset(spec, sub(lhs, rhs)));
  }
  return out;
}

Scalar residual_max(const ProblemSpec& spec, const std::vector<Series>& res) {
  Scalar m(0);
  for (const auto& r : res) {
    const Scalar v = r.max_abs_coeff(spec.trunc.power_cap);
    if (v > m) m = v;
  }
  return m;
}

std::vector<Scalar> real_roots(const std::vector<Scalar>& coeffs_in) {
  std::vector<Scalar> c = coeffs_in;
  Scalar biggest(0);
  for (const auto& v : c)
    if (v.abs() > biggest) biggest = v.abs();
  if (biggest.is_zero()) throw Error(ErrorCode::solve, "parameter equation vanishes identically; the parameter is undetermined");
  const Scalar negligible = biggest * Scalar(pow10(-static_cast<long>(current_precision().digits) + 5));
  while (!c.empty() && (c.back().is_zero() || (!c.back().is_exact() && c.back().abs() <= negligible))) c.pop_back();
  const std::size_t deg = c.size() - 1;
  if (deg == 0) return {};
  if (deg == 1) return {-c[0] / c[1]};
  if (deg == 2) {
    const Scalar disc = c[1] * c[1] - Scalar(4) * c[2] * c[0];
    if (disc.sign() < 0) return {};
    Scalar root;
    if (disc.is_exact() && mpz_perfect_square_p(disc.rational().get_num_mpz_t()) &&
        mpz_perfect_square_p(disc.rational().get_den_mpz_t())) {
      mpz_class n, d;
      mpz_sqrt(n.get_mpz_t(), disc.rational().get_num_mpz_t());
      mpz_sqrt(d.get_mpz_t(), disc.rational().get_den_mpz_t());
      root = Scalar(mpq_class(n, d));
    } else {
      root = Scalar(sqrt(disc.to_float()));
    }
    std::vector<Scalar> r{(-c[1] - root) / (Scalar(2) * c[2]), (-c[1] + root) / (Scalar(2) * c[2])};
    if (r[0] == r[1]) r.pop_back();
    std::sort(r.begin(), r.end(), [](const Scalar& a, const Scalar& b) { return a < b; });
    return r;
  }
  // Sweep for sign changes and near-touching minima, then polish with Newton.
  std::vector<Float> cf;
  for (const auto& v : c) cf.push_back(v.to_float());
  auto p = [&](const Float& t) {
    Float s(0);
    for (std::size_t k = cf.size(); k-- > 0;) s = s * t + cf[k];
    return s;
  };
  auto dp = [&](const Float& t) {
    Float s(0);
    for (std::size_t k = cf.size(); k-- > 1;) s = s * t + cf[k] * Float(static_cast<long>(k));
    return s;
  };
  const Float eps = pow10(-static_cast<long>(current_precision().digits));
  auto polish = [&](Float t) {
    for (int i = 0; i < 200; ++i) {
      const Float d = dp(t);
      if (d.is_zero()) break;
      const Float step = p(t) / d;
      t -= step;
      if (abs(step) <= eps * std::max(Float(1), abs(t))) break;
    }
    return t;
  };
  std::vector<Float> found;
  const int samples = 8000;
  const Float lo(-100), hi(100);
  Float prev_t = lo, prev_v = p(lo);
  for (int i = 1; i <= samples; ++i) {
    const Float t = lo + (hi - lo) * Float(i) / Float(samples);
    const Float v = p(t);
    if (v.is_zero() || prev_v.sign() * v.sign() < 0) {
      Float a = prev_t, b = t, fa = prev_v;
      for (int k = 0; k < 80; ++k) {
        const Float m = (a + b) / Float(2);
        const Float fm = p(m);
        if (fa.sign() * fm.sign() <= 0) {
          b = m;
        } else {
          a = m;
          fa = fm;
        }
      }
      found.push_back(polish((a + b) / Float(2)));
    }
    prev_t = t;
    prev_v = v;
  }
  std::sort(found.begin(), found.end(), [](const Float& a, const Float& b) { return a < b; });
  std::vector<Scalar> out;
  for (const auto& f : found)
    if (out.empty() || abs(f - out.back().to_float()) > Float::parse("1e-20") * std::max(Float(1), abs(f))) out.emplace_back(f);
  return out;
}

namespace {

// Defect of the parameter equations (constraints, Fredholm consistency) on a
// solution with every parameter bound.
Scalar consistency_defect(const ProblemSpec& spec, const std::vector<Series>& sol) {
  Scalar worst(0);
  for (const auto& c : spec.constraints) {
    const Series& u = sol.at(c.unknown);
    if (!(c.at.is_zero()) && !u.is_polynomial()) continue;
    const ParamScalar v = eval_partial(u, c.at, spec.bindings) - c.value.bind(spec.bindings);
    if (!v.is_constant()) throw Error(ErrorCode::solve, "constraint still depends on a free parameter");
    worst = std::max(worst, v.constant().abs(), [](const Scalar& a, const Scalar& b) { return a < b; });
  }
  for (const auto& f : spec.fredholm) {
    const Series g = resolve_order_offset(spec, eval_rhs(spec, f.integrand, sol));
    const ParamScalar v = ParamScalar::variable(f.param).bind(spec.bindings) - integrate_unit(g).bind(spec.bindings);
    if (!v.is_constant()) throw Error(ErrorCode::solve, "Fredholm consistency still depends on a free parameter");
    worst = std::max(worst, v.constant().abs(), [](const Scalar& a, const Scalar& b) { return a < b; });
  }
  return worst;
}

}  // namespace

SolveReport resolve_parameters(const ProblemSpec& spec, SolveReport report) {
  PrecisionScope scope({spec.precision, current_precision().guard});
  std::set<std::size_t> wanted;
  for (const auto& f : spec.fredholm) wanted.insert(f.param);
  if (!spec.constraints.empty()) {
    for (const auto& c : spec.constraints)
      for (const auto& [k, v] : report.solution.at(c.unknown).terms())
        for (const auto& [m, s] : v.terms())
          for (std::size_t i = 0; i < m.size(); ++i)
            if (m[i] && i != spec.delta_index) wanted.insert(i);
  }
  if (wanted.empty()) return report;
  if (wanted.size() > 1) throw Error(ErrorCode::solve, "only one free parameter can be resolved per problem");
  const std::size_t param = *wanted.begin();
  const std::string pname = spec.names.params.at(param);

  // Primary equation: a boundary constraint, else Fredholm consistency, else
  // the lowest nonvanishing residual coefficient.
  ParamScalar equation;
  bool have = false;
  for (const auto& c : spec.constraints) {
    const Series& u = report.solution.at(c.unknown);
    if (!c.at.is_zero() && !u.is_polynomial())
      throw Error(ErrorCode::solve, "boundary evaluation away from 0 needs an exactly polynomial solution; use projection = polynomial");
    const ParamScalar v = eval_partial(u, c.at, spec.bindings) - c.value;
    if (v.degree(param) > 0) {
      equation = v;
      have = true;
      break;
    }
  }
  if (!have && !spec.fredholm.empty()) {
    const auto& f = spec.fredholm.front();
    const Series g = resolve_order_offset(spec, eval_rhs(spec, f.integrand, report.solution));
    equation = ParamScalar::variable(f.param) - integrate_unit(g);
    have = true;
  }
  if (!have) {
    for (const auto& r : residual(spec, report.solution))
      for (const auto& [k, c] : r.terms())
        if (c.degree(param) > 0) {
          equation = c;
          have = true;
          break;
        }
  }
  if (!have) throw Error(ErrorCode::solve, "no equation determines parameter '" + pname + "'");
  std::vector<Scalar> coeffs;
  for (const auto& [d, part] : equation.split_by(param)) {
    if (!part.is_constant()) throw Error(ErrorCode::solve, "parameter equation mixes several free parameters");
    if (coeffs.size() <= d) coeffs.resize(d + 1, Scalar(0));
    coeffs[d] = part.constant();
  }
  const std::vector<Scalar> roots = real_roots(coeffs);
  if (roots.empty()) throw Error(ErrorCode::solve, "parameter equation for '" + pname + "' has no real root");

  const Scalar tol = tolerance(spec);
  std::optional<std::size_t> best;
  std::vector<ParamRoot> out;
  for (const auto& r : roots) {
    ProblemSpec bound = spec;
    bound.bindings[param] = r;
    ParamRoot pr{pname, r, Scalar(0), false, false};
    try {
      const SolveReport at_n = solve_fixed_point(bound);
      const auto res = residual(bound, at_n.solution);
      const Scalar defect = std::max(residual_max(bound, res), consistency_defect(bound, at_n.solution),
                                     [](const Scalar& a, const Scalar& b) { return a < b; });
      pr.admissible = defect <= tol;
      if (pr.admissible) {
        ProblemSpec wide = bound;
        wide.trunc.power_cap = Exponent(2) * bound.trunc.power_cap;
        wide.trunc.log_cap = 2 * bound.trunc.log_cap;
        wide.max_iterations = 2 * bound.max_iterations;
        const SolveReport at_2n = solve_fixed_point(wide);
        pr.score = spec.constraints.empty() && spec.fredholm.empty() ? residual_max(wide, residual(wide, at_2n.solution))
                                                                     : consistency_defect(wide, at_2n.solution);
      }
    } catch (const Error&) {
      pr.admissible = false;
    }
    out.push_back(pr);
    if (out.back().admissible && (!best || out.back().score < out[*best].score)) best = out.size() - 1;
  }
  if (!best) throw Error(ErrorCode::solve, "no admissible root for parameter '" + pname + "'");
  out[*best].chosen = true;
  ProblemSpec bound = spec;
  bound.bindings[param] = out[*best].value;
  SolveReport final_rep = solve_fixed_point(bound);
  final_rep.iterations += report.iterations;
  final_rep.roots = std::move(out);
  return final_rep;
}

SolveReport solve(const ProblemSpec& spec) {
  PrecisionScope scope({spec.precision, current_precision().guard});
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport rep = solve_fixed_point(spec);
  rep = resolve_parameters(spec, std::move(rep));
  ProblemSpec bound = spec;
  for (const auto& r : rep.roots)
    if (r.chosen) bound.bindings[*spec.space->index_of(r.param)] = r.value;
  rep.residual = residual(bound, rep.solution);
  rep.residual_max = residual_max(bound, rep.residual);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

Trajectory step_solve(const Problem& pb_in, const SolveOptions& opts, const StepOptions& step) {
  if (step.dt.sign() <= 0) throw Error(ErrorCode::usage, "--dt must be positive");
  if (step.until.sign() < 0) throw Error(ErrorCode::usage, "--until must be non-negative");
  Problem pb = pb_in;
  bool clock = false;
  for (const auto& eq : pb.equations)
    if (contains_x(eq.rhs)) clock = true;
  const std::size_t d = pb.unknowns.size();
  if (clock) {
    // Non-autonomous: carry the time as an extra unknown s' = 1.
    for (auto& eq : pb.equations) eq.rhs = replace(eq.rhs, make_x(), make_unknown(d));
    pb.unknowns.push_back({"%clock", {ParamScalar(0)}});
    pb.equations.push_back({d, make_const(ParamScalar(1)), make_const(ParamScalar(1))});
  }
  SolveOptions o = opts;
  o.backend = Backend::floating;
  ProblemSpec spec = build_spec(pb, o);
  PrecisionScope scope({spec.precision, current_precision().guard});
  for (const auto& eq : spec.equations)
    if (!(eq.order.alpha0 == 1) || eq.order.is_variable()) throw Error(ErrorCode::usage, "step_solve needs a first-order system");
  const Float tail_tol = step.tail_tolerance.value_or(pow10(-static_cast<long>(spec.precision) / 3));

  const Scalar nsteps_q = step.until / step.dt;
  long nsteps;
  if (nsteps_q.is_exact() && nsteps_q.is_integer()) {
    nsteps = nsteps_q.rational().get_num().get_si();
  } else {
    const double v = nsteps_q.to_float().to_double();
    nsteps = std::lround(v);
    if (std::abs(v - static_cast<double>(nsteps)) > 1e-9) throw Error(ErrorCode::usage, "--until must be a multiple of --dt");
  }
  Trajectory tr;
  for (std::size_t i = 0; i < d; ++i) tr.names.push_back(pb.unknowns[i].name);
  tr.dt = step.dt;
  tr.local_order = static_cast<unsigned>(spec.trunc.power_cap.num());
  std::vector<Scalar> state;
  for (std::size_t i = 0; i < spec.dimension(); ++i) {
    const ParamScalar& ic = spec.equations[i].ics.at(0);
    if (!ic.is_constant()) throw Error(ErrorCode::usage, "stepping needs numeric initial conditions; bind parameters with --param");
    state.push_back(ic.constant());
  }
  auto record = [&](long k) {
    tr.t.push_back(step.dt * Scalar(k));
    tr.state.emplace_back(state.begin(), state.begin() + static_cast<std::ptrdiff_t>(d));
  };
  record(0);
  const Scalar h(step.dt.to_float());
  for (long k = 0; k < nsteps; ++k) {
    if (clock) state[d] = step.dt * Scalar(k);
    for (std::size_t i = 0; i < spec.dimension(); ++i) spec.equations[i].ics = {ParamScalar(state[i])};
    const SolveReport rep = solve_fixed_point(spec);
    for (std::size_t i = 0; i < spec.dimension(); ++i) {
      const Series& u = rep.solution[i];
      if (!u.empty()) {
        const auto& [key, c] = *u.terms().rbegin();
        if (key.power > Exponent(0)) {
          const Float mag = abs(c.constant().to_float()) * pow(h.to_float(), Float(key.power.rational()));
          if (mag > tail_tol)
            throw Error(ErrorCode::solve, "local series does not converge at dt: last term " + mag.str(6) + " exceeds " +
                                              tail_tol.str(3) + " at t = " + (step.dt * Scalar(k)).to_float().str(8));
        }
      }
      state[i] = eval(u, h, spec.bindings);
    }
    record(k + 1);
  }
  return tr;
}

ConvergenceEstimate convergence_probe(const Problem& pb, const SolveOptions& opts, const Scalar& at, const std::vector<unsigned>& levels) {
  if (levels.size() < 4) throw Error(ErrorCode::usage, "convergence probe needs at least 4 truncation levels");
  if (at.sign() <= 0) throw Error(ErrorCode::usage, "probe point must be positive");
  ProblemSpec base = build_spec(pb, opts);
  PrecisionScope scope({base.precision, current_precision().guard});
  Float reference;
  if (!base.exact.empty() && base.exact[0]) {
    NumericEnv env;
    for (std::size_t i = 0; i < base.bindings.size(); ++i)
      env.params.push_back(base.bindings[i] ? std::optional<Float>(base.bindings[i]->to_float()) : std::nullopt);
    env.exact = base.exact;
    reference = eval_numeric(base.exact[0], at.to_float(), env);
  } else {
    SolveOptions o = opts;
    o.order = 2 * *std::max_element(levels.begin(), levels.end());
    const SolveReport rep = solve(build_spec(pb, o));
    reference = eval(rep.solution[0], at, base.bindings).to_float();
  }
  ConvergenceEstimate est;
  est.levels = levels;
  const Float floor = pow10(-static_cast<long>(base.precision) + 5) * std::max(Float(1), abs(reference));
  std::vector<double> xs, ys;
  for (unsigned n : levels) {
    SolveOptions o = opts;
    o.order = n;
    ProblemSpec spec = build_spec(pb, o);
    const SolveReport rep = solve(spec);
    Bindings b = spec.bindings;
    for (const auto& r : rep.roots)
      if (r.chosen) b[*spec.space->index_of(r.param)] = r.value;
    const Float err = abs(eval(rep.solution[0], at, b).to_float() - reference);
    est.errors.push_back(err);
    if (err > floor) {
      xs.push_back(static_cast<double>(n));
      ys.push_back(std::log(err.to_double()));
    } else {
      est.saturated = true;
    }
  }
  if (xs.size() < 4 && !est.saturated) throw Error(ErrorCode::solve, "fewer than 4 usable truncation levels");
  if (xs.size() >= 2) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    if (slope >= 0 && !est.saturated) throw Error(ErrorCode::solve, "errors do not decrease with the truncation level");
    est.M = Float::parse(std::to_string(std::exp(intercept)));
    est.ratio = Float::parse(std::to_string(std::exp(slope)));
    est.beta = Float::parse(std::to_string(std::log(at.to_float().to_double()) - slope));
    est.tail_bound = *est.M * pow(*est.ratio, static_cast<long>(xs.back()));
  }
  return est;
}

}  // namespace rilt
