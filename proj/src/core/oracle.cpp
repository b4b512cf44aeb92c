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

#include "rilt/oracle.hpp"

#include <chrono>
#include <random>

#include "rilt/error.hpp"
#include "rilt/special.hpp"

namespace rilt {

namespace {

Float quad_tol() {
  const auto digits = static_cast<long>(current_precision().digits);
  return pow10(-std::max(12L, digits - 10));
}

std::vector<std::optional<Scalar>> scalar_params(const NumericEnv& env) {
  std::vector<std::optional<Scalar>> out;
  for (const auto& p : env.params) out.push_back(p ? std::optional<Scalar>(Scalar(*p)) : std::nullopt);
  return out;
}

// Replaces x by `arg` inside a closed-form expression.
NodePtr substitute_x(const NodePtr& n, const NodePtr& arg) {
  switch (n->kind) {
    case NodeKind::constant:
      return n;
    case NodeKind::x:
      return arg;
    case NodeKind::add:
    case NodeKind::mul: {
      std::vector<NodePtr> a;
      for (const auto& c : n->args) a.push_back(substitute_x(c, arg));
      return n->kind == NodeKind::add ? make_add(std::move(a)) : make_mul(std::move(a));
    }
    case NodeKind::pow:
      return make_pow(substitute_x(n->arg(), arg), n->power);
    case NodeKind::func:
      return n->args.empty() ? n : make_func(n->name, substitute_x(n->arg(), arg));
    case NodeKind::var_exp:
      return make_func("exp", make_mul({substitute_x(n->arg(), arg), make_func("ln", arg)}));
    default:
      throw domain_error("exact solutions must be closed-form expressions");
  }
}

NodePtr inline_unknowns(const NodePtr& n, const NumericEnv& env);

NodePtr exact_of(std::size_t i, const NumericEnv& env) {
  if (i >= env.exact.size() || !env.exact[i]) throw Error(ErrorCode::usage, "no closed-form solution for unknown " + std::to_string(i));
  return env.exact[i];
}

NodePtr inline_unknowns(const NodePtr& n, const NumericEnv& env) {
  switch (n->kind) {
    case NodeKind::unknown:
      return exact_of(n->index, env);
    case NodeKind::delay: {
      const NodePtr arg = make_add({make_mul({make_const(ParamScalar(n->lambda)), make_x()}), make_const(ParamScalar(n->shift))});
      return substitute_x(exact_of(n->index, env), arg);
    }
    case NodeKind::compose:
      return substitute_x(exact_of(n->index, env), inline_unknowns(n->arg(), env));
    case NodeKind::constant:
    case NodeKind::x:
      return n;
    case NodeKind::add:
    case NodeKind::mul: {
      std::vector<NodePtr> a;
      for (const auto& c : n->args) a.push_back(inline_unknowns(c, env));
      return n->kind == NodeKind::add ? make_add(std::move(a)) : make_mul(std::move(a));
    }
    case NodeKind::pow:
      return make_pow(inline_unknowns(n->arg(), env), n->power);
    case NodeKind::func:
      return n->args.empty() ? n : make_func(n->name, inline_unknowns(n->arg(), env));
    case NodeKind::var_exp:
      return make_var_exp(inline_unknowns(n->arg(), env));
    case NodeKind::oderiv:
      return make_oderiv(inline_unknowns(n->arg(), env), static_cast<unsigned>(n->power.num()));
    // nested operators are evaluated by nested quadrature
    case NodeKind::caputo:
      return make_caputo(n->order, inline_unknowns(n->arg(), env));
    case NodeKind::caputo_std:
      return make_caputo_std(n->order, inline_unknowns(n->arg(), env));
    case NodeKind::volterra:
      return make_volterra(n->mu, inline_unknowns(n->arg(), env));
    default:
      throw domain_error("operator nodes cannot be nested inside an inlined operand");
  }
}

NodePtr nth_derivative(NodePtr f, unsigned n) {
  for (unsigned i = 0; i < n; ++i) f = differentiate(f);
  return f;
}

Float volterra_numeric(const NodePtr& f, const mpq_class& mu, const Float& x, const NumericEnv& env) {
  if (x.is_zero()) return Float(0);
  const Float m(mu);
  const Float zero(0);
  auto integrand = [&](const Float& z, const Float&, const Float& to_b) { return eval_numeric(f, z, env) * pow(to_b, -m); };
  return tanh_sinh(integrand, zero, x, quad_tol());
}

}  // namespace

Float eval_numeric(const NodePtr& n, const Float& x, const NumericEnv& env) {
  switch (n->kind) {
    case NodeKind::constant: {
      const ParamScalar v = n->value.bind(scalar_params(env));
      if (!v.is_constant()) throw Error(ErrorCode::usage, "numeric evaluation needs values for every parameter");
      return v.constant().to_float();
    }
    case NodeKind::x:
      return x;
    case NodeKind::unknown:
      if (!env.state.empty()) return env.state.at(n->index);
      return eval_numeric(exact_of(n->index, env), x, env);
    case NodeKind::add: {
      Float s(0);
      for (const auto& c : n->args) s += eval_numeric(c, x, env);
      return s;
    }
    case NodeKind::mul: {
      Float s(1);
      for (const auto& c : n->args) s *= eval_numeric(c, x, env);
      return s;
    }
    case NodeKind::pow: {
      const Float b = eval_numeric(n->arg(), x, env);
      if (n->power.den() == 1) return pow(b, static_cast<long>(n->power.num()));
      return pow(b, Float(n->power.rational()));
    }
    case NodeKind::func: {
      if (n->name == "pi") return Float::pi();
      const Float a = eval_numeric(n->arg(), x, env);
      if (n->name == "sin") return sin(a);
      if (n->name == "cos") return cos(a);
      if (n->name == "exp") return exp(a);
      if (n->name == "ln") return log(a);
      if (n->name == "ln1p") return log(Float(1) + a);
      if (n->name == "tan") return tan(a);
      if (n->name == "tanh") return tanh(a);
      if (n->name == "atan") return atan(a);
      if (n->name == "gamma") return gamma(a);
      if (n->name == "sqrt") return sqrt(a);
      throw domain_error("unknown function " + n->name);
    }
    case NodeKind::var_exp: {
      const Float b = eval_numeric(n->arg(), x, env);
      if (x.is_zero()) {
        if (b.sign() > 0) return Float(0);
        if (b.is_zero()) return Float(1);
        throw domain_error("x^beta with beta(0) < 0 is singular at 0");
      }
      return exp(b * log(x));
    }
    case NodeKind::caputo:
    case NodeKind::caputo_std: {
      const Float a = eval_numeric(n->order, x, env);
      Float d = caputo_quadrature(inline_unknowns(n->arg(), env), a, x, env);
      if (n->kind == NodeKind::caputo_std) d *= pow(x, a);
      return d;
    }
    case NodeKind::oderiv:
      if (!env.state.empty() && n->arg()->kind == NodeKind::unknown)
        throw Error(ErrorCode::usage, "derivatives of unknowns are not available in a state evaluation");
      return eval_numeric(nth_derivative(inline_unknowns(n->arg(), env), static_cast<unsigned>(n->power.num())), x, env);
    case NodeKind::delay:
    case NodeKind::compose:
      if (!env.state.empty()) throw Error(ErrorCode::usage, "delayed or composed unknowns need closed-form solutions");
      return eval_numeric(inline_unknowns(n, env), x, env);
    case NodeKind::volterra:
      return volterra_numeric(inline_unknowns(n->arg(), env), n->mu, x, env);
    case NodeKind::fredholm: {
      const Float basis = eval_numeric(n->args[0], x, env);
      if (!env.fredholm_integral) {
        if (n->param >= env.params.size() || !env.params[n->param]) throw Error(ErrorCode::usage, "Fredholm parameter has no value");
        return *env.params[n->param] * basis;
      }
      const NodePtr g = inline_unknowns(n->args[1], env);
      auto integrand = [&](const Float& z, const Float&, const Float&) { return eval_numeric(g, z, env); };
      return basis * tanh_sinh(integrand, Float(0), Float(1), quad_tol());
    }
  }
  throw Error(ErrorCode::internal, "unhandled node in numeric evaluation");
}

Float tanh_sinh(const EndpointIntegrand& f, const Float& a, const Float& b, const Float& tol) {
  const Float len = b - a;
  if (len.is_zero()) return Float(0);
  const Float half_pi = Float::pi() / Float(2);
  const Float tmax(8);
  // Contribution of node t (the weight includes dx/dt).
  auto node = [&](const Float& t) {
    const Float u = half_pi * sinh(t);
    const Float e2 = exp(Float(2) * u);
    const Float to_b = len / (Float(1) + e2);
    const Float from_a_acc = len / (Float(1) + exp(Float(-2) * u));
    const Float c = cosh(u);
    const Float w = half_pi * cosh(t) / (c * c) * len / Float(2);
    const Float xt = u.sign() < 0 ? a + from_a_acc : b - to_b;
    const Float v = f(xt, from_a_acc, to_b);
    if (!v.is_finite()) return Float(0);
    return w * v;
  };
  Float h(1);
  Float sum = node(Float(0));
  for (Float t = h; t <= tmax; t += h) sum += node(t) + node(-t);
  Float prev = sum * h;
  for (int level = 1; level <= 12; ++level) {
    h = h / Float(2);
    for (Float t = h; t <= tmax; t += Float(2) * h) sum += node(t) + node(-t);
    const Float est = sum * h;
    const Float scale = std::max(abs(est), Float::parse("1e-30"));
    if (level >= 3 && abs(est - prev) <= tol * scale) return est;
    prev = est;
  }
  throw Error(ErrorCode::solve, "quadrature did not converge");
}

Float caputo_quadrature(const NodePtr& f, const Float& alpha, const Float& x, const NumericEnv& env) {
  if (alpha.sign() <= 0) throw domain_error("Caputo order must be positive");
  const Float n_f = ceil(alpha);
  const auto n = static_cast<unsigned>(n_f.to_double());
  const NodePtr g = nth_derivative(f, n);
  if (n_f == alpha) return eval_numeric(g, x, env);
  if (x.is_zero()) return Float(0);
  const Float e = n_f - alpha - Float(1);
  auto integrand = [&](const Float& tau, const Float&, const Float& to_b) { return eval_numeric(g, tau, env) * pow(to_b, e); };
  return tanh_sinh(integrand, Float(0), x, quad_tol()) / gamma(n_f - alpha);
}

Trajectory rk4_integrate(const OdeRhs& f, std::vector<Float> y, const Scalar& h, const Scalar& T, std::size_t record_every) {
  if (h.sign() <= 0) throw domain_error("step size must be positive");
  const Scalar steps_q = T / h;
  long steps = 0;
  if (steps_q.is_exact() && steps_q.is_integer()) {
    steps = steps_q.rational().get_num().get_si();
  } else {
    const double s = steps_q.to_float().to_double();
    steps = std::lround(s);
    if (std::abs(s - static_cast<double>(steps)) > 1e-9) throw domain_error("T must be a multiple of the step size");
  }
  if (record_every == 0) record_every = 1;
  Trajectory tr;
  tr.dt = h;
  auto record = [&](long k) {
    tr.t.push_back(h * Scalar(k));
    std::vector<Scalar> s;
    for (const auto& v : y) s.emplace_back(v);
    tr.state.push_back(std::move(s));
  };
  record(0);
  const Float hf = h.to_float();
  const Float half = hf / Float(2);
  const std::size_t d = y.size();
  std::vector<Float> tmp(d);
  for (long k = 0; k < steps; ++k) {
    const Float t = (h * Scalar(k)).to_float();
    const auto k1 = f(t, y);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + half * k1[i];
    const auto k2 = f(t + half, tmp);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + half * k2[i];
    const auto k3 = f(t + half, tmp);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + hf * k3[i];
    const auto k4 = f(t + hf, tmp);
    for (std::size_t i = 0; i < d; ++i) {
      y[i] += hf / Float(6) * (k1[i] + Float(2) * k2[i] + Float(2) * k3[i] + k4[i]);
      if (!y[i].is_finite())
        throw Error(ErrorCode::solve, "RK4 state became non-finite after t = " + (h * Scalar(k)).to_float().str(10));
    }
    if ((k + 1) % static_cast<long>(record_every) == 0 || k + 1 == steps) record(k + 1);
  }
  return tr;
}

OdeRhs ode_rhs(const Problem& pb, const std::vector<std::optional<Float>>& params) {
  std::vector<std::optional<Scalar>> sp;
  for (const auto& p : params) sp.push_back(p ? std::optional<Scalar>(Scalar(*p)) : std::nullopt);
  std::vector<NodePtr> rhs;
  for (const auto& eq : pb.equations) {
    const NodePtr order = bind_params(eq.order, sp);
    const ParamScalar* v = const_value(order);
    if (!v || !v->is_constant() || !(v->constant() == Scalar(1)))
      throw Error(ErrorCode::usage, "the RK4 oracle needs a first-order system");
    rhs.push_back(bind_params(eq.rhs, sp));
  }
  return [rhs, params](const Float& t, const std::vector<Float>& y) {
    NumericEnv env;
    env.params = params;
    env.state = y;
    std::vector<Float> out;
    out.reserve(rhs.size());
    for (const auto& r : rhs) out.push_back(eval_numeric(r, t, env));
    return out;
  };
}

Float ErrorReport::max_error() const {
  Float m(0);
  for (const auto& e : errors)
    if (e > m) m = e;
  return m;
}

ErrorReport score(const std::vector<Float>& candidate, const std::vector<Float>& reference, const std::vector<Scalar>& grid) {
  if (candidate.size() != reference.size() || candidate.size() != grid.size())
    throw Error(ErrorCode::usage, "score needs candidate, reference and grid of equal length");
  const auto t0 = std::chrono::steady_clock::now();
  ErrorReport r;
  r.grid = grid;
  for (std::size_t i = 0; i < grid.size(); ++i) r.errors.push_back(abs(candidate[i] - reference[i]));
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

Float exact_solution_defect(const Problem& pb, const std::vector<std::optional<Float>>& params, unsigned points,
                            std::uint64_t seed) {
  NumericEnv env;
  env.params = params;
  std::vector<std::optional<Scalar>> sp;
  for (const auto& p : params) sp.push_back(p ? std::optional<Scalar>(Scalar(*p)) : std::nullopt);
  for (const auto& e : pb.benchmark.exact) {
    if (!e) throw Error(ErrorCode::usage, "problem '" + pb.name + "' lacks an exact solution for every unknown");
    env.exact.push_back(bind_params(e, sp));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.05, 1.0);
  const Float domain = pb.solver.domain.to_float();
  Float worst(0);
  for (unsigned k = 0; k < points; ++k) {
    const Float x = domain * Float::parse(std::to_string(dist(rng)));
    for (std::size_t i = 0; i < pb.equations.size(); ++i) {
      const auto& eq = pb.equations[i];
      const Float alpha = eval_numeric(bind_params(eq.order, sp), x, env);
      const Float lhs = caputo_quadrature(env.exact[i], alpha, x, env);
      const Float rhs = eval_numeric(bind_params(eq.rhs, sp), x, env);
      const Float defect = abs(lhs - rhs) / std::max(Float(1), abs(rhs));
      if (defect > worst) worst = defect;
    }
  }
  return worst;
}

void ExactRegistry::add(const std::string& name, const Problem& pb, const std::vector<std::optional<Float>>& params) {
  const Float d = exact_solution_defect(pb, params, 5, 20260101);
  if (d > Float::parse("1e-10"))
    throw Error(ErrorCode::acceptance, "exact solution of '" + name + "' fails its self-check (defect " + d.str(6) + ")");
  entries_.push_back({name, d});
}

}  // namespace rilt
