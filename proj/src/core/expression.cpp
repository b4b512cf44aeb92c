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

#include "rilt/expression.hpp"

#include <algorithm>
#include <set>

#include "rilt/error.hpp"

namespace rilt {

namespace {

const std::set<std::string> kFunctions = {"sin", "cos", "exp", "ln", "ln1p", "tan", "tanh", "atan", "gamma", "sqrt", "pi"};

std::shared_ptr<Node> fresh(NodeKind k) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  return n;
}

bool is_one(const ParamScalar& v) { return v.is_constant() && v.constant() == Scalar(1) && v.constant().is_exact(); }

}  // namespace

bool is_function_name(const std::string& name) { return kFunctions.count(name) != 0; }

const ParamScalar* const_value(const NodePtr& n) { return n && n->kind == NodeKind::constant ? &n->value : nullptr; }

NodePtr make_const(ParamScalar v) {
  auto n = fresh(NodeKind::constant);
  n->value = std::move(v);
  return n;
}

NodePtr make_x() { return fresh(NodeKind::x); }

NodePtr make_unknown(std::size_t index) {
  auto n = fresh(NodeKind::unknown);
  n->index = index;
  return n;
}

NodePtr make_add(std::vector<NodePtr> terms) {
  std::vector<NodePtr> flat;
  std::optional<std::size_t> cpos;
  ParamScalar csum;
  for (auto& t : terms) {
    std::vector<NodePtr> parts = t->kind == NodeKind::add ? t->args : std::vector<NodePtr>{t};
    for (auto& p : parts) {
      if (p->kind == NodeKind::constant) {
        if (!cpos) {
          cpos = flat.size();
          flat.push_back(nullptr);
        }
        csum += p->value;
      } else {
        flat.push_back(p);
      }
    }
  }
  if (cpos) {
    if (csum.is_zero() && flat.size() > 1)
      flat.erase(flat.begin() + static_cast<std::ptrdiff_t>(*cpos));
    else
      flat[*cpos] = make_const(csum);
  }
  if (flat.empty()) return make_const(ParamScalar());
  if (flat.size() == 1) return flat.front();
  auto n = fresh(NodeKind::add);
  n->args = std::move(flat);
  return n;
}

NodePtr make_mul(std::vector<NodePtr> factors) {
  std::vector<NodePtr> flat;
  ParamScalar c(1);
  for (auto& f : factors) {
    std::vector<NodePtr> parts = f->kind == NodeKind::mul ? f->args : std::vector<NodePtr>{f};
    for (auto& p : parts) {
      if (p->kind == NodeKind::constant)
        c = c * p->value;
      else
        flat.push_back(p);
    }
  }
  if (c.is_zero()) return make_const(ParamScalar());
  if (!is_one(c) || flat.empty()) flat.insert(flat.begin(), make_const(c));
  if (flat.size() == 1) return flat.front();
  auto n = fresh(NodeKind::mul);
  n->args = std::move(flat);
  return n;
}

NodePtr make_neg(const NodePtr& a) { return make_mul({make_const(ParamScalar(-1)), a}); }

NodePtr make_sub(const NodePtr& a, const NodePtr& b) { return make_add({a, make_neg(b)}); }

NodePtr make_pow(const NodePtr& base, const Exponent& p) {
  if (p == Exponent(1)) return base;
  if (p == Exponent(0)) return make_const(ParamScalar(1));
  if (base->kind == NodeKind::constant && p.den() == 1) {
    const ParamScalar& v = base->value;
    if (v.is_constant()) {
      const Scalar s = v.constant();
      if (s.is_zero() && p.num() < 0) throw domain_error("zero raised to a negative power");
      return make_const(ParamScalar(pow(s, static_cast<long>(p.num()))));
    }
    if (p.num() < 0) throw domain_error("division by a symbolic parameter is not supported");
    ParamScalar r(1);
    for (std::int64_t i = 0; i < p.num(); ++i) r = r * v;
    return make_const(r);
  }
  if (base->kind == NodeKind::pow && base->arg()->kind == NodeKind::x) return make_pow(base->arg(), base->power * p);
  auto n = fresh(NodeKind::pow);
  n->args = {base};
  n->power = p;
  return n;
}

NodePtr make_func(const std::string& name, NodePtr arg) {
  if (!is_function_name(name)) throw domain_error("unknown function '" + name + "'");
  auto n = fresh(NodeKind::func);
  n->name = name;
  if (name != "pi") {
    if (!arg) throw domain_error("function '" + name + "' needs an argument");
    n->args = {std::move(arg)};
  }
  return n;
}

NodePtr make_var_exp(const NodePtr& beta) {
  if (const ParamScalar* v = const_value(beta); v && v->is_constant() && v->constant().is_exact())
    return make_pow(make_x(), Exponent::from_rational(v->constant().rational()));
  auto n = fresh(NodeKind::var_exp);
  n->args = {beta};
  return n;
}

NodePtr make_caputo(const NodePtr& order, const NodePtr& f) {
  if (const ParamScalar* v = const_value(order); v && v->is_constant() && v->constant().is_exact()) {
    const mpq_class& a = v->constant().rational();
    if (a <= 0) throw domain_error("derivative order must be positive");
    if (a.get_den() == 1) return make_oderiv(f, static_cast<unsigned>(a.get_num().get_ui()));
  }
  auto n = fresh(NodeKind::caputo);
  n->order = order;
  n->args = {f};
  return n;
}

NodePtr make_caputo_std(const NodePtr& order, const NodePtr& f) {
  auto n = fresh(NodeKind::caputo_std);
  n->order = order;
  n->args = {f};
  return n;
}

NodePtr make_oderiv(const NodePtr& f, unsigned order) {
  if (order == 0) return f;
  auto n = fresh(NodeKind::oderiv);
  n->power = Exponent(order);
  n->args = {f};
  return n;
}

NodePtr make_delay(std::size_t unknown, Scalar lambda, Scalar shift) {
  if (lambda.is_exact() && lambda == Scalar(1) && shift.is_exact() && shift.is_zero()) return make_unknown(unknown);
  auto n = fresh(NodeKind::delay);
  n->index = unknown;
  n->lambda = std::move(lambda);
  n->shift = std::move(shift);
  return n;
}

NodePtr make_volterra(const mpq_class& mu, const NodePtr& f) {
  if (mu <= 0 || mu >= 1) throw domain_error("Volterra kernel exponent must lie in (0, 1)");
  auto n = fresh(NodeKind::volterra);
  n->mu = mu;
  n->args = {f};
  return n;
}

NodePtr make_fredholm(const std::string& name, std::size_t param, const NodePtr& basis, const NodePtr& integrand) {
  auto n = fresh(NodeKind::fredholm);
  n->name = name;
  n->param = param;
  n->args = {basis, integrand};
  return n;
}

namespace {

std::optional<Scalar> plain_scalar(const NodePtr& n) {
  if (const ParamScalar* v = const_value(n); v && v->is_constant()) return v->constant();
  return std::nullopt;
}

// lambda*x + b with scalar coefficients.
std::optional<std::pair<Scalar, Scalar>> affine(const NodePtr& n) {
  if (n->kind == NodeKind::x) return std::pair{Scalar(1), Scalar(0)};
  if (auto c = plain_scalar(n)) return std::pair{Scalar(0), *c};
  if (n->kind == NodeKind::mul) {
    Scalar k(1);
    std::optional<std::pair<Scalar, Scalar>> lin;
    for (const auto& f : n->args) {
      if (auto c = plain_scalar(f)) {
        k = k * *c;
      } else if (lin || !(lin = affine(f))) {
        return std::nullopt;
      }
    }
    if (!lin) return std::pair{Scalar(0), k};
    return std::pair{k * lin->first, k * lin->second};
  }
  if (n->kind == NodeKind::add) {
    std::pair<Scalar, Scalar> acc{Scalar(0), Scalar(0)};
    for (const auto& t : n->args) {
      auto a = affine(t);
      if (!a) return std::nullopt;
      acc = {acc.first + a->first, acc.second + a->second};
    }
    return acc;
  }
  return std::nullopt;
}

}  // namespace

NodePtr make_compose(std::size_t unknown, const NodePtr& arg) {
  if (auto a = affine(arg)) return make_delay(unknown, a->first, a->second);
  auto n = fresh(NodeKind::compose);
  n->index = unknown;
  n->args = {arg};
  return n;
}

bool structurally_equal(const NodePtr& a, const NodePtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case NodeKind::constant:
      if (!a->value.identical(b->value)) return false;
      break;
    case NodeKind::unknown:
    case NodeKind::compose:
      if (a->index != b->index) return false;
      break;
    case NodeKind::delay:
      if (a->index != b->index || !a->lambda.identical(b->lambda) || !a->shift.identical(b->shift)) return false;
      break;
    case NodeKind::pow:
    case NodeKind::oderiv:
      if (a->power != b->power) return false;
      break;
    case NodeKind::func:
      if (a->name != b->name) return false;
      break;
    case NodeKind::caputo:
    case NodeKind::caputo_std:
      if (!structurally_equal(a->order, b->order)) return false;
      break;
    case NodeKind::volterra:
      if (a->mu != b->mu) return false;
      break;
    case NodeKind::fredholm:
      if (a->name != b->name || a->param != b->param) return false;
      break;
    default:
      break;
  }
  if (a->args.size() != b->args.size()) return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!structurally_equal(a->args[i], b->args[i])) return false;
  return true;
}

std::size_t depth(const NodePtr& n) {
  std::size_t d = 0;
  for (const auto& c : n->args) d = std::max(d, depth(c));
  if (n->order) d = std::max(d, depth(n->order));
  return d + 1;
}

bool contains_unknown(const NodePtr& n) {
  switch (n->kind) {
    case NodeKind::unknown:
    case NodeKind::delay:
    case NodeKind::compose:
      return true;
    default:
      break;
  }
  if (n->kind == NodeKind::fredholm) return contains_unknown(n->args[0]);
  return std::any_of(n->args.begin(), n->args.end(), [](const NodePtr& c) { return contains_unknown(c); });
}

bool contains_x(const NodePtr& n) {
  switch (n->kind) {
    case NodeKind::x:
    case NodeKind::var_exp:
    case NodeKind::caputo:
    case NodeKind::caputo_std:
    case NodeKind::oderiv:
    case NodeKind::volterra:
    case NodeKind::fredholm:
      return true;
    default:
      break;
  }
  return std::any_of(n->args.begin(), n->args.end(), [](const NodePtr& c) { return contains_x(c); });
}

bool is_constant_valued(const NodePtr& n) { return !contains_x(n) && !contains_unknown(n); }

// ---------------------------------------------------------------- printing

namespace {

std::string scalar_text(const Scalar& s) {
  if (s.is_exact()) return s.rational().get_str();
  return s.to_float().str(0);
}

bool plain_literal(const Scalar& s) { return s.is_exact() && s.sign() >= 0 && s.is_integer(); }

std::string monomial_text(const Monomial& m, const Scalar& c, const PrintNames& names) {
  std::string out;
  bool first = true;
  const bool unit = c.is_exact() && c == Scalar(1);
  if (!unit) {
    out = scalar_text(c);
    first = false;
  }
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!m[i]) continue;
    if (!first) out += "*";
    out += i < names.params.size() ? names.params[i] : "p" + std::to_string(i);
    if (m[i] > 1) out += "^" + std::to_string(m[i]);
    first = false;
  }
  return first ? "1" : out;
}

std::string const_text(const ParamScalar& v, const PrintNames& names) {
  if (v.is_zero()) return "0";
  if (v.is_constant()) {
    const Scalar c = v.constant();
    return plain_literal(c) ? scalar_text(c) : "(" + scalar_text(c) + ")";
  }
  std::string body;
  for (const auto& [m, c] : v.terms()) {
    if (!body.empty()) body += " + ";
    body += monomial_text(m, c, names);
  }
  const bool single = v.terms().size() == 1 && v.terms().begin()->second.is_exact() && v.terms().begin()->second == Scalar(1);
  return single ? body : "(" + body + ")";
}

std::string print_at(const NodePtr& n, const PrintNames& names, int level);

std::string atom(const NodePtr& n, const PrintNames& names) { return print_at(n, names, 4); }

std::string print_at(const NodePtr& n, const PrintNames& names, int level) {
  auto wrap = [&](int own, std::string s) { return own < level ? "(" + s + ")" : s; };
  auto uname = [&](std::size_t i) { return i < names.unknowns.size() ? names.unknowns[i] : "u" + std::to_string(i); };
  switch (n->kind) {
    case NodeKind::constant:
      return const_text(n->value, names);
    case NodeKind::x:
      return names.variable;
    case NodeKind::unknown:
      return uname(n->index);
    case NodeKind::add: {
      std::string s;
      for (const auto& c : n->args) s += (s.empty() ? "" : " + ") + print_at(c, names, 2);
      return wrap(1, s);
    }
    case NodeKind::mul: {
      std::string s;
      for (const auto& c : n->args) s += (s.empty() ? "" : "*") + print_at(c, names, 3);
      return wrap(2, s);
    }
    case NodeKind::pow: {
      const Exponent& p = n->power;
      std::string e = p.den() == 1 && p.num() >= 0 ? p.str() : "(" + p.str() + ")";
      return wrap(3, atom(n->arg(), names) + "^" + e);
    }
    case NodeKind::func:
      if (n->name == "pi") return "pi";
      return n->name + "(" + print_at(n->arg(), names, 0) + ")";
    case NodeKind::var_exp:
      return "xpow(" + print_at(n->arg(), names, 0) + ")";
    case NodeKind::caputo:
      return "D(" + print_at(n->arg(), names, 0) + ", " + print_at(n->order, names, 0) + ")";
    case NodeKind::caputo_std:
      return wrap(2, "xpow(" + print_at(n->order, names, 0) + ")*D(" + print_at(n->arg(), names, 0) + ", " +
                         print_at(n->order, names, 0) + ")");
    case NodeKind::oderiv:
      if (n->power == Exponent(1)) return "D(" + print_at(n->arg(), names, 0) + ")";
      return "D(" + print_at(n->arg(), names, 0) + ", " + n->power.str() + ")";
    case NodeKind::delay:
      return "delay(" + uname(n->index) + "; " + scalar_text(n->lambda) + ", " + scalar_text(n->shift) + ")";
    case NodeKind::volterra:
      return "volterra(mu=" + n->mu.get_str() + "; " + print_at(n->arg(), names, 0) + ")";
    case NodeKind::fredholm:
      return "fredholm(param=" + n->name + "; basis=" + print_at(n->args[0], names, 0) +
             "; integrand=" + print_at(n->args[1], names, 0) + ")";
    case NodeKind::compose:
      return uname(n->index) + "(" + print_at(n->arg(), names, 0) + ")";
  }
  throw Error(ErrorCode::internal, "unprintable node");
}

}  // namespace

std::string print(const NodePtr& n, const PrintNames& names) { return print_at(n, names, 0); }

// ---------------------------------------------------------- differentiation

namespace {

NodePtr num(long v) { return make_const(ParamScalar(v)); }

}  // namespace

NodePtr differentiate(const NodePtr& n) {
  if (is_constant_valued(n)) return num(0);
  switch (n->kind) {
    case NodeKind::x:
      return num(1);
    case NodeKind::add: {
      std::vector<NodePtr> t;
      for (const auto& c : n->args) t.push_back(differentiate(c));
      return make_add(std::move(t));
    }
    case NodeKind::mul: {
      std::vector<NodePtr> t;
      for (std::size_t i = 0; i < n->args.size(); ++i) {
        std::vector<NodePtr> f = n->args;
        f[i] = differentiate(f[i]);
        t.push_back(make_mul(std::move(f)));
      }
      return make_add(std::move(t));
    }
    case NodeKind::pow: {
      const Exponent& p = n->power;
      return make_mul({make_const(ParamScalar(Scalar(p.rational()))), make_pow(n->arg(), p - Exponent(1)), differentiate(n->arg())});
    }
    case NodeKind::func: {
      const NodePtr& a = n->arg();
      const NodePtr da = differentiate(a);
      NodePtr outer;
      if (n->name == "sin")
        outer = make_func("cos", a);
      else if (n->name == "cos")
        outer = make_neg(make_func("sin", a));
      else if (n->name == "exp")
        outer = n;
      else if (n->name == "ln")
        outer = make_pow(a, Exponent(-1));
      else if (n->name == "ln1p")
        outer = make_pow(make_add({num(1), a}), Exponent(-1));
      else if (n->name == "tan")
        outer = make_add({num(1), make_pow(n, Exponent(2))});
      else if (n->name == "tanh")
        outer = make_sub(num(1), make_pow(n, Exponent(2)));
      else if (n->name == "atan")
        outer = make_pow(make_add({num(1), make_pow(a, Exponent(2))}), Exponent(-1));
      else
        throw domain_error("cannot differentiate " + n->name + " of a non-constant argument");
      return make_mul({outer, da});
    }
    case NodeKind::var_exp: {
      // d/dx x^b = x^b (b' ln x + b / x)
      const NodePtr& b = n->arg();
      return make_mul({n, make_add({make_mul({differentiate(b), make_func("ln", make_x())}),
                                    make_mul({b, make_pow(make_x(), Exponent(-1))})})});
    }
    default:
      throw domain_error("symbolic differentiation needs a closed-form expression");
  }
}

// ------------------------------------------------------------- rewriting

namespace {

NodePtr rebuild(const NodePtr& n, std::vector<NodePtr> args, NodePtr order) {
  switch (n->kind) {
    case NodeKind::constant:
    case NodeKind::x:
    case NodeKind::unknown:
    case NodeKind::delay:
      return n;
    case NodeKind::add:
      return make_add(std::move(args));
    case NodeKind::mul:
      return make_mul(std::move(args));
    case NodeKind::pow:
      return make_pow(args[0], n->power);
    case NodeKind::func:
      return make_func(n->name, args.empty() ? nullptr : args[0]);
    case NodeKind::var_exp:
      return make_var_exp(args[0]);
    case NodeKind::caputo:
      return make_caputo(order, args[0]);
    case NodeKind::caputo_std:
      return make_caputo_std(order, args[0]);
    case NodeKind::oderiv:
      return make_oderiv(args[0], static_cast<unsigned>(n->power.num()));
    case NodeKind::volterra:
      return make_volterra(n->mu, args[0]);
    case NodeKind::fredholm:
      return make_fredholm(n->name, n->param, args[0], args[1]);
    case NodeKind::compose:
      return make_compose(n->index, args[0]);
  }
  throw Error(ErrorCode::internal, "unknown node kind");
}

template <class F>
NodePtr map_children(const NodePtr& n, F&& f) {
  std::vector<NodePtr> args;
  args.reserve(n->args.size());
  for (const auto& c : n->args) args.push_back(f(c));
  NodePtr order = n->order ? f(n->order) : nullptr;
  return rebuild(n, std::move(args), std::move(order));
}

}  // namespace

NodePtr bind_params(const NodePtr& n, const std::vector<std::optional<Scalar>>& values) {
  if (n->kind == NodeKind::constant) return make_const(n->value.bind(values));
  return map_children(n, [&](const NodePtr& c) { return bind_params(c, values); });
}

NodePtr replace(const NodePtr& n, const NodePtr& what, const NodePtr& with) {
  if (structurally_equal(n, what)) return with;
  return map_children(n, [&](const NodePtr& c) { return replace(c, what, with); });
}

}  // namespace rilt
