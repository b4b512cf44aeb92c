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

#ifndef RILT_EXPRESSION_HPP
#define RILT_EXPRESSION_HPP

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "rilt/exponent.hpp"
#include "rilt/param_scalar.hpp"
#include "rilt/scalar.hpp"

namespace rilt {

enum class NodeKind {
  constant,
  x,
  unknown,
  add,
  mul,
  pow,
  func,
  var_exp,
  caputo,
  caputo_std,  // x^alpha D^alpha f; produced by normalization only
  oderiv,
  delay,
  volterra,
  fredholm,
  compose,
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// Expression tree node. Build nodes through the make_* helpers: they keep
/// Add and Mul flat and fold constant factors, which is the canonical shape
/// the parser produces.
struct Node {
  NodeKind kind = NodeKind::constant;
  ParamScalar value;          // constant
  std::size_t index = 0;      // unknown, delay, compose
  std::vector<NodePtr> args;  // operands; unary nodes use args[0]
  Exponent power;             // pow exponent; ODeriv order in num()
  std::string name;           // func name, fredholm parameter
  std::size_t param = 0;      // fredholm parameter index
  NodePtr order;              // caputo order expression
  Scalar lambda;              // delay: u(lambda*x + shift)
  Scalar shift;
  mpq_class mu;               // volterra kernel exponent

  const NodePtr& arg() const { return args.at(0); }
};

NodePtr make_const(ParamScalar v);
NodePtr make_x();
NodePtr make_unknown(std::size_t index);
NodePtr make_add(std::vector<NodePtr> terms);
NodePtr make_mul(std::vector<NodePtr> factors);
NodePtr make_neg(const NodePtr& a);
NodePtr make_sub(const NodePtr& a, const NodePtr& b);
NodePtr make_pow(const NodePtr& base, const Exponent& p);
/// Functions: sin cos exp ln ln1p tan tanh atan gamma sqrt; "pi" takes no argument.
NodePtr make_func(const std::string& name, NodePtr arg);
NodePtr make_var_exp(const NodePtr& beta);
/// Caputo derivative; an integer constant order becomes an ordinary derivative.
NodePtr make_caputo(const NodePtr& order, const NodePtr& f);
NodePtr make_caputo_std(const NodePtr& order, const NodePtr& f);
NodePtr make_oderiv(const NodePtr& f, unsigned n);
NodePtr make_delay(std::size_t unknown, Scalar lambda, Scalar shift);
NodePtr make_volterra(const mpq_class& mu, const NodePtr& f);
/// Fredholm ansatz param*basis; `integrand` is the z-integrand over [0, 1]
/// whose integral must equal the parameter.
NodePtr make_fredholm(const std::string& name, std::size_t param, const NodePtr& basis, const NodePtr& integrand);
/// u(arg): an unknown, a delay when arg is affine in x, else a composition.
NodePtr make_compose(std::size_t unknown, const NodePtr& arg);

bool is_function_name(const std::string& name);
bool structurally_equal(const NodePtr& a, const NodePtr& b);
std::size_t depth(const NodePtr& n);
bool contains_unknown(const NodePtr& n);
bool contains_x(const NodePtr& n);
/// True when the node is free of x and unknowns.
bool is_constant_valued(const NodePtr& n);
/// Constant value of a folded Const node, or nullptr.
const ParamScalar* const_value(const NodePtr& n);

/// Names used when printing.
struct PrintNames {
  std::string variable = "x";
  std::vector<std::string> unknowns;
  std::vector<std::string> params;
};

/// Prints in the input grammar; parse(print(n)) == n for canonical trees
/// without normalization-only nodes.
std::string print(const NodePtr& n, const PrintNames& names);

/// Symbolic d/dx for closed-form expressions (no unknowns or operators).
NodePtr differentiate(const NodePtr& n);
/// Binds parameters inside constant nodes.
NodePtr bind_params(const NodePtr& n, const std::vector<std::optional<Scalar>>& values);
/// Replaces every occurrence of `what` (structurally) with `with`.
NodePtr replace(const NodePtr& n, const NodePtr& what, const NodePtr& with);

}  // namespace rilt

#endif  // RILT_EXPRESSION_HPP
