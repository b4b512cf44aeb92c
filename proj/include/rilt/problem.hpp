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

#ifndef RILT_PROBLEM_HPP
#define RILT_PROBLEM_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "rilt/expression.hpp"
#include "rilt/scalar.hpp"

namespace rilt {

enum class Backend { rational, floating };
enum class Projection { none, polynomial };

/// Names visible to the expression parser.
struct ParseContext {
  std::string variable = "x";
  std::vector<std::string> unknowns;
  std::vector<std::string> params;
  std::vector<std::pair<std::string, NodePtr>> defines;
  /// Standalone mode: undeclared identifiers become new unknowns.
  bool auto_unknowns = false;
  std::size_t max_depth = 64;
  /// Byte offset of the text inside a larger document, for diagnostics.
  std::size_t offset = 0;

  PrintNames names() const { return {variable, unknowns, params}; }
};

NodePtr parse_expression(std::string_view text, ParseContext& ctx);
/// Parses with variable x and automatic unknowns.
NodePtr parse_expression(std::string_view text);

struct ParamDecl {
  std::string name;
  std::optional<Scalar> value;  // bound default; free when empty
};

struct UnknownDecl {
  std::string name;
  std::vector<ParamScalar> ics;  // u(0), u'(0), ...
};

struct EquationDecl {
  std::size_t unknown = 0;
  NodePtr order;  // order expression, free of unknowns
  NodePtr rhs;    // natural form: D(u, order) = rhs
};

/// u(at) = value.
struct PointConstraint {
  std::size_t unknown = 0;
  Scalar at;
  ParamScalar value;
};

struct GridSpec {
  Scalar lo{0};
  Scalar hi{1};
  std::size_t count = 101;

  std::vector<Scalar> points() const;
};

struct BenchmarkDecl {
  std::vector<NodePtr> exact;  // per unknown; null when absent
  std::optional<GridSpec> grid;
};

/// Cauchy-Euler equation sum_j a_j x^j y^(j) = sum_i f_i / ln(x)^p_i.
struct EulerDecl {
  std::vector<mpq_class> coefficients;
  std::vector<std::pair<mpq_class, unsigned>> forcing;
};

struct SolverSettings {
  unsigned order = 10;
  unsigned precision = 50;
  Backend backend = Backend::rational;
  std::optional<unsigned> max_iterations;
  Projection projection = Projection::none;
  Scalar domain{1};
  std::optional<unsigned> log_cap;
};

enum class ProblemKind { ivp, euler };

struct Problem {
  std::string name;
  std::string variable = "x";
  ProblemKind kind = ProblemKind::ivp;
  std::vector<ParamDecl> params;
  std::vector<std::pair<std::string, NodePtr>> defines;
  std::vector<UnknownDecl> unknowns;
  std::vector<EquationDecl> equations;  // indexed by unknown
  SolverSettings solver;
  std::vector<PointConstraint> constraints;
  BenchmarkDecl benchmark;
  std::optional<EulerDecl> euler;

  PrintNames names() const;
  std::optional<std::size_t> param_index(std::string_view name) const;
  std::optional<std::size_t> unknown_index(std::string_view name) const;
};

/// Parses a problem file; all diagnostics are collected into one ParseError.
Problem parse_problem(std::string_view text);

}  // namespace rilt

#endif  // RILT_PROBLEM_HPP
