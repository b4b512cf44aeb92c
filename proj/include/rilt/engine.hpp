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

#ifndef RILT_ENGINE_HPP
#define RILT_ENGINE_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rilt/expression.hpp"
#include "rilt/operators.hpp"
#include "rilt/oracle.hpp"
#include "rilt/problem.hpp"
#include "rilt/series.hpp"

namespace rilt {

/// Command-line style overrides applied on top of a problem file.
struct SolveOptions {
  std::optional<unsigned> order;
  std::optional<unsigned> precision;
  std::optional<unsigned> max_iterations;
  std::optional<Backend> backend;
  std::optional<Projection> projection;
  std::vector<std::pair<std::string, Scalar>> params;
};

struct CompiledEquation {
  NodePtr order_expr;
  OrderSpec order;
  NodePtr natural;   // D(u, order) = natural
  NodePtr standard;  // x^order * natural, normalized
  NodePtr forcing;   // closed-form f of split x^a D^a f terms, or null
  NodePtr rest;      // standard without the split terms
  std::vector<ParamScalar> ics;
};

struct FredholmTerm {
  std::size_t param = 0;
  NodePtr integrand;
};

/// A problem instantiated for solving: parameters bound, orders resolved,
/// right sides normalized to standard form.
struct ProblemSpec {
  std::string name;
  PrintNames names;
  std::shared_ptr<const ParamSpace> space;  // declared parameters plus the formal order offset
  std::size_t delta_index = 0;
  bool variable_order = false;
  NodePtr variable_order_expr;
  Series alpha_series;  // alpha(x) of the variable order
  Series delta_series;  // alpha(x) - alpha0
  Bindings bindings;    // bound parameter values; empty entries stay symbolic
  std::vector<CompiledEquation> equations;
  std::vector<PointConstraint> constraints;
  std::vector<FredholmTerm> fredholm;
  std::vector<NodePtr> exact;
  std::optional<GridSpec> grid;
  Truncation trunc;
  std::int64_t lattice = 1;
  unsigned max_iterations = 0;
  unsigned precision = 50;
  Backend backend = Backend::rational;
  Projection projection = Projection::none;
  Scalar tau;
  Scalar domain{1};

  std::size_t dimension() const { return equations.size(); }
  Series zero() const { return Series(space, trunc, lattice); }
  /// Free parameters that still appear symbolically.
  std::vector<std::size_t> free_params() const;
};

ProblemSpec build_spec(const Problem& pb, const SolveOptions& opts = {});

struct ParamRoot {
  std::string param;
  Scalar value;
  Scalar score;  // consistency defect at twice the truncation level
  bool admissible = false;
  bool chosen = false;
};

struct SolveReport {
  std::vector<Series> solution;
  std::vector<Series> residual;
  unsigned iterations = 0;
  Scalar residual_max;
  double seconds = 0;
  std::vector<ParamRoot> roots;
};

struct ConvergenceEstimate {
  std::vector<unsigned> levels;
  std::vector<Float> errors;
  bool saturated = false;
  std::optional<Float> M;
  std::optional<Float> beta;
  std::optional<Float> ratio;       // x e^-beta, per unit of N
  std::optional<Float> tail_bound;  // M ratio^N at the largest level
};

Series ic_series(const ProblemSpec& spec, std::size_t unknown);
/// Evaluates a standard-form node on the current iterates; the result may
/// carry the formal order offset.
Series eval_rhs(const ProblemSpec& spec, const NodePtr& node, const std::vector<Series>& current);
/// Replaces the formal order offset by alpha(x) - alpha0.
Series resolve_order_offset(const ProblemSpec& spec, const Series& s);
std::vector<Series> iterate_once(const ProblemSpec& spec, const std::vector<Series>& current);
/// Fixed-point iteration only; no parameter resolution.
SolveReport solve_fixed_point(const ProblemSpec& spec);
/// Full solve: iteration, parameter resolution and residual.
SolveReport solve(const ProblemSpec& spec);
std::vector<Series> residual(const ProblemSpec& spec, const std::vector<Series>& solution);
/// Largest residual coefficient with power <= N.
Scalar residual_max(const ProblemSpec& spec, const std::vector<Series>& res);
/// Binds the single free parameter from constraints or Fredholm consistency.
SolveReport resolve_parameters(const ProblemSpec& spec, SolveReport report);
/// Real roots of sum_k c[k] t^k.
std::vector<Scalar> real_roots(const std::vector<Scalar>& coeffs);

struct StepOptions {
  Scalar dt;
  Scalar until;
  std::optional<Float> tail_tolerance;
};
Trajectory step_solve(const Problem& pb, const SolveOptions& opts, const StepOptions& step);

ConvergenceEstimate convergence_probe(const Problem& pb, const SolveOptions& opts, const Scalar& at, const std::vector<unsigned>& levels);

}  // namespace rilt

#endif  // RILT_ENGINE_HPP
