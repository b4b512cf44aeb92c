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

#ifndef RILT_ORACLE_HPP
#define RILT_ORACLE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rilt/expression.hpp"
#include "rilt/problem.hpp"
#include "rilt/scalar.hpp"

namespace rilt {

/// How unknowns are resolved during numeric evaluation.
struct NumericEnv {
  std::vector<std::optional<Float>> params;
  /// Closed-form solutions per unknown, functions of x.
  std::vector<NodePtr> exact;
  /// Point values of the unknowns at the evaluation point (ODE right sides).
  std::vector<Float> state;
  /// Evaluate Fredholm nodes as basis * integral instead of param * basis.
  bool fredholm_integral = true;
};

/// Evaluates an expression at x. Operators (Caputo, Volterra, Fredholm) are
/// computed by quadrature on closed-form operands.
Float eval_numeric(const NodePtr& n, const Float& x, const NumericEnv& env);

/// Tanh-sinh quadrature of f over [a, b]. The integrand receives the point and
/// its distances to both ends, so endpoint singularities keep full accuracy.
using EndpointIntegrand = std::function<Float(const Float& t, const Float& from_a, const Float& to_b)>;
Float tanh_sinh(const EndpointIntegrand& f, const Float& a, const Float& b, const Float& tol);

/// Caputo derivative of a closed-form f at x by quadrature of f^(n) against
/// the power kernel; integer alpha gives f^(alpha)(x).
Float caputo_quadrature(const NodePtr& f, const Float& alpha, const Float& x, const NumericEnv& env = {});

struct Trajectory {
  std::vector<std::string> names;
  std::vector<Scalar> t;
  std::vector<std::vector<Scalar>> state;
  Scalar dt;
  unsigned local_order = 0;
};

using OdeRhs = std::function<std::vector<Float>(const Float& t, const std::vector<Float>& y)>;

/// Classical fourth-order Runge-Kutta with fixed step h; records every
/// `record_every` steps (and the final state).
Trajectory rk4_integrate(const OdeRhs& f, std::vector<Float> y0, const Scalar& h, const Scalar& T, std::size_t record_every = 1);
/// Right side of a first-order integer-order system given in natural form.
OdeRhs ode_rhs(const Problem& pb, const std::vector<std::optional<Float>>& params);

struct ErrorReport {
  std::vector<Scalar> grid;
  std::vector<Float> errors;
  double seconds = 0;

  Float max_error() const;
};

/// Pointwise |candidate - reference|.
ErrorReport score(const std::vector<Float>& candidate, const std::vector<Float>& reference, const std::vector<Scalar>& grid);

/// Checks that the benchmark's exact solutions satisfy every equation at
/// `points` random grid points; returns the largest defect.
Float exact_solution_defect(const Problem& pb, const std::vector<std::optional<Float>>& params, unsigned points,
                            std::uint64_t seed);

/// Exact solutions of the shipped problems, self-checked when registered.
class ExactRegistry {
 public:
  struct Entry {
    std::string name;
    Float defect;
  };
  /// Registers a problem; throws when its exact solution fails the check.
  void add(const std::string& name, const Problem& pb, const std::vector<std::optional<Float>>& params);
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
};

}  // namespace rilt

#endif  // RILT_ORACLE_HPP
