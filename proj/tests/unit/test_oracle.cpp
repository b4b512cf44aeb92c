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

#include <doctest.h>

#include "rilt/bench.hpp"
#include "rilt/engine.hpp"
#include "rilt/error.hpp"
#include "rilt/oracle.hpp"
#include "rilt/problems.hpp"
#include "rilt/special.hpp"
#include "support.hpp"

using namespace rilt;
using rilt::testing::q;
using rilt::testing::relative_error;

namespace {

Float y_at_one(const Scalar& h) {
  const OdeRhs f = [](const Float&, const std::vector<Float>& y) { return y; };
  const Trajectory tr = rk4_integrate(f, {Float(1)}, h, Scalar(1));
  return tr.state.back()[0].to_float();
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("rk4 keeps a constant state") {
    const OdeRhs f = [](const Float&, const std::vector<Float>& y) { return std::vector<Float>(y.size(), Float(0)); };
    const Trajectory tr = rk4_integrate(f, {Float(3), Float(-2)}, q(1, 10), Scalar(1));
    REQUIRE(tr.state.size() == 11);
    CHECK(tr.state.back()[0].to_float() == Float(3));
    CHECK(tr.state.back()[1].to_float() == Float(-2));
    CHECK(tr.t.back() == Scalar(1));
  }

  TEST_CASE("rk4 on y' = y is fourth order") {
    const Float e = exp(Float(1));
    const Float e1 = abs(y_at_one(q(1, 20)) - e);
    const Float e2 = abs(y_at_one(q(1, 40)) - e);
    CHECK(e1 < Float::parse("1e-6"));
    const double ratio = (e1 / e2).to_double();
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
  }

  TEST_CASE("rk4 records every k steps and the final state") {
    const OdeRhs f = [](const Float& t, const std::vector<Float>&) { return std::vector<Float>{t}; };
    const Trajectory tr = rk4_integrate(f, {Float(0)}, q(1, 10), Scalar(1), 3);
    // t = 0, 0.3, 0.6, 0.9, 1.0
    REQUIRE(tr.t.size() == 5);
    CHECK(tr.t[1] == q(3, 10));
    CHECK(tr.t.back() == Scalar(1));
    // quadratic integrand: RK4 is exact
    CHECK(abs(tr.state.back()[0].to_float() - Float(1) / Float(2)) < Float::parse("1e-40"));
  }

  TEST_CASE("rk4 rejects bad steps and reports blow-up") {
    const OdeRhs f = [](const Float&, const std::vector<Float>& y) { return std::vector<Float>{y[0] * y[0]}; };
    CHECK_THROWS(rk4_integrate(f, {Float(1)}, Scalar(0), Scalar(1)));
    CHECK_THROWS(rk4_integrate(f, {Float(1)}, q(1, 3), q(1, 2)));
    CHECK_THROWS_AS(rk4_integrate(f, {Float(1)}, q(1, 2), Scalar(2000)), Error);
  }

  TEST_CASE("Caputo quadrature against closed forms") {
    const Float half = Float(1) / Float(2);
    const Float d1 = caputo_quadrature(parse_expression("x"), half, Float(1));
    CHECK(relative_error(d1, Float(2) / sqrt(Float::pi())) < Float::parse("1e-30"));

    const Float third = Float(1) / Float(3);
    const Float d3 = caputo_quadrature(parse_expression("x^3"), third, Float(1));
    CHECK(relative_error(d3, Float(6) / gamma(Float(11) / Float(3))) < Float::parse("1e-30"));

    // x^3 at order 1/3 and x = 1/2 scales as x^(8/3)
    const Float d3h = caputo_quadrature(parse_expression("x^3"), third, half);
    CHECK(relative_error(d3h, d3 * pow(half, Float(8) / Float(3))) < Float::parse("1e-30"));

    // integer order is an ordinary derivative
    const Float d2 = caputo_quadrature(parse_expression("sin(x)"), Float(2), half);
    CHECK(relative_error(d2, -sin(half)) < Float::parse("1e-40"));
  }

  TEST_CASE("variable-order Caputo: quadrature at alpha(x) matches the series") {
    const Problem pb = load_builtin("ex10_variable_order");
    SolveOptions o;
    o.order = 24;
    const ProblemSpec spec = build_spec(pb, o);
    Series u = spec.zero();
    u.add_term({Exponent(3), 0}, ParamScalar(Scalar(1)));
    const Series d = resolve_order_offset(spec, caputo_apply(u, spec.equations[0].order, false));
    const Scalar x = q(1, 2);
    const Float series_value = eval(d, x, spec.bindings).to_float();
    const Float alpha = Float(1) - exp(-x.to_float()) / Float(2);
    const Float quad = caputo_quadrature(parse_expression("x^3"), alpha, x.to_float());
    CHECK(relative_error(series_value, quad) < Float::parse("1e-8"));
  }

  TEST_CASE("score") {
    const std::vector<Scalar> grid{Scalar(0), q(1, 2), Scalar(1)};
    const std::vector<Float> a{Float(1), Float(2), Float(3)};
    CHECK(score(a, a, grid).max_error().is_zero());
    const std::vector<Float> b{Float(1), Float(5), Float(3)};
    CHECK(score(a, b, grid).max_error() == Float(3));
    CHECK_THROWS_AS(score(a, {Float(1)}, grid), Error);
  }

  TEST_CASE("exact solutions of the shipped problems pass their self-check") {
    ExactRegistry reg;
    std::size_t checked = 0;
    for (const auto& bp : builtin_problems()) {
      const Problem pb = parse_problem(bp.text);
      if (pb.kind != ProblemKind::ivp) continue;
      bool complete = !pb.benchmark.exact.empty();
      for (const auto& e : pb.benchmark.exact) complete = complete && e;
      if (!complete) continue;
      std::vector<std::optional<Float>> params(pb.params.size());
      for (std::size_t i = 0; i < pb.params.size(); ++i) {
        if (pb.params[i].value) params[i] = pb.params[i].value->to_float();
      }
      // free parameters: the values the solver should recover
      if (auto c = pb.param_index("c")) {
        if (!params[*c]) params[*c] = pb.name == "volterra-fredholm" ? Float(1) / Float(8) : Float(3) / Float(10);
      }
      INFO(pb.name);
      CHECK_NOTHROW(reg.add(pb.name, pb, params));
      ++checked;
    }
    CHECK(checked >= 12);
    CHECK(reg.entries().size() == checked);
  }

  TEST_CASE("a wrong exact solution is rejected") {
    Problem pb = load_builtin("exp_growth");
    pb.benchmark.exact[0] = parse_expression("1 + x");
    ExactRegistry reg;
    CHECK_THROWS_AS(reg.add("broken", pb, {}), Error);
    CHECK(reg.entries().empty());
  }
}
