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

#include <random>

#include <doctest.h>

#include "rilt/bench.hpp"
#include "rilt/engine.hpp"
#include "rilt/error.hpp"
#include "rilt/euler.hpp"
#include "rilt/special.hpp"
#include "support.hpp"

using namespace rilt;
using rilt::testing::q;
using rilt::testing::relative_error;

namespace {

ParamScalar pc(long n, long d = 1) { return ParamScalar(Scalar::ratio(n, d)); }

Float coefficient_gap(const Series& a, const Series& b, const Exponent& cap, const Bindings& bind = {}) {
  Float worst(0);
  auto scan = [&](const Series& s, const Series& other) {
    for (const auto& [key, c] : s.terms()) {
      if (key.power > cap) continue;
      const ParamScalar d = c - other.coeff(key.power, key.logpow);
      const Float v = abs(d.bind(bind).constant().to_float());
      if (v > worst) worst = v;
    }
  };
  scan(a, b);
  scan(b, a);
  return worst;
}

Float max_error_vs(const Series& s, const char* exact, const std::vector<Scalar>& xs, const Bindings& b = {}) {
  const NodePtr e = parse_expression(exact);
  Float worst(0);
  for (const auto& x : xs) {
    const Float got = eval(s, x, b).to_float();
    const Float want = eval_numeric(e, x.to_float(), {});
    worst = std::max(worst, abs(got - want));
  }
  return worst;
}

std::optional<Scalar> chosen(const SolveReport& r) {
  for (const auto& root : r.roots)
    if (root.chosen) return root.value;
  return std::nullopt;
}

}  // namespace

TEST_SUITE("engine") {
  TEST_CASE("Riccati iterates") {
    const Problem pb = load_builtin("ex02_riccati");
    const ProblemSpec spec = build_spec(pb);
    const std::size_t c = *spec.space->index_of("c");
    const ParamScalar cv = ParamScalar::variable(c);
    const Series y0 = ic_series(spec, 0);
    CHECK(y0.coeff(Exponent(0)) == cv);
    const Series y1 = iterate_once(spec, {y0})[0];
    CHECK(y1.coeff(Exponent(0)) == cv);
    CHECK(y1.coeff(Exponent(1)) == pc(1) + cv * cv);
    CHECK(y1.size() == 2);
    const Series y2 = iterate_once(spec, {y1})[0];
    CHECK(y2.coeff(Exponent(1)) == pc(1) + cv * cv);
    CHECK(y2.coeff(Exponent(2)) == cv * (pc(1) + cv * cv));
    CHECK(y2.coeff(Exponent(3)) == (pc(1) + cv * cv) * (pc(1) + cv * cv) * pc(1, 3));
  }

  TEST_CASE("log-power iterate carries x ln x") {
    Problem pb = load_builtin("ex03_logpower");
    pb.params[0].value.reset();
    SolveOptions o;
    o.backend = Backend::rational;
    o.order = 3;
    const ProblemSpec spec = build_spec(pb, o);
    const ParamScalar cv = ParamScalar::variable(*spec.space->index_of("c"));
    const Series y1 = iterate_once(spec, {ic_series(spec, 0)})[0];
    CHECK(y1.coeff(Exponent(0)) == cv);
    CHECK(y1.coeff(Exponent(1)) == cv * cv - pc(1));
    CHECK(y1.coeff(Exponent(1), 1) == pc(1));
  }

  TEST_CASE("Riccati x^3 coefficient is a polynomial in c") {
    const ProblemSpec spec = build_spec(load_builtin("ex02_riccati"));
    const SolveReport r = solve(spec);
    const ParamScalar cv = ParamScalar::variable(*spec.space->index_of("c"));
    CHECK(r.solution[0].coeff(Exponent(3)) == pc(1, 3) + pc(4, 3) * cv * cv + cv * cv * cv * cv);
    CHECK(r.residual_max.is_zero());
  }

  TEST_CASE("weakly singular Volterra solution is x^3") {
    const ProblemSpec spec = build_spec(load_builtin("ex08_volterra"));
    PrecisionScope ps({spec.precision, current_precision().guard});
    const SolveReport r = solve(spec);
    CHECK(max_error_vs(r.solution[0], "x^3", {q(1, 5), q(1, 2), Scalar(1)}) < Float::parse("1e-25"));
  }

  TEST_CASE("Fredholm parameter resolves to 1/8") {
    const ProblemSpec spec = build_spec(load_builtin("ex09_fredholm"));
    PrecisionScope ps({spec.precision, current_precision().guard});
    const SolveReport r = solve(spec);
    const auto c = chosen(r);
    REQUIRE(c);
    CHECK(abs((*c - q(1, 8)).to_float()) < Float::parse("1e-20"));
  }

  TEST_CASE("variable-order solution is x^3") {
    const ProblemSpec spec = build_spec(load_builtin("ex10_variable_order"));
    PrecisionScope ps({spec.precision, current_precision().guard});
    const SolveReport r = solve(spec);
    CHECK(max_error_vs(r.solution[0], "x^3", {q(1, 10), q(1, 2), q(9, 10)}) < Float::parse("1e-25"));
  }

  TEST_CASE("boundary constraint fixes the slope at 4") {
    const ProblemSpec spec = build_spec(load_builtin("ex11_delay_boundary"));
    const SolveReport r = solve(spec);
    const auto c = chosen(r);
    REQUIRE(c);
    CHECK(c->is_exact());
    CHECK(*c == Scalar(4));
    const Bindings b = [&] {
      Bindings out = spec.bindings;
      out[*spec.space->index_of("c")] = *c;
      return out;
    }();
    CHECK(eval(r.solution[0], Scalar(1), b) == Scalar(9));
  }

  TEST_CASE("settings and overrides") {
    const Problem pb = load_builtin("ex02_riccati");
    SolveOptions o;
    o.params = {{"c", Scalar(0)}};
    o.order = 7;
    const ProblemSpec spec = build_spec(pb, o);
    CHECK(spec.free_params().empty());
    CHECK(spec.trunc.power_cap == Exponent(7));
    CHECK(spec.max_iterations == 28);
    o.params = {{"nope", Scalar(0)}};
    CHECK_THROWS_AS(build_spec(pb, o), Error);
  }

  TEST_CASE("stepping exp and rotation") {
    StepOptions st;
    st.dt = q(1, 10);
    st.until = Scalar(1);
    const Trajectory e = step_solve(load_builtin("exp_growth"), {}, st);
    REQUIRE(e.t.size() == 11);
    CHECK(abs(e.state.back()[0].to_float() - exp(Float(1))) < Float::parse("1e-10"));

    const Trajectory r = step_solve(load_builtin("rotation"), {}, st);
    CHECK(abs(r.state.back()[0].to_float() - cos(Float(1))) < Float::parse("1e-10"));
    CHECK(abs(r.state.back()[1].to_float() - sin(Float(1))) < Float::parse("1e-10"));

    StepOptions fine = st;
    fine.dt = q(1, 100);
    const Trajectory rf = step_solve(load_builtin("rotation"), {}, fine);
    CHECK(abs(rf.state.back()[0].to_float() - r.state.back()[0].to_float()) < Float::parse("1e-10"));
  }

  TEST_CASE("stepping rejects bad arguments") {
    StepOptions st;
    st.dt = Scalar(0);
    st.until = Scalar(1);
    CHECK_THROWS_AS(step_solve(load_builtin("exp_growth"), {}, st), Error);
    st.dt = q(1, 3);
    st.until = q(1, 2);
    CHECK_THROWS_AS(step_solve(load_builtin("exp_growth"), {}, st), Error);
    st.dt = q(1, 10);
    CHECK_THROWS_AS(step_solve(load_builtin("oscillator"), {}, st), Error);
  }

  TEST_CASE("convergence probe") {
    const Problem pb = load_builtin("exp_growth");
    const ConvergenceEstimate est = convergence_probe(pb, {}, q(1, 2), {4, 6, 8, 10});
    REQUIRE(est.errors.size() == 4);
    CHECK(est.errors[3] < est.errors[0]);
    CHECK_FALSE(est.saturated);
    REQUIRE(est.beta);
    CHECK(est.beta->sign() > 0);

    const ConvergenceEstimate sat = convergence_probe(load_builtin("ex10_variable_order"), {}, q(1, 2), {6, 8, 10, 12});
    CHECK(sat.saturated);
    CHECK_THROWS_AS(convergence_probe(pb, {}, q(1, 2), {4, 6, 8}), Error);
  }

  TEST_CASE("real roots") {
    // (t - 1)(t + 2)(t - 5/2)
    const auto r = real_roots({Scalar(5), q(-9, 2), q(-3, 2), Scalar(1)});
    REQUIRE(r.size() == 3);
    CHECK(abs((r[0] - Scalar(-2)).to_float()) < Float::parse("1e-30"));
    CHECK(abs((r[1] - Scalar(1)).to_float()) < Float::parse("1e-30"));
    CHECK(abs((r[2] - q(5, 2)).to_float()) < Float::parse("1e-30"));
    CHECK(real_roots({Scalar(1), Scalar(0), Scalar(1)}).empty());
    const auto lin = real_roots({Scalar(-1), Scalar(8)});
    REQUIRE(lin.size() == 1);
    CHECK(lin[0] == q(1, 8));
  }
}

TEST_SUITE("engine properties") {
  TEST_CASE("raising the truncation keeps the prefix") {
    SUBCASE("Riccati, exact") {
      const Problem pb = load_builtin("ex02_riccati");
      for (unsigned n : {2u, 3u, 4u}) {
        SolveOptions lo, hi;
        lo.order = n;
        hi.order = n + 2;
        const Series a = solve(build_spec(pb, lo)).solution[0];
        const Series b = solve(build_spec(pb, hi)).solution[0];
        const Bindings bind{q(3, 7)};
        CHECK(coefficient_gap(a, b, Exponent(n), bind).is_zero());
      }
    }
    SUBCASE("log-power, float") {
      const Problem pb = load_builtin("ex03_logpower");
      SolveOptions lo, hi;
      lo.order = 6;
      hi.order = 8;
      const ProblemSpec sa = build_spec(pb, lo);
      PrecisionScope ps({sa.precision, current_precision().guard});
      const Series a = solve(sa).solution[0];
      const Series b = solve(build_spec(pb, hi)).solution[0];
      CHECK(coefficient_gap(a, b, Exponent(6), sa.bindings) < Float::parse("1e-30"));
    }
    SUBCASE("fractional Riccati at alpha = 1") {
      const Problem pb = load_builtin("ex07_frac_riccati");
      SolveOptions lo, hi;
      lo.order = 7;
      hi.order = 9;
      const ProblemSpec sa = build_spec(pb, lo);
      const Series a = solve(sa).solution[0];
      const Series b = solve(build_spec(pb, hi)).solution[0];
      CHECK(coefficient_gap(a, b, Exponent(7), sa.bindings) < Float::parse("1e-30"));
    }
  }

  TEST_CASE("solving twice gives identical series") {
    for (const char* name : {"ex02_riccati", "ex03_logpower", "ex12_proportional_delay"}) {
      INFO(name);
      SolveOptions o;
      if (std::string(name) == "ex12_proportional_delay") o.params = {{"rho", q(1, 2)}};
      const ProblemSpec spec = build_spec(load_builtin(name), o);
      PrecisionScope ps({spec.precision, current_precision().guard});
      CHECK(solve(spec).solution[0].str() == solve(spec).solution[0].str());
    }
  }

  TEST_CASE("residual vanishes below the truncation on random Riccati data") {
    std::mt19937_64 rng(20260101);
    std::uniform_int_distribution<long> num(-9, 9), den(1, 6);
    const Problem pb = load_builtin("ex02_riccati");
    for (int trial = 0; trial < 6; ++trial) {
      SolveOptions o;
      o.order = 5;
      o.params = {{"c", Scalar::ratio(num(rng), den(rng))}};
      const ProblemSpec spec = build_spec(pb, o);
      const SolveReport r = solve(spec);
      CHECK(r.residual_max.is_zero());
      CHECK(residual_max(spec, residual(spec, r.solution)).is_zero());
    }
  }
}

TEST_SUITE("euler") {
  TEST_CASE("closed form of the shipped problem") {
    PrecisionScope ps({40, current_precision().guard});
    const EulerSolution s = euler_solve(load_builtin("ex01_euler"));
    CHECK(s.str() == "(t)/(t^2 - 4*t - 3)");
    REQUIRE(s.roots.size() == 2);
    // roots 2 -+ sqrt(7)
    CHECK(relative_error(s.roots[0], Float(2) - sqrt(Float(7))) < Float::parse("1e-35"));
    CHECK(relative_error(s.roots[1], Float(2) + sqrt(Float(7))) < Float::parse("1e-35"));
  }

  TEST_CASE("y satisfies the Euler equation") {
    PrecisionScope ps({40, current_precision().guard});
    const EulerDecl eq{{mpq_class(-3), mpq_class(-3), mpq_class(1)}, {{mpq_class(1), 2}}};
    const EulerSolution s = euler_solve(eq);
    const Float h = Float::parse("1e-10");
    for (const char* xs : {"0.2", "0.5", "0.8"}) {
      const Float x = Float::parse(xs);
      const Float y = s.eval(x);
      const Float yp = (s.eval(x + h) - s.eval(x - h)) / (Float(2) * h);
      const Float ypp = (s.eval(x + h) - Float(2) * y + s.eval(x - h)) / (h * h);
      const Float lhs = Float(-3) * y - Float(3) * x * yp + x * x * ypp;
      const Float l = log(x);
      CHECK(abs(lhs - Float(1) / (l * l)) < Float::parse("1e-8"));
    }
  }

  TEST_CASE("zero forcing and degenerate operators") {
    const EulerSolution z = euler_solve(EulerDecl{{mpq_class(-3), mpq_class(-3), mpq_class(1)}, {}});
    CHECK(z.numerator.empty());
    CHECK(z.eval(Float::parse("0.5")).is_zero());
    // t^2 with a constant numerator: repeated root
    CHECK_THROWS_AS(euler_solve(EulerDecl{{mpq_class(0), mpq_class(1), mpq_class(1)}, {{mpq_class(1), 1}}}), Error);
    // t^2 + 1 in falling factorials: complex roots
    CHECK_THROWS_AS(euler_solve(EulerDecl{{mpq_class(1), mpq_class(1), mpq_class(1)}, {{mpq_class(1), 2}}}), Error);
  }

  TEST_CASE("polynomial helpers") {
    CHECK(poly_str({mpq_class(-3), mpq_class(-4), mpq_class(1)}) == "t^2 - 4*t - 3");
    CHECK(poly_trim({mpq_class(1), mpq_class(0), mpq_class(0)}).size() == 1);
    // gcd((t-1)(t+1), (t-1)(t+2)) = t - 1 up to scale
    const RationalPoly g = poly_gcd({mpq_class(-1), mpq_class(0), mpq_class(1)}, {mpq_class(-2), mpq_class(1), mpq_class(1)});
    REQUIRE(g.size() == 2);
    CHECK(g[0] / g[1] == mpq_class(-1));
  }
}

TEST_SUITE("bench") {
  TEST_CASE("suite registry") {
    CHECK(suite_names() == std::vector<std::string>{"acceptance", "tables"});
    const auto ids = suite_criteria("acceptance");
    CHECK(ids.size() == 15);
    CHECK(ids.front() == "1");
    CHECK_THROWS_AS(run_suite(""), Error);
    SuiteOptions o;
    o.only = "nope";
    CHECK_THROWS_AS(run_suite("acceptance", o), Error);
  }

  TEST_CASE("a single criterion and its manifests") {
    SuiteOptions o;
    o.only = "14";
    o.jobs = 1;
    const auto rs = run_suite("acceptance", o);
    REQUIRE(rs.size() == 1);
    CHECK(rs[0].id == "14");
    CHECK(rs[0].pass);
    const std::string csv = manifest_csv(rs);
    CHECK(csv.rfind("id,measured,threshold,pass,seconds,detail\n", 0) == 0);
    CHECK(csv.find("\n14,") != std::string::npos);
    CHECK(manifest_json(rs).find("\"id\"") != std::string::npos);
  }

  TEST_CASE("Rossler parameters are identified from the first published row") {
    const RosslerIdentification id = identify_rossler();
    CHECK(id.identified);
    CHECK(id.A == mpq_class(1, 5));
    CHECK(id.B == mpq_class(1, 5));
    CHECK(id.C == mpq_class(11, 2));
  }
}
