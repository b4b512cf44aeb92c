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

#include <functional>
#include <regex>
#include <set>

#include <doctest.h>

#include "rilt/error.hpp"
#include "rilt/problem.hpp"
#include "rilt/problems.hpp"

using namespace rilt;

namespace {

const char* kRiccati = R"(
[problem]
name = riccati
[params]
c
[unknowns]
y: c
[equations]
D(y) = 1 + y^2
)";

bool mentions(const ParseError& e, const std::string& needle) {
  for (const auto& d : e.diagnostics())
    if (d.message.find(needle) != std::string::npos) return true;
  return false;
}

void walk(const NodePtr& n, const std::function<void(const NodePtr&)>& f) {
  if (!n) return;
  f(n);
  for (const auto& c : n->args) walk(c, f);
  walk(n->order, f);
}

}  // namespace

TEST_SUITE("parser") {
  TEST_CASE("Riccati file") {
    const Problem pb = parse_problem(kRiccati);
    CHECK(pb.name == "riccati");
    REQUIRE(pb.unknowns.size() == 1);
    REQUIRE(pb.unknowns[0].ics.size() == 1);
    CHECK(pb.unknowns[0].ics[0] == ParamScalar::variable(0));
    REQUIRE(pb.equations.size() == 1);
    CHECK(pb.equations[0].order->value.constant() == Scalar(1));
    CHECK(pb.params.size() == 1);
    CHECK_FALSE(pb.params[0].value);
    CHECK(pb.kind == ProblemKind::ivp);
  }

  TEST_CASE("naming the default variable explicitly") {
    const Problem pb = parse_problem("[problem]\nvariable = x\n[unknowns]\ny: 1\n[equations]\nD(y) = y\n");
    CHECK(pb.variable == "x");
    CHECK_THROWS_AS(parse_problem("[problem]\nvariable = sin\n[unknowns]\ny: 1\n[equations]\nD(y) = y\n"), ParseError);
  }

  TEST_CASE("point constraint and solver section") {
    const Problem pb = parse_problem(*builtin_problem("ex11_delay_boundary"));
    REQUIRE(pb.constraints.size() == 1);
    CHECK(pb.constraints[0].unknown == 0);
    CHECK(pb.constraints[0].at == Scalar(1));
    CHECK(pb.constraints[0].value.constant() == Scalar(9));
    CHECK(pb.solver.projection == Projection::polynomial);
    CHECK(pb.solver.backend == Backend::rational);
    CHECK(pb.unknowns[0].ics.size() == 2);
  }

  TEST_CASE("IC count follows the order") {
    const char* text = R"(
[problem]
name = bad
[unknowns]
u: 0
[equations]
D(u, 3/2) = u
)";
    try {
      parse_problem(text);
      FAIL("accepted");
    } catch (const ParseError& e) {
      CHECK(mentions(e, "needs 2 initial condition(s)"));
    }
  }

  TEST_CASE("diagnostics are aggregated and spans stay inside the file") {
    const std::string text = R"(
[problem]
name = many
[bogus]
a = 1
[unknowns]
u: 0
sin: 1
[solver]
order = -3
backend = quad
[equations]
D(u) = u +
)";
    try {
      parse_problem(text);
      FAIL("accepted");
    } catch (const ParseError& e) {
      CHECK(e.diagnostics().size() >= 4);
      CHECK(mentions(e, "unknown section"));
      CHECK(mentions(e, "reserved"));
      CHECK(mentions(e, "unknown backend"));
      for (const auto& d : e.diagnostics()) CHECK(d.end <= text.size());
    }
  }

  TEST_CASE("Euler section") {
    const Problem pb = parse_problem(*builtin_problem("ex01_euler"));
    REQUIRE(pb.euler);
    CHECK(pb.kind == ProblemKind::euler);
    CHECK(pb.euler->coefficients == std::vector<mpq_class>{-3, -3, 1});
    REQUIRE(pb.euler->forcing.size() == 1);
    CHECK(pb.euler->forcing[0].first == 1);
    CHECK(pb.euler->forcing[0].second == 2);
    CHECK_THROWS_AS(parse_problem("[problem]\nname = e\nkind = euler\n[unknowns]\ny\n[euler]\ncoefficients = 1\nforcing = x^2\n"),
                    ParseError);
  }

  TEST_CASE("every shipped problem parses") {
    CHECK(builtin_problems().size() >= 15);
    for (const auto& p : builtin_problems()) {
      CAPTURE(p.name);
      CHECK_NOTHROW(parse_problem(p.text));
    }
  }

  TEST_CASE("grammar coverage by the shipped problems") {
    std::set<NodeKind> kinds;
    std::set<std::string> functions;
    std::string all_text;
    for (const auto& p : builtin_problems()) {
      all_text += std::string(p.text) + "\n";
      const Problem pb = parse_problem(p.text);
      auto note = [&](const NodePtr& n) {
        kinds.insert(n->kind);
        if (n->kind == NodeKind::func) functions.insert(n->name);
      };
      for (const auto& eq : pb.equations) {
        walk(eq.rhs, note);
        walk(eq.order, note);
      }
      for (const auto& e : pb.benchmark.exact) walk(e, note);
      for (const auto& [name, d] : pb.defines) walk(d, note);
    }
    for (NodeKind k : {NodeKind::constant, NodeKind::x, NodeKind::unknown, NodeKind::add, NodeKind::mul, NodeKind::pow,
                       NodeKind::func, NodeKind::var_exp, NodeKind::caputo, NodeKind::oderiv, NodeKind::delay, NodeKind::volterra,
                       NodeKind::fredholm, NodeKind::compose})
      CHECK_MESSAGE(kinds.count(k), "node kind " << static_cast<int>(k) << " unused");
    for (const char* f : {"sin", "cos", "exp", "ln", "ln1p", "tan", "tanh", "atan", "gamma", "sqrt", "pi"})
      CHECK_MESSAGE(functions.count(f), f << " unused");
    // Surface forms that fold away in the tree.
    for (const char* re : {R"(\d\.\d)", R"(\^\(\d+/\d+\))", R"(\^\d)", R"(/\d)", R"(=\s*-)", R"(\bD\(\w+\)\s*=)", R"(\bD\(\w+,\s*\d+\))",
                           R"(\bdelay\()", R"(\bxpow\()", R"(\w+\(\(x - 1\)/3\))", R"(\[define\])", R"(\[constraints\])",
                           R"(\[euler\])", R"(grid\s*=)", R"(exact\.\w+)"})
      CHECK_MESSAGE(std::regex_search(all_text, std::regex(re)), re << " unused");
  }
}
