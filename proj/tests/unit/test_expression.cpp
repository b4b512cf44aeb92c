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

#include "rilt/error.hpp"
#include "rilt/expression.hpp"
#include "rilt/oracle.hpp"
#include "rilt/problem.hpp"
#include "support.hpp"

using namespace rilt;
using rilt::testing::q;

namespace {

ParseContext context() {
  ParseContext ctx;
  ctx.unknowns = {"u", "v"};
  ctx.params = {"c", "rho"};
  return ctx;
}

NodePtr parse(const std::string& text) {
  ParseContext ctx = context();
  return parse_expression(text, ctx);
}

// Random trees in the input grammar.
class TreeGen {
 public:
  explicit TreeGen(std::uint64_t seed) : rng_(seed) {}

  NodePtr expr(int depth) {
    if (depth <= 0) return leaf();
    switch (pick(11)) {
      case 0:
      case 1:
        return make_add({expr(depth - 1), expr(depth - 1)});
      case 2:
      case 3:
        return make_mul({expr(depth - 1), expr(depth - 1)});
      case 4:
        return make_pow(expr(depth - 1), Exponent(pick(3) + 2));
      case 5: {
        static const char* fns[] = {"sin", "cos", "exp", "ln1p", "tan", "tanh", "atan"};
        return make_func(fns[pick(7)], expr(depth - 1));
      }
      case 6:
        return make_caputo(make_const(ParamScalar(Scalar::ratio(pick(5) + 1, 3))), unknown());
      case 7:
        return make_delay(pick(2), Scalar::ratio(pick(4) + 1, 5), Scalar::ratio(-static_cast<long>(pick(3)), 2));
      case 8:
        return make_volterra(mpq_class(1, 2), expr(depth - 1));
      case 9:
        return make_var_exp(make_add({make_x(), make_const(ParamScalar(q(1)))}));
      default:
        return make_neg(expr(depth - 1));
    }
  }

 private:
  std::mt19937_64 rng_;

  unsigned pick(unsigned n) { return static_cast<unsigned>(rng_() % n); }

  NodePtr unknown() { return make_unknown(pick(2)); }

  NodePtr leaf() {
    switch (pick(6)) {
      case 0:
        return make_x();
      case 1:
        return unknown();
      case 2:
        return make_const(ParamScalar(Scalar::ratio(static_cast<long>(pick(19)) - 9, pick(4) + 1)));
      case 3:
        return make_const(ParamScalar::variable(pick(2)));
      case 4:
        return make_pow(make_x(), Exponent(static_cast<std::int64_t>(pick(7)) + 1, 2));
      default:
        return make_const(ParamScalar(Scalar(static_cast<long>(pick(7)))));
    }
  }
};

}  // namespace

TEST_SUITE("expression") {
  TEST_CASE("precedence and associativity") {
    const NodePtr n = parse("x + x*u^2");
    REQUIRE(n->kind == NodeKind::add);
    REQUIRE(n->args.size() == 2);
    CHECK(n->args[0]->kind == NodeKind::x);
    const NodePtr m = n->args[1];
    REQUIRE(m->kind == NodeKind::mul);
    CHECK(m->args[0]->kind == NodeKind::x);
    CHECK(m->args[1]->kind == NodeKind::pow);
    CHECK(m->args[1]->power == Exponent(2));
    CHECK(m->args[1]->arg()->kind == NodeKind::unknown);
    // unary minus binds looser than ^
    CHECK(structurally_equal(parse("-x^2"), make_neg(make_pow(make_x(), Exponent(2)))));
    CHECK(structurally_equal(parse("1 - x - x"), parse("1 - 2*x")) == false);
    CHECK(structurally_equal(parse("(1 - x) - x"), parse("1 - x - x")));
  }

  TEST_CASE("operator forms") {
    const NodePtr v = parse("volterra(mu=1/2; D(u, 1/3))");
    REQUIRE(v->kind == NodeKind::volterra);
    CHECK(v->mu == mpq_class(1, 2));
    REQUIRE(v->arg()->kind == NodeKind::caputo);
    CHECK(v->arg()->arg()->kind == NodeKind::unknown);

    ParseContext ctx;
    ctx.unknowns = {"y"};
    const NodePtr c = parse_expression("y(y(x))", ctx);
    REQUIRE(c->kind == NodeKind::compose);
    CHECK(c->arg()->kind == NodeKind::unknown);

    const NodePtr d = parse_expression("y((x - 1)/3)", ctx);
    REQUIRE(d->kind == NodeKind::delay);
    CHECK(d->lambda == Scalar::ratio(1, 3));
    CHECK(d->shift == Scalar::ratio(-1, 3));
    CHECK(parse_expression("y(x)", ctx)->kind == NodeKind::unknown);
    CHECK(parse("D(u, 2)")->kind == NodeKind::caputo);
    CHECK(parse("D(u)")->kind == NodeKind::oderiv);
    CHECK(parse("xpow(sin(x))")->kind == NodeKind::var_exp);
    CHECK(parse("xpow(3/2)")->kind == NodeKind::pow);
    const NodePtr f = parse("fredholm(param=c; basis=x; integrand=x*u^2)");
    REQUIRE(f->kind == NodeKind::fredholm);
    CHECK(f->param == 0);
  }

  TEST_CASE("constant folding") {
    const NodePtr folded = parse("2*3 + 1/4");
    const ParamScalar* v = const_value(folded);
    REQUIRE(v);
    CHECK(v->constant() == Scalar::ratio(25, 4));
    CHECK(const_value(parse("x - x")) == nullptr);
    CHECK(is_constant_valued(parse("gamma(11/3)*sqrt(pi)")));
    CHECK(parse("1.5")->value.constant().is_exact() == false);
    CHECK(parse("3/2")->value.constant().is_exact());
  }

  TEST_CASE("diagnostics carry spans inside the input") {
    for (const std::string bad : {"x +", "sin(", "u/x", "x^(1/2", "D(u, 1/2", "nope(x)", "x^u", "((x)", "1 $ 2", "fredholm(c)"}) {
      try {
        parse(bad);
        FAIL("accepted: " << bad);
      } catch (const ParseError& e) {
        REQUIRE(!e.diagnostics().empty());
        for (const auto& d : e.diagnostics()) {
          CHECK(d.begin <= d.end);
          CHECK(d.end <= bad.size());
        }
      }
    }
  }

  TEST_CASE("depth limit") {
    std::string deep(100, '(');
    deep += "x" + std::string(100, ')');
    CHECK_THROWS_AS(parse(deep), ParseError);
  }

  TEST_CASE("differentiate") {
    NumericEnv env;
    const Float x = Float::parse("0.37");
    const NodePtr f = parse("sin(x)*exp(x^2) + atan(x) + tanh(x)*ln1p(x) + xpow(x)");
    const NodePtr df = differentiate(f);
    const Float h = Float::parse("1e-20");
    const Float fd = (eval_numeric(f, x + h, env) - eval_numeric(f, x - h, env)) / (Float(2) * h);
    CHECK(rilt::testing::relative_error(eval_numeric(df, x, env), fd) < Float::parse("1e-30"));
    CHECK(const_value(differentiate(parse("gamma(3/2) + pi"))) != nullptr);
  }
}

TEST_SUITE("expression properties") {
  TEST_CASE("print then parse is the identity") {
    TreeGen gen(11);
    const PrintNames names{"x", {"u", "v"}, {"c", "rho"}};
    for (int i = 0; i < 400; ++i) {
      const NodePtr n = gen.expr(4);
      const std::string text = print(n, names);
      NodePtr back;
      try {
        back = parse(text);
      } catch (const ParseError& e) {
        FAIL("unparsable print: " << text << " : " << e.what());
      }
      CHECK_MESSAGE(structurally_equal(n, back), text << " -> " << print(back, names));
    }
  }

  TEST_CASE("printing is deterministic") {
    TreeGen a(5), b(5);
    const PrintNames names{"x", {"u", "v"}, {"c", "rho"}};
    for (int i = 0; i < 50; ++i) CHECK(print(a.expr(4), names) == print(b.expr(4), names));
  }
}
