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

#include <algorithm>
#include <cctype>
#include <functional>
#include <regex>
#include <set>
#include <sstream>

#include "rilt/error.hpp"
#include "rilt/problem.hpp"

namespace rilt {

namespace {

const std::set<std::string> kReserved = {"D",  "delay", "volterra", "fredholm", "xpow", "sin",  "cos",   "exp", "ln",
                                         "ln1p", "tan", "tanh",     "atan",     "gamma", "sqrt", "pi"};

[[noreturn]] void fail(std::size_t b, std::size_t e, std::string msg, std::vector<std::string> expected = {}) {
  throw ParseError({ParseDiagnostic{b, e, std::move(msg), std::move(expected)}});
}

struct Token {
  enum Kind { number, ident, op, end } kind = end;
  std::string text;
  std::size_t begin = 0;
  std::size_t end_pos = 0;
};

std::vector<Token> lex(std::string_view s, std::size_t offset) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    const std::size_t b = i;
    if (std::isdigit(c) || (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      }
      if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
        if (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
          i = j;
          while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        }
      }
      out.push_back({Token::number, std::string(s.substr(b, i - b)), offset + b, offset + i});
    } else if (std::isalpha(c) || c == '_') {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      out.push_back({Token::ident, std::string(s.substr(b, i - b)), offset + b, offset + i});
    } else if (std::string_view("+-*/^(),;=").find(static_cast<char>(c)) != std::string_view::npos) {
      ++i;
      out.push_back({Token::op, std::string(1, static_cast<char>(c)), offset + b, offset + i});
    } else {
      // Consume a whole UTF-8 sequence so the span stays on a character boundary.
      ++i;
      while (i < s.size() && (static_cast<unsigned char>(s[i]) & 0xC0) == 0x80) ++i;
      fail(offset + b, offset + i, "unexpected character '" + std::string(s.substr(b, i - b)) + "'");
    }
  }
  out.push_back({Token::end, "", offset + s.size(), offset + s.size()});
  return out;
}

struct Parsed {
  NodePtr node;
  std::size_t begin = 0;
  std::size_t end = 0;
};

class ExprParser {
 public:
  ExprParser(std::string_view text, ParseContext& ctx) : ctx_(ctx), toks_(lex(text, ctx.offset)) {}

  NodePtr run() {
    Parsed p = expr();
    if (peek().kind != Token::end) fail(peek().begin, peek().end_pos, "unexpected '" + peek().text + "'", {"operator", "end of input"});
    if (depth(p.node) > ctx_.max_depth)
      fail(p.begin, p.end, "expression nests deeper than " + std::to_string(ctx_.max_depth) + " levels");
    return p.node;
  }

 private:
  ParseContext& ctx_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t nesting_ = 0;

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  bool at_op(const char* op) const { return peek().kind == Token::op && peek().text == op; }
  bool accept(const char* op) {
    if (!at_op(op)) return false;
    ++pos_;
    return true;
  }
  const Token& expect(const char* op) {
    if (!at_op(op)) fail(peek().begin, peek().end_pos, "expected '" + std::string(op) + "'", {op});
    return next();
  }
  std::string expect_ident(const std::vector<std::string>& expected) {
    if (peek().kind != Token::ident) fail(peek().begin, peek().end_pos, "expected a name", expected);
    return next().text;
  }
  void expect_keyword(const char* kw) {
    if (peek().kind != Token::ident || peek().text != kw) fail(peek().begin, peek().end_pos, "expected '" + std::string(kw) + "'", {kw});
    ++pos_;
    expect("=");
  }

  template <class F>
  Parsed guarded(std::size_t b, std::size_t e, F&& f) {
    try {
      return {f(), b, e};
    } catch (const ParseError&) {
      throw;
    } catch (const Error& err) {
      fail(b, e, err.what());
    }
  }

  static const ParamScalar* plain_const(const NodePtr& n) {
    const ParamScalar* v = const_value(n);
    return v && v->is_constant() ? v : nullptr;
  }

  mpq_class exact_rational(const Parsed& p, const char* what) {
    const ParamScalar* v = plain_const(p.node);
    if (!v || !v->constant().is_exact()) fail(p.begin, p.end, std::string(what) + " must be an exact rational constant");
    return v->constant().rational();
  }

  Scalar scalar_of(const Parsed& p, const char* what) {
    const ParamScalar* v = plain_const(p.node);
    if (!v) fail(p.begin, p.end, std::string(what) + " must be a numeric constant");
    return v->constant();
  }

  Parsed expr() {
    if (++nesting_ > ctx_.max_depth) fail(peek().begin, peek().end_pos, "expression nests too deeply");
    Parsed lhs = term();
    std::vector<NodePtr> terms{lhs.node};
    std::size_t e = lhs.end;
    while (at_op("+") || at_op("-")) {
      const bool minus = next().text == "-";
      Parsed r = term();
      terms.push_back(minus ? make_neg(r.node) : r.node);
      e = r.end;
    }
    --nesting_;
    return {terms.size() == 1 ? terms[0] : make_add(std::move(terms)), lhs.begin, e};
  }

  Parsed term() {
    Parsed lhs = unary();
    std::vector<NodePtr> factors{lhs.node};
    std::size_t e = lhs.end;
    while (at_op("*") || at_op("/")) {
      const bool div = next().text == "/";
      Parsed r = unary();
      e = r.end;
      if (!div) {
        factors.push_back(r.node);
        continue;
      }
      if (!is_constant_valued(r.node)) fail(r.begin, r.end, "division is only defined for constant divisors");
      const ParamScalar* v = const_value(r.node);
      if (v && !v->is_constant()) fail(r.begin, r.end, "division by a symbolic parameter is not supported");
      if (v && v->constant().is_zero()) fail(r.begin, r.end, "division by zero");
      factors.push_back(guarded(r.begin, r.end, [&] { return make_pow(r.node, Exponent(-1)); }).node);
    }
    return {factors.size() == 1 ? factors[0] : make_mul(std::move(factors)), lhs.begin, e};
  }

  Parsed unary() {
    if (at_op("-")) {
      const std::size_t b = next().begin;
      Parsed p = unary();
      return {make_neg(p.node), b, p.end};
    }
    return power();
  }

  Parsed power() {
    Parsed base = primary();
    if (!accept("^")) return base;
    Exponent p;
    std::size_t e;
    if (peek().kind == Token::number) {
      const Token& t = next();
      e = t.end_pos;
      if (t.text.find_first_not_of("0123456789") != std::string::npos) fail(t.begin, t.end_pos, "exponent must be an integer", {"integer"});
      p = Exponent::parse(t.text);
    } else if (at_op("(")) {
      next();
      Parsed inner = expr();
      e = expect(")").end_pos;
      p = Exponent::from_rational(exact_rational(inner, "exponent"));
    } else {
      fail(peek().begin, peek().end_pos, "expected an exponent", {"integer", "("});
    }
    const bool x_base = base.node->kind == NodeKind::x;
    const bool const_base = is_constant_valued(base.node);
    if (p.den() != 1 && !x_base && !const_base)
      fail(base.begin, e, "fractional powers apply to x or constants only; use xpow for x^expr");
    if (p < Exponent(0) && !x_base && !const_base) fail(base.begin, e, "negative powers would divide by a series");
    return guarded(base.begin, e, [&] { return make_pow(base.node, p); });
  }

  std::vector<Parsed> call_args(std::size_t min, std::size_t max, const std::string& fn) {
    expect("(");
    std::vector<Parsed> args;
    if (!at_op(")")) {
      args.push_back(expr());
      while (accept(",")) args.push_back(expr());
    }
    const Token& close = expect(")");
    if (args.size() < min || args.size() > max)
      fail(close.begin, close.end_pos, fn + " takes " + std::to_string(min) + (min == max ? "" : "-" + std::to_string(max)) + " argument(s)");
    return args;
  }

  std::optional<std::size_t> find(const std::vector<std::string>& v, const std::string& name) const {
    auto it = std::find(v.begin(), v.end(), name);
    if (it == v.end()) return std::nullopt;
    return static_cast<std::size_t>(it - v.begin());
  }

  std::size_t unknown_by_name(const Token& t) {
    if (auto i = find(ctx_.unknowns, t.text)) return *i;
    if (ctx_.auto_unknowns && !find(ctx_.params, t.text)) {
      ctx_.unknowns.push_back(t.text);
      return ctx_.unknowns.size() - 1;
    }
    fail(t.begin, t.end_pos, "'" + t.text + "' is not an unknown", {"unknown name"});
  }

  Parsed primary() {
    const Token t = peek();
    if (t.kind == Token::number) {
      next();
      try {
        return {make_const(ParamScalar(Scalar::parse_series_coefficient(t.text))), t.begin, t.end_pos};
      } catch (const Error& e) {
        fail(t.begin, t.end_pos, e.what());
      }
    }
    if (accept("(")) {
      Parsed p = expr();
      const Token& close = expect(")");
      return {p.node, t.begin, close.end_pos};
    }
    if (t.kind != Token::ident)
      fail(t.begin, t.end_pos, t.kind == Token::end ? "unexpected end of input" : "unexpected '" + t.text + "'",
           {"number", "name", "("});
    next();
    const std::string& id = t.text;
    const bool call = at_op("(");

    if (id == ctx_.variable) {
      if (call) fail(t.begin, t.end_pos, "the independent variable is not a function");
      return {make_x(), t.begin, t.end_pos};
    }
    if (id == "pi" && !call) return {make_func("pi", nullptr), t.begin, t.end_pos};
    if (call) {
      if (id == "D") return derivative(t);
      if (id == "delay") return delay(t);
      if (id == "volterra") return volterra(t);
      if (id == "fredholm") return fredholm(t);
      if (id == "xpow") {
        auto a = call_args(1, 1, id);
        return {make_var_exp(a[0].node), t.begin, toks_[pos_ - 1].end_pos};
      }
      if (is_function_name(id) && id != "pi") {
        auto a = call_args(1, 1, id);
        const std::size_t e = toks_[pos_ - 1].end_pos;
        if ((id == "gamma" || id == "sqrt") && !is_constant_valued(a[0].node))
          fail(a[0].begin, a[0].end, id + " accepts constant arguments only");
        return {make_func(id, a[0].node), t.begin, e};
      }
    }
    for (auto it = ctx_.defines.rbegin(); it != ctx_.defines.rend(); ++it)
      if (it->first == id) {
        if (call) fail(t.begin, t.end_pos, "'" + id + "' is a definition, not a function");
        return {it->second, t.begin, t.end_pos};
      }
    if (auto i = find(ctx_.params, id)) {
      if (call) fail(t.begin, t.end_pos, "'" + id + "' is a parameter, not a function");
      return {make_const(ParamScalar::variable(*i)), t.begin, t.end_pos};
    }
    if (find(ctx_.unknowns, id) || ctx_.auto_unknowns) {
      const std::size_t u = unknown_by_name(t);
      if (!call) return {make_unknown(u), t.begin, t.end_pos};
      auto a = call_args(1, 1, id);
      return {make_compose(u, a[0].node), t.begin, toks_[pos_ - 1].end_pos};
    }
    fail(t.begin, t.end_pos, "unknown name '" + id + "'", {"unknown", "parameter", "definition", ctx_.variable});
  }

  Parsed derivative(const Token& t) {
    auto a = call_args(1, 2, "D");
    const std::size_t e = toks_[pos_ - 1].end_pos;
    if (a.size() == 1) return {make_oderiv(a[0].node, 1), t.begin, e};
    if (contains_unknown(a[1].node)) fail(a[1].begin, a[1].end, "derivative order cannot depend on unknowns");
    if (const ParamScalar* v = plain_const(a[1].node); v && v->constant().sign() <= 0)
      fail(a[1].begin, a[1].end, "derivative order must be positive");
    if (const ParamScalar* v = plain_const(a[1].node); v && !v->constant().is_exact())
      fail(a[1].begin, a[1].end, "derivative order must be exact");
    return guarded(t.begin, e, [&] { return make_caputo(a[1].node, a[0].node); });
  }

  Parsed delay(const Token& t) {
    expect("(");
    const Token& name = peek();
    expect_ident({"unknown name"});
    const std::size_t u = unknown_by_name(name);
    expect(";");
    Parsed lam = expr();
    expect(",");
    Parsed b = expr();
    const std::size_t e = expect(")").end_pos;
    return {make_delay(u, scalar_of(lam, "delay factor"), scalar_of(b, "delay shift")), t.begin, e};
  }

  Parsed volterra(const Token& t) {
    expect("(");
    expect_keyword("mu");
    Parsed mu = expr();
    const mpq_class m = exact_rational(mu, "mu");
    if (m <= 0 || m >= 1) fail(mu.begin, mu.end, "mu must lie in (0, 1)");
    expect(";");
    Parsed body = expr();
    const std::size_t e = expect(")").end_pos;
    return {make_volterra(m, body.node), t.begin, e};
  }

  Parsed fredholm(const Token& t) {
    expect("(");
    expect_keyword("param");
    const Token name = peek();
    const std::string pname = expect_ident({"parameter name"});
    auto pi = find(ctx_.params, pname);
    if (!pi) fail(name.begin, name.end_pos, "'" + pname + "' is not a declared parameter", {"parameter name"});
    expect(";");
    expect_keyword("basis");
    Parsed basis = expr();
    if (contains_unknown(basis.node)) fail(basis.begin, basis.end, "Fredholm basis cannot contain unknowns");
    expect(";");
    expect_keyword("integrand");
    Parsed integrand = expr();
    const std::size_t e = expect(")").end_pos;
    return {make_fredholm(pname, *pi, basis.node, integrand.node), t.begin, e};
  }
};

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// One logical entry of a problem file, with continuation lines joined.
struct Entry {
  std::string section;
  std::string text;
  std::size_t offset = 0;  // byte offset of text[0]
  std::size_t line = 0;
};

// Position of the first top-level occurrence of c, or npos.
std::size_t top_level(std::string_view s, char c) {
  int depth = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')') --depth;
    if (depth == 0 && s[i] == c) return i;
  }
  return std::string_view::npos;
}

}  // namespace

NodePtr parse_expression(std::string_view text, ParseContext& ctx) { return ExprParser(text, ctx).run(); }

NodePtr parse_expression(std::string_view text) {
  ParseContext ctx;
  ctx.auto_unknowns = true;
  return parse_expression(text, ctx);
}

std::vector<Scalar> GridSpec::points() const {
  std::vector<Scalar> out;
  if (count == 0) return out;
  if (count == 1) return {lo};
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(lo + (hi - lo) * Scalar(static_cast<long>(i)) / Scalar(static_cast<long>(count - 1)));
  return out;
}

PrintNames Problem::names() const {
  PrintNames n;
  n.variable = variable;
  for (const auto& u : unknowns) n.unknowns.push_back(u.name);
  for (const auto& p : params) n.params.push_back(p.name);
  return n;
}

std::optional<std::size_t> Problem::param_index(std::string_view name) const {
  for (std::size_t i = 0; i < params.size(); ++i)
    if (params[i].name == name) return i;
  return std::nullopt;
}

std::optional<std::size_t> Problem::unknown_index(std::string_view name) const {
  for (std::size_t i = 0; i < unknowns.size(); ++i)
    if (unknowns[i].name == name) return i;
  return std::nullopt;
}

Problem parse_problem(std::string_view text) {
  std::vector<ParseDiagnostic> diags;
  std::vector<Entry> entries;
  std::string section;
  std::size_t pos = 0, line_no = 0;
  static const std::set<std::string> known_sections = {"problem", "params", "define",      "unknowns", "equations",
                                                       "solver",  "constraints", "benchmark", "euler"};
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string t = trim(line);
    if (!t.empty()) {
      const std::size_t lead = line.find_first_not_of(" \t\r");
      if (t.front() == '[') {
        if (t.back() != ']') {
          diags.push_back({pos + lead, pos + line.size(), "malformed section header", {"]"}});
        } else {
          section = trim(std::string_view(t).substr(1, t.size() - 2));
          if (!known_sections.count(section))
            diags.push_back({pos + lead, pos + lead + t.size(), "unknown section [" + section + "]",
                             {known_sections.begin(), known_sections.end()}});
        }
      } else if (lead > 0 && !entries.empty() && entries.back().section == section) {
        // Continuation line; pad so byte offsets in the joined text stay exact.
        Entry& e = entries.back();
        const std::size_t target = pos + lead - e.offset;
        e.text.resize(target, ' ');
        e.text += t;
      } else if (section.empty()) {
        diags.push_back({pos + lead, pos + lead + t.size(), "entry outside of any section", {"[section]"}});
      } else {
        entries.push_back({section, t, pos + lead, line_no});
      }
    }
    if (eol == text.size()) break;
    pos = eol + 1;
  }

  Problem pb;
  auto section_entries = [&](const std::string& s) {
    std::vector<const Entry*> out;
    for (const auto& e : entries)
      if (e.section == s) out.push_back(&e);
    return out;
  };
  auto key_value = [&](const Entry& e) -> std::pair<std::string, std::string> {
    const std::size_t eq = top_level(e.text, '=');
    if (eq == std::string::npos) fail(e.offset, e.offset + e.text.size(), "expected 'key = value'", {"="});
    return {trim(std::string_view(e.text).substr(0, eq)), trim(std::string_view(e.text).substr(eq + 1))};
  };
  // Offset of the value part of a key = value entry.
  auto value_offset = [](const Entry& e) {
    std::size_t i = top_level(e.text, '=') + 1;
    while (i < e.text.size() && std::isspace(static_cast<unsigned char>(e.text[i]))) ++i;
    return e.offset + i;
  };
  auto guard = [&](auto&& f) {
    try {
      f();
    } catch (const ParseError& err) {
      diags.insert(diags.end(), err.diagnostics().begin(), err.diagnostics().end());
    }
  };
  auto check_name = [&](const std::string& name, const Entry& e, bool is_variable = false) {
    static const std::regex ident("[A-Za-z_][A-Za-z0-9_]*");
    if (!std::regex_match(name, ident)) fail(e.offset, e.offset + e.text.size(), "'" + name + "' is not a valid name", {"name"});
    if (kReserved.count(name) || (!is_variable && name == pb.variable))
      fail(e.offset, e.offset + name.size(), "'" + name + "' is reserved");
  };
  auto context = [&](std::size_t offset) {
    ParseContext ctx;
    ctx.variable = pb.variable;
    for (const auto& u : pb.unknowns) ctx.unknowns.push_back(u.name);
    for (const auto& p : pb.params) ctx.params.push_back(p.name);
    ctx.defines = pb.defines;
    ctx.offset = offset;
    return ctx;
  };
  auto constant = [&](const std::string& txt, std::size_t offset, bool allow_params) {
    ParseContext ctx = context(offset);
    if (!allow_params) ctx.params.clear();
    NodePtr n = parse_expression(txt, ctx);
    const ParamScalar* v = const_value(n);
    if (!v) fail(offset, offset + txt.size(), "expected a constant");
    return *v;
  };
  auto parse_uint = [&](const std::string& v, const Entry& e) {
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos || v.size() > 9)
      fail(value_offset(e), value_offset(e) + v.size(), "expected a non-negative integer", {"integer"});
    return static_cast<unsigned>(std::stoul(v));
  };

  for (const Entry* e : section_entries("problem"))
    guard([&] {
      auto [k, v] = key_value(*e);
      if (k == "name")
        pb.name = v;
      else if (k == "variable") {
        check_name(v, *e, true);
        pb.variable = v;
      } else if (k == "kind") {
        if (v == "ivp")
          pb.kind = ProblemKind::ivp;
        else if (v == "euler")
          pb.kind = ProblemKind::euler;
        else
          fail(value_offset(*e), value_offset(*e) + v.size(), "unknown problem kind", {"ivp", "euler"});
      } else {
        fail(e->offset, e->offset + k.size(), "unknown key '" + k + "'", {"name", "variable", "kind"});
      }
    });

  for (const Entry* e : section_entries("params"))
    guard([&] {
      const std::size_t eq = top_level(e->text, '=');
      const std::string name = trim(std::string_view(e->text).substr(0, eq));
      check_name(name, *e);
      if (pb.param_index(name)) fail(e->offset, e->offset + name.size(), "parameter '" + name + "' declared twice");
      if (pb.params.size() >= 7) fail(e->offset, e->offset + name.size(), "at most 7 parameters are supported");
      ParamDecl d{name, std::nullopt};
      if (eq != std::string::npos) {
        auto [k, v] = key_value(*e);
        d.value = constant(v, value_offset(*e), false).constant();
      }
      pb.params.push_back(std::move(d));
    });

  for (const Entry* e : section_entries("define"))
    guard([&] {
      auto [k, v] = key_value(*e);
      check_name(k, *e);
      if (pb.param_index(k)) fail(e->offset, e->offset + k.size(), "'" + k + "' is already a parameter");
      ParseContext ctx = context(value_offset(*e));
      pb.defines.emplace_back(k, parse_expression(v, ctx));
    });

  for (const Entry* e : section_entries("unknowns"))
    guard([&] {
      const std::size_t colon = e->text.find(':');
      const std::string name = trim(std::string_view(e->text).substr(0, colon));
      check_name(name, *e);
      if (pb.unknown_index(name) || pb.param_index(name))
        fail(e->offset, e->offset + name.size(), "name '" + name + "' declared twice");
      UnknownDecl u{name, {}};
      if (colon != std::string::npos) {
        std::size_t start = colon + 1;
        const std::string rest = e->text.substr(start);
        std::size_t i = 0;
        while (i <= rest.size()) {
          std::size_t comma = top_level(std::string_view(rest).substr(i), ',');
          const std::size_t len = comma == std::string::npos ? rest.size() - i : comma;
          const std::string piece = rest.substr(i, len);
          const std::string tp = trim(piece);
          const std::size_t lead = piece.find_first_not_of(" \t");
          if (tp.empty()) fail(e->offset + start + i, e->offset + start + i + len, "empty initial condition", {"constant"});
          u.ics.push_back(constant(tp, e->offset + start + i + lead, true));
          if (comma == std::string::npos) break;
          i += len + 1;
        }
      }
      pb.unknowns.push_back(std::move(u));
    });
  pb.equations.assign(pb.unknowns.size(), EquationDecl{});
  std::vector<bool> have_equation(pb.unknowns.size(), false);

  for (const Entry* e : section_entries("solver"))
    guard([&] {
      auto [k, v] = key_value(*e);
      const std::size_t vo = value_offset(*e);
      if (k == "order") {
        pb.solver.order = parse_uint(v, *e);
        if (pb.solver.order == 0) fail(vo, vo + v.size(), "order must be positive");
      } else if (k == "precision") {
        pb.solver.precision = parse_uint(v, *e);
        if (pb.solver.precision < 10) fail(vo, vo + v.size(), "precision must be at least 10 digits");
      } else if (k == "backend") {
        if (v == "rational")
          pb.solver.backend = Backend::rational;
        else if (v == "float")
          pb.solver.backend = Backend::floating;
        else
          fail(vo, vo + v.size(), "unknown backend", {"rational", "float"});
      } else if (k == "max_iterations") {
        pb.solver.max_iterations = parse_uint(v, *e);
      } else if (k == "projection") {
        if (v == "none")
          pb.solver.projection = Projection::none;
        else if (v == "polynomial")
          pb.solver.projection = Projection::polynomial;
        else
          fail(vo, vo + v.size(), "unknown projection", {"none", "polynomial"});
      } else if (k == "domain") {
        const Scalar d = constant(v, vo, false).constant();
        if (d.sign() <= 0) fail(vo, vo + v.size(), "domain length must be positive");
        pb.solver.domain = d;
      } else if (k == "log_cap") {
        pb.solver.log_cap = parse_uint(v, *e);
      } else {
        fail(e->offset, e->offset + k.size(), "unknown solver key '" + k + "'",
             {"order", "precision", "backend", "max_iterations", "projection", "domain", "log_cap"});
      }
    });

  for (const Entry* e : section_entries("equations"))
    guard([&] {
      const std::size_t eq = top_level(e->text, '=');
      if (eq == std::string::npos) fail(e->offset, e->offset + e->text.size(), "expected 'D(u, order) = rhs'", {"="});
      ParseContext lctx = context(e->offset);
      NodePtr lhs = parse_expression(std::string_view(e->text).substr(0, eq), lctx);
      EquationDecl d;
      if (lhs->kind == NodeKind::oderiv && lhs->arg()->kind == NodeKind::unknown) {
        d.order = make_const(ParamScalar(Scalar(lhs->power.rational())));
      } else if (lhs->kind == NodeKind::caputo && lhs->arg()->kind == NodeKind::unknown) {
        d.order = lhs->order;
      } else {
        fail(e->offset, e->offset + eq, "left side must be D(u, order) of a single unknown", {"D(u, order)"});
      }
      d.unknown = lhs->arg()->index;
      if (have_equation[d.unknown])
        fail(e->offset, e->offset + eq, "second equation for '" + pb.unknowns[d.unknown].name + "'");
      // claimed before the right side parses, so a bad right side is reported once
      have_equation[d.unknown] = true;
      ParseContext rctx = context(value_offset(*e));
      d.rhs = parse_expression(std::string_view(e->text).substr(eq + 1), rctx);
      // Constant orders are checked against the IC count here; the rest when the problem is solved.
      NodePtr order = d.order;
      std::vector<std::optional<Scalar>> defaults;
      for (const auto& p : pb.params) defaults.push_back(p.value);
      order = bind_params(order, defaults);
      if (const ParamScalar* v = const_value(order); v && v->is_constant() && v->constant().is_exact()) {
        mpz_class n;
        mpz_cdiv_q(n.get_mpz_t(), v->constant().rational().get_num_mpz_t(), v->constant().rational().get_den_mpz_t());
        const auto& ics = pb.unknowns[d.unknown].ics;
        if (n.get_ui() != ics.size())
          fail(e->offset, e->offset + eq,
               "order " + v->constant().str() + " needs " + n.get_str() + " initial condition(s) for '" + pb.unknowns[d.unknown].name +
                   "', found " + std::to_string(ics.size()));
      }
      pb.equations[d.unknown] = std::move(d);
    });
  if (pb.kind == ProblemKind::ivp)
    for (std::size_t i = 0; i < pb.unknowns.size(); ++i)
      if (!have_equation[i]) diags.push_back({0, 0, "unknown '" + pb.unknowns[i].name + "' has no equation", {"[equations]"}});

  for (const Entry* e : section_entries("constraints"))
    guard([&] {
      auto [k, v] = key_value(*e);
      ParseContext ctx = context(e->offset);
      NodePtr lhs = parse_expression(k, ctx);
      if (lhs->kind != NodeKind::delay || !lhs->lambda.is_zero())
        fail(e->offset, e->offset + k.size(), "constraint must read u(point) = value", {"u(point)"});
      pb.constraints.push_back({lhs->index, lhs->shift, constant(v, value_offset(*e), true)});
    });

  pb.benchmark.exact.assign(pb.unknowns.size(), nullptr);
  for (const Entry* e : section_entries("benchmark"))
    guard([&] {
      auto [k, v] = key_value(*e);
      const std::size_t vo = value_offset(*e);
      if (k == "grid") {
        static const std::regex g(R"(\s*([^:]+):([^:]+):(\d+)\s*)");
        std::smatch m;
        if (!std::regex_match(v, m, g)) fail(vo, vo + v.size(), "grid must read lo:hi:count", {"lo:hi:count"});
        GridSpec gs;
        gs.lo = constant(trim(m[1].str()), vo, false).constant();
        gs.hi = constant(trim(m[2].str()), vo, false).constant();
        gs.count = std::stoul(m[3].str());
        pb.benchmark.grid = gs;
        return;
      }
      std::size_t u = 0;
      if (k == "exact") {
        if (pb.unknowns.size() != 1) fail(e->offset, e->offset + k.size(), "use exact.<unknown> for systems", {"exact.<unknown>"});
      } else if (k.rfind("exact.", 0) == 0) {
        auto idx = pb.unknown_index(k.substr(6));
        if (!idx) fail(e->offset, e->offset + k.size(), "unknown '" + k.substr(6) + "'");
        u = *idx;
      } else {
        fail(e->offset, e->offset + k.size(), "unknown benchmark key '" + k + "'", {"exact", "grid"});
      }
      ParseContext ctx = context(vo);
      ctx.unknowns.clear();
      pb.benchmark.exact[u] = parse_expression(v, ctx);
    });

  if (pb.kind == ProblemKind::euler) {
    EulerDecl ed;
    bool have_coeffs = false;
    for (const Entry* e : section_entries("euler"))
      guard([&] {
        auto [k, v] = key_value(*e);
        const std::size_t vo = value_offset(*e);
        if (k == "coefficients") {
          std::stringstream ss(v);
          std::string item;
          while (std::getline(ss, item, ',')) {
            const Scalar s = Scalar::parse_exact(trim(item));
            ed.coefficients.push_back(s.rational());
          }
          have_coeffs = true;
        } else if (k == "forcing") {
          const std::string body = std::regex_replace(v, std::regex(R"(\s+)"), "");
          if (body == "0") return;
          static const std::regex term(R"(([+-]?)(\d+|\(-?\d+/\d+\))/ln\(([A-Za-z_]\w*)\)(?:\^(\d+))?)");
          auto it = std::sregex_iterator(body.begin(), body.end(), term);
          std::size_t consumed = 0;
          for (; it != std::sregex_iterator(); ++it) {
            const auto& m = *it;
            if (static_cast<std::size_t>(m.position()) != consumed || m[3].str() != pb.variable) break;
            std::string c = m[2].str();
            if (c.front() == '(') c = c.substr(1, c.size() - 2);
            mpq_class q = Scalar::parse_exact(c).rational();
            if (m[1].str() == "-") q = -q;
            const unsigned p = m[4].matched ? static_cast<unsigned>(std::stoul(m[4].str())) : 1U;
            ed.forcing.emplace_back(q, p);
            consumed += static_cast<std::size_t>(m.length());
          }
          if (consumed != body.size())
            fail(vo, vo + v.size(), "forcing must be a sum of c/ln(" + pb.variable + ")^p terms", {"c/ln(x)^p"});
        } else {
          fail(e->offset, e->offset + k.size(), "unknown euler key '" + k + "'", {"coefficients", "forcing"});
        }
      });
    if (!have_coeffs) diags.push_back({0, 0, "euler problem needs coefficients", {"coefficients"}});
    if (pb.unknowns.size() != 1) diags.push_back({0, 0, "euler problem has exactly one unknown", {"[unknowns]"}});
    pb.euler = std::move(ed);
  } else if (!section_entries("euler").empty()) {
    diags.push_back({section_entries("euler").front()->offset, section_entries("euler").front()->offset, "[euler] needs kind = euler", {"kind = euler"}});
  }
  if (pb.unknowns.empty() && diags.empty()) diags.push_back({0, 0, "problem declares no unknowns", {"[unknowns]"}});

  for (auto& d : diags) {
    d.begin = std::min(d.begin, text.size());
    d.end = std::clamp(d.end, d.begin, text.size());
  }
  if (!diags.empty()) throw ParseError(std::move(diags));
  return pb;
}

}  // namespace rilt
