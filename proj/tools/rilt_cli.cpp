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

// Command-line front end. Talks to the solver only through the C API.

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rilt/rilt.h"

namespace {

struct Failure {
  int code;
  std::string message;
};

int exit_code(rilt_status s) {
  switch (s) {
    case RILT_OK:
      return 0;
    case RILT_ERR_USAGE:
      return 1;
    case RILT_ERR_PARSE:
      return 2;
    case RILT_ERR_ACCEPTANCE:
      return 4;
    default:
      return 3;
  }
}

void check(rilt_status s) {
  if (s != RILT_OK) throw Failure{exit_code(s), rilt_last_error()};
}

struct CString {
  char* p = nullptr;
  ~CString() { rilt_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct ProblemHandle {
  rilt_problem* p = nullptr;
  ~ProblemHandle() { rilt_problem_free(p); }
};

struct SolutionHandle {
  rilt_solution* s = nullptr;
  ~SolutionHandle() { rilt_solution_free(s); }
};

struct Globals {
  std::optional<unsigned> order;
  std::optional<unsigned> precision;
  std::optional<std::string> backend;
  std::vector<std::string> params;
  std::optional<std::string> format;
  std::optional<std::string> out;
  std::uint64_t seed = 20260101;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{1, "cannot read '" + path + "'"};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A path, or the name of a built-in problem when no such file exists.
void load(const std::string& source, const Globals& g, ProblemHandle& h) {
  if (std::filesystem::exists(source)) {
    check(rilt_problem_parse(read_file(source).c_str(), &h.p));
  } else if (source.find('/') == std::string::npos && source.find('.') == std::string::npos) {
    check(rilt_problem_builtin(source.c_str(), &h.p));
  } else {
    throw Failure{1, "no such file '" + source + "'"};
  }
  std::optional<unsigned> precision = g.precision;
  if (!precision)
    if (const char* env = std::getenv("RILT_PRECISION"); env && *env) check(rilt_problem_set_option(h.p, "precision", env));
  if (precision) check(rilt_problem_set_option(h.p, "precision", std::to_string(*precision).c_str()));
  if (g.order) check(rilt_problem_set_option(h.p, "order", std::to_string(*g.order).c_str()));
  if (g.backend) check(rilt_problem_set_option(h.p, "backend", g.backend->c_str()));
  for (const auto& kv : g.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw Failure{1, "--param expects name=value, got '" + kv + "'"};
    check(rilt_problem_set_option(h.p, ("param:" + kv.substr(0, eq)).c_str(), kv.substr(eq + 1).c_str()));
  }
}

std::string format_of(const Globals& g, const std::string& fallback, std::initializer_list<const char*> allowed) {
  const std::string f = g.format.value_or(fallback);
  for (const char* a : allowed)
    if (f == a) return f;
  throw Failure{1, "--format " + f + " is not available for this command"};
}

// Write-then-rename so a failed run never leaves a partial file behind.
void emit(const Globals& g, const std::string& text) {
  if (!g.out) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  const std::filesystem::path target(*g.out);
  const std::filesystem::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Failure{1, "cannot write '" + tmp.string() + "'"};
    f << text;
    f.flush();
    if (!f) {
      std::filesystem::remove(tmp);
      throw Failure{1, "write to '" + tmp.string() + "' failed"};
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Failure{1, "cannot rename onto '" + target.string() + "': " + ec.message()};
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Series solver for fractional, delay and integro-differential equations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rilt_version());
  Globals g;
  auto add_globals = [&](CLI::App* sub) {
    sub->add_option("--order", g.order, "Truncation order N");
    sub->add_option("--precision", g.precision, "Working precision in decimal digits");
    sub->add_option("--backend", g.backend, "Scalar backend")->check(CLI::IsMember({"rational", "float"}));
    sub->add_option("--param", g.params, "Bind a parameter, name=value (repeatable)");
    sub->add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", g.out, "Write to this file instead of stdout");
    sub->add_option("--seed", g.seed, "Seed for randomized suites");
  };

  std::string file, suite, at, grid, dt, until, levels = "5,10,15,20,25,30";
  std::optional<std::string> only;
  unsigned jobs = 0;

  auto* solve = app.add_subcommand("solve", "Solve and print every unknown's series");
  solve->add_option("file", file, "Problem file or built-in name")->required();
  add_globals(solve);

  auto* evalc = app.add_subcommand("eval", "Evaluate the solution on a grid (CSV)");
  evalc->add_option("file", file, "Problem file or built-in name")->required();
  auto* at_opt = evalc->add_option("--at", grid, "lo:hi:count or comma-separated points (empty: header only); defaults to the problem's grid")
                     ->expected(0, 1);
  add_globals(evalc);

  auto* residual = app.add_subcommand("residual", "Residual series of the solution");
  residual->add_option("file", file, "Problem file or built-in name")->required();
  add_globals(residual);

  auto* traj = app.add_subcommand("traj", "Step the solution forward with local series (CSV)");
  traj->add_option("file", file, "Problem file or built-in name")->required();
  traj->add_option("--dt", dt, "Step size")->required();
  traj->add_option("--until", until, "Final time")->required();
  add_globals(traj);

  auto* bench = app.add_subcommand("bench", "Run a benchmark suite (acceptance, tables)");
  bench->add_option("suite", suite, "Suite name")->required();
  bench->add_option("--only", only, "Run a single criterion");
  bench->add_option("--jobs", jobs, "Worker threads (0 = all cores)");
  add_globals(bench);

  auto* converge = app.add_subcommand("converge", "Fit the error decay over truncation orders");
  converge->add_option("file", file, "Problem file or built-in name")->required();
  converge->add_option("--at", at, "Probe point x*")->required();
  converge->add_option("--levels", levels, "Comma-separated truncation orders (at least 4)");
  add_globals(converge);

  auto* list = app.add_subcommand("list", "List the built-in problems");
  add_globals(list);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*solve) {
      ProblemHandle p;
      load(file, g, p);
      SolutionHandle s;
      check(rilt_solve(p.p, &s.s));
      CString out;
      check(format_of(g, "json", {"json", "csv"}) == "json" ? rilt_solution_json(s.s, &out.p) : rilt_solution_csv(s.s, &out.p));
      emit(g, out.str());
    } else if (*evalc) {
      format_of(g, "csv", {"csv"});
      ProblemHandle p;
      load(file, g, p);
      SolutionHandle s;
      check(rilt_solve(p.p, &s.s));
      CString out;
      check(rilt_solution_eval_csv(s.s, at_opt->count() ? grid.c_str() : nullptr, &out.p));
      emit(g, out.str());
    } else if (*residual) {
      ProblemHandle p;
      load(file, g, p);
      CString out;
      check(rilt_residual(p.p, format_of(g, "json", {"json", "csv"}).c_str(), &out.p));
      emit(g, out.str());
    } else if (*traj) {
      format_of(g, "csv", {"csv"});
      ProblemHandle p;
      load(file, g, p);
      CString out;
      check(rilt_traj_csv(p.p, dt.c_str(), until.c_str(), &out.p));
      emit(g, out.str());
    } else if (*converge) {
      ProblemHandle p;
      load(file, g, p);
      CString out;
      check(rilt_converge(p.p, at.c_str(), levels.c_str(), format_of(g, "json", {"json", "csv"}).c_str(), &out.p));
      emit(g, out.str());
    } else if (*bench) {
      CString out;
      int all_pass = 0;
      check(rilt_bench(suite.c_str(), only ? only->c_str() : nullptr, g.seed, jobs, format_of(g, "csv", {"csv", "json"}).c_str(),
                       &out.p, &all_pass));
      emit(g, out.str());
      if (!all_pass) {
        std::cerr << "rilt: some criteria failed\n";
        return 4;
      }
    } else if (*list) {
      CString out;
      check(rilt_builtin_names(&out.p));
      emit(g, out.str());
    }
  } catch (const Failure& f) {
    std::cerr << "rilt: error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "rilt: error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
