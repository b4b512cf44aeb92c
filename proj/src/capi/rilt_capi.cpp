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

#include "rilt/rilt.h"

#include <cstring>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "rilt/bench.hpp"
#include "rilt/engine.hpp"
#include "rilt/error.hpp"
#include "rilt/euler.hpp"
#include "rilt/problems.hpp"

struct rilt_problem {
  rilt::Problem pb;
  rilt::SolveOptions opts;
};

struct rilt_solution {
  rilt::Problem pb;
  unsigned precision = 50;
  // Initial value problems.
  std::optional<rilt::ProblemSpec> spec;
  rilt::SolveReport report;
  rilt::Bindings bindings;
  // Euler problems.
  std::optional<rilt::EulerSolution> euler;
};

namespace {

thread_local std::string g_last_error;

using json = nlohmann::ordered_json;

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <class F>
rilt_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return RILT_OK;
  } catch (const rilt::ParseError& e) {
    std::string msg;
    for (const auto& d : e.diagnostics()) msg += (msg.empty() ? "" : "\n") + d.str();
    g_last_error = msg.empty() ? e.what() : msg;
    return RILT_ERR_PARSE;
  } catch (const rilt::Error& e) {
    g_last_error = e.what();
    return static_cast<rilt_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return RILT_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RILT_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw rilt::Error(rilt::ErrorCode::usage, std::string(what) + " is null");
}

unsigned parse_unsigned(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos || v.size() > 9)
    throw rilt::Error(rilt::ErrorCode::usage, key + " expects a non-negative integer, got '" + v + "'");
  return static_cast<unsigned>(std::stoul(v));
}

unsigned precision_of(const rilt_problem* p) { return p->opts.precision.value_or(p->pb.solver.precision); }

// Working-precision digits with trailing zeros of the mantissa removed.
std::string num(const rilt::Float& f) {
  std::string s = f.str(rilt::current_precision().digits);
  const auto e = s.find('e');
  if (e == std::string::npos) return s;
  std::string mant = s.substr(0, e);
  if (mant.find('.') != std::string::npos) {
    mant.erase(mant.find_last_not_of('0') + 1);
    if (mant.back() == '.') mant.pop_back();
  }
  return mant + s.substr(e);
}
std::string num(const rilt::Scalar& s) { return s.is_exact() ? s.str() : num(s.to_float()); }

std::vector<rilt::Scalar> parse_grid(const std::string& text) {
  std::vector<rilt::Scalar> out;
  if (text.find(':') != std::string::npos) {
    std::stringstream ss(text);
    std::string lo, hi, count;
    std::getline(ss, lo, ':');
    std::getline(ss, hi, ':');
    std::getline(ss, count);
    rilt::GridSpec g;
    g.lo = rilt::Scalar::parse_exact(lo);
    g.hi = rilt::Scalar::parse_exact(hi);
    g.count = parse_unsigned("grid count", count);
    return g.points();
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (item.find_first_not_of(" \t") != std::string::npos) out.push_back(rilt::Scalar::parse_exact(item));
  return out;
}

json report_json(const rilt_solution& s) {
  json r;
  r["iterations"] = s.report.iterations;
  r["residual_max"] = num(s.report.residual_max.to_float());
  json roots = json::array();
  for (const auto& root : s.report.roots)
    roots.push_back({{"param", root.param},
                     {"value", num(root.value)},
                     {"admissible", root.admissible},
                     {"score", num(root.score.to_float())},
                     {"chosen", root.chosen}});
  r["roots"] = roots;
  return r;
}

rilt::Scalar eval_unknown(const rilt_solution& s, unsigned index, const rilt::Scalar& x) {
  if (s.euler) {
    if (index != 0) throw rilt::Error(rilt::ErrorCode::usage, "Euler problems have one unknown");
    return rilt::Scalar(s.euler->eval(x.to_float()));
  }
  if (index >= s.report.solution.size()) throw rilt::Error(rilt::ErrorCode::usage, "unknown index out of range");
  return rilt::eval(s.report.solution[index], x, s.bindings);
}

std::string series_csv(const std::vector<std::string>& names, const std::vector<rilt::Series>& series) {
  std::ostringstream os;
  os << "unknown,power,log,coefficient\n";
  for (std::size_t i = 0; i < series.size(); ++i)
    for (const auto& [k, c] : series[i].terms())
      os << names[i] << ',' << k.power.str() << ',' << k.logpow << ",\"" << c.str(*series[i].space(), 0) << "\"\n";
  return os.str();
}

json series_json(const std::vector<std::string>& names, const std::vector<rilt::Series>& series) {
  json out;
  for (std::size_t i = 0; i < series.size(); ++i) {
    json entry;
    entry["text"] = series[i].str();
    entry["series"] = json::parse(rilt::serialize(series[i]));
    out[names[i]] = entry;
  }
  return out;
}

std::vector<std::string> unknown_names(const rilt::Problem& pb) {
  std::vector<std::string> n;
  for (const auto& u : pb.unknowns) n.push_back(u.name);
  return n;
}

}  // namespace

extern "C" {

const char* rilt_version(void) { return "0.1.0"; }

const char* rilt_last_error(void) { return g_last_error.c_str(); }

void rilt_string_free(char* s) { std::free(s); }

rilt_status rilt_problem_parse(const char* text, rilt_problem** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = nullptr;
    auto p = std::make_unique<rilt_problem>();
    try {
      p->pb = rilt::parse_problem(text);
    } catch (const rilt::ParseError& e) {
      std::string msg;
      for (const auto& d : e.diagnostics()) msg += (msg.empty() ? "" : "\n") + d.str(text);
      throw rilt::Error(rilt::ErrorCode::parse, msg.empty() ? e.what() : msg);
    }
    *out = p.release();
  });
}

rilt_status rilt_problem_builtin(const char* name, rilt_problem** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    *out = nullptr;
    auto p = std::make_unique<rilt_problem>();
    p->pb = rilt::load_builtin(name);
    *out = p.release();
  });
}

rilt_status rilt_builtin_names(char** out) {
  return guarded([&] {
    require(out, "out");
    std::string s;
    for (const auto& p : rilt::builtin_problems()) s += std::string(p.name) + "\n";
    *out = dup(s);
  });
}

rilt_status rilt_problem_set_option(rilt_problem* p, const char* key_c, const char* value_c) {
  return guarded([&] {
    require(p, "problem");
    require(key_c, "key");
    require(value_c, "value");
    const std::string key = key_c, v = value_c;
    if (key == "order") {
      p->opts.order = parse_unsigned(key, v);
    } else if (key == "precision") {
      p->opts.precision = parse_unsigned(key, v);
      if (*p->opts.precision < 10) throw rilt::Error(rilt::ErrorCode::usage, "precision must be at least 10 digits");
    } else if (key == "max_iterations") {
      p->opts.max_iterations = parse_unsigned(key, v);
    } else if (key == "backend") {
      if (v == "rational")
        p->opts.backend = rilt::Backend::rational;
      else if (v == "float")
        p->opts.backend = rilt::Backend::floating;
      else
        throw rilt::Error(rilt::ErrorCode::usage, "backend must be rational or float");
    } else if (key == "projection") {
      if (v == "none")
        p->opts.projection = rilt::Projection::none;
      else if (v == "polynomial")
        p->opts.projection = rilt::Projection::polynomial;
      else
        throw rilt::Error(rilt::ErrorCode::usage, "projection must be none or polynomial");
    } else if (key.rfind("param:", 0) == 0) {
      const std::string name = key.substr(6);
      if (!p->pb.param_index(name)) throw rilt::Error(rilt::ErrorCode::usage, "problem has no parameter '" + name + "'");
      rilt::PrecisionScope ps({precision_of(p), rilt::current_precision().guard});
      rilt::Scalar value;
      try {
        value = rilt::Scalar::parse_exact(v);
      } catch (const rilt::Error&) {
        value = rilt::Scalar(rilt::Float::parse(v));
      }
      std::erase_if(p->opts.params, [&](const auto& kv) { return kv.first == name; });
      p->opts.params.emplace_back(name, value);
    } else {
      throw rilt::Error(rilt::ErrorCode::usage, "unknown option '" + key + "'");
    }
  });
}

void rilt_problem_free(rilt_problem* p) { delete p; }

rilt_status rilt_solve(const rilt_problem* p, rilt_solution** out) {
  return guarded([&] {
    require(p, "problem");
    require(out, "out");
    *out = nullptr;
    auto s = std::make_unique<rilt_solution>();
    s->pb = p->pb;
    s->precision = precision_of(p);
    rilt::PrecisionScope ps({s->precision, rilt::current_precision().guard});
    if (p->pb.kind == rilt::ProblemKind::euler) {
      s->euler = rilt::euler_solve(*p->pb.euler);
    } else {
      s->spec = rilt::build_spec(p->pb, p->opts);
      s->report = rilt::solve(*s->spec);
      s->bindings = s->spec->bindings;
      for (const auto& r : s->report.roots)
        if (r.chosen) s->bindings[*s->spec->space->index_of(r.param)] = r.value;
    }
    *out = s.release();
  });
}

rilt_status rilt_solution_json(const rilt_solution* s, char** out) {
  return guarded([&] {
    require(s, "solution");
    require(out, "out");
    rilt::PrecisionScope ps({s->precision, rilt::current_precision().guard});
    json j;
    j["problem"] = s->pb.name;
    if (s->euler) {
      j["kind"] = "euler";
      j["transform"] = s->euler->str();
    } else {
      j["kind"] = "ivp";
      j["unknowns"] = series_json(unknown_names(s->pb), s->report.solution);
      j["report"] = report_json(*s);
    }
    *out = dup(j.dump(2) + "\n");
  });
}

rilt_status rilt_solution_csv(const rilt_solution* s, char** out) {
  return guarded([&] {
    require(s, "solution");
    require(out, "out");
    if (s->euler) throw rilt::Error(rilt::ErrorCode::usage, "Euler solutions have no series; use JSON output");
    rilt::PrecisionScope ps({s->precision, rilt::current_precision().guard});
    *out = dup(series_csv(unknown_names(s->pb), s->report.solution));
  });
}

rilt_status rilt_solution_eval(const rilt_solution* s, unsigned index, const char* x, char** out) {
  return guarded([&] {
    require(s, "solution");
    require(x, "x");
    require(out, "out");
    rilt::PrecisionScope ps({s->precision, rilt::current_precision().guard});
    *out = dup(num(eval_unknown(*s, index, rilt::Scalar::parse_exact(x)).to_float()));
  });
}

rilt_status rilt_solution_eval_csv(const rilt_solution* s, const char* grid, char** out) {
  return guarded([&] {
    require(s, "solution");
    require(out, "out");
    rilt::PrecisionScope ps({s->precision, rilt::current_precision().guard});
    std::vector<rilt::Scalar> points;
    if (grid) {
      points = parse_grid(grid);
    } else if (s->pb.benchmark.grid) {
      points = s->pb.benchmark.grid->points();
    } else {
      throw rilt::Error(rilt::ErrorCode::usage, "no grid given and the problem declares none");
    }
    const auto names = unknown_names(s->pb);
    std::ostringstream os;
    os << s->pb.variable;
    for (const auto& n : names) os << ',' << n;
    os << '\n';
    for (const auto& x : points) {
      os << num(x.to_float());
      for (unsigned i = 0; i < names.size(); ++i) os << ',' << num(eval_unknown(*s, i, x).to_float());
      os << '\n';
    }
    *out = dup(os.str());
  });
}

void rilt_solution_free(rilt_solution* s) { delete s; }

rilt_status rilt_residual(const rilt_problem* p, const char* format, char** out) {
  return guarded([&] {
    require(p, "problem");
    require(out, "out");
    const std::string fmt = format ? format : "json";
    if (fmt != "json" && fmt != "csv") throw rilt::Error(rilt::ErrorCode::usage, "format must be json or csv");
    rilt::PrecisionScope ps({precision_of(p), rilt::current_precision().guard});
    const rilt::ProblemSpec spec = rilt::build_spec(p->pb, p->opts);
    const rilt::SolveReport rep = rilt::solve(spec);
    const auto names = unknown_names(p->pb);
    if (fmt == "csv") {
      *out = dup(series_csv(names, rep.residual));
      return;
    }
    json j;
    j["problem"] = p->pb.name;
    j["residual_max"] = num(rep.residual_max.to_float());
    j["residual"] = series_json(names, rep.residual);
    *out = dup(j.dump(2) + "\n");
  });
}

rilt_status rilt_traj_csv(const rilt_problem* p, const char* dt, const char* until, char** out) {
  return guarded([&] {
    require(p, "problem");
    require(dt, "dt");
    require(until, "until");
    require(out, "out");
    rilt::PrecisionScope ps({precision_of(p), rilt::current_precision().guard});
    const rilt::Trajectory tr =
        rilt::step_solve(p->pb, p->opts, rilt::StepOptions{rilt::Scalar::parse_exact(dt), rilt::Scalar::parse_exact(until), std::nullopt});
    std::ostringstream os;
    os << p->pb.variable;
    for (const auto& n : tr.names) os << ',' << n;
    os << '\n';
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
      os << num(tr.t[k].to_float());
      for (const auto& v : tr.state[k]) os << ',' << num(v.to_float());
      os << '\n';
    }
    *out = dup(os.str());
  });
}

rilt_status rilt_converge(const rilt_problem* p, const char* at, const char* levels, const char* format, char** out) {
  return guarded([&] {
    require(p, "problem");
    require(at, "at");
    require(levels, "levels");
    require(out, "out");
    const std::string fmt = format ? format : "json";
    if (fmt != "json" && fmt != "csv") throw rilt::Error(rilt::ErrorCode::usage, "format must be json or csv");
    std::vector<unsigned> lv;
    std::stringstream ss(levels);
    std::string item;
    while (std::getline(ss, item, ',')) lv.push_back(parse_unsigned("levels", item));
    rilt::PrecisionScope ps({precision_of(p), rilt::current_precision().guard});
    const rilt::ConvergenceEstimate est = rilt::convergence_probe(p->pb, p->opts, rilt::Scalar::parse_exact(at), lv);
    if (fmt == "csv") {
      std::ostringstream os;
      os << "N,error\n";
      for (std::size_t i = 0; i < est.levels.size(); ++i) os << est.levels[i] << ',' << est.errors[i].str(6) << '\n';
      *out = dup(os.str());
      return;
    }
    json j;
    j["problem"] = p->pb.name;
    j["at"] = at;
    json rows = json::array();
    for (std::size_t i = 0; i < est.levels.size(); ++i) rows.push_back({{"N", est.levels[i]}, {"error", est.errors[i].str(6)}});
    j["levels"] = rows;
    j["saturated"] = est.saturated;
    if (est.ratio) {
      j["M"] = est.M->str(6);
      j["beta"] = est.beta->str(6);
      j["ratio"] = est.ratio->str(6);
      j["tail_bound"] = est.tail_bound->str(6);
    }
    *out = dup(j.dump(2) + "\n");
  });
}

rilt_status rilt_bench(const char* suite, const char* only, uint64_t seed, unsigned jobs, const char* format, char** out,
                       int* all_pass) {
  return guarded([&] {
    require(suite, "suite");
    require(out, "out");
    const std::string fmt = format ? format : "csv";
    if (fmt != "json" && fmt != "csv") throw rilt::Error(rilt::ErrorCode::usage, "format must be json or csv");
    rilt::SuiteOptions o;
    if (only) o.only = only;
    o.seed = seed;
    o.jobs = jobs;
    const auto results = rilt::run_suite(suite, o);
    bool pass = true;
    for (const auto& r : results) pass = pass && r.pass;
    if (all_pass) *all_pass = pass ? 1 : 0;
    *out = dup(fmt == "csv" ? rilt::manifest_csv(results) : rilt::manifest_json(results));
  });
}

}  // extern "C"
