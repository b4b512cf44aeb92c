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

/* C interface to the rilt solver. All strings returned through `char**`
 * out-parameters are owned by the caller and released with rilt_string_free.
 * On failure a function returns a nonzero status and rilt_last_error() holds
 * the message for the calling thread. */

#ifndef RILT_RILT_H
#define RILT_RILT_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define RILT_API __declspec(dllexport)
#else
#define RILT_API __attribute__((visibility("default")))
#endif

typedef enum rilt_status {
  RILT_OK = 0,
  RILT_ERR_USAGE = 1,
  RILT_ERR_PARSE = 2,
  RILT_ERR_SOLVE = 3,
  RILT_ERR_ACCEPTANCE = 4,
  RILT_ERR_DOMAIN = 5,
  RILT_ERR_INTERNAL = 6
} rilt_status;

typedef struct rilt_problem rilt_problem;
typedef struct rilt_solution rilt_solution;

RILT_API const char* rilt_version(void);
RILT_API const char* rilt_last_error(void);
RILT_API void rilt_string_free(char* s);

RILT_API rilt_status rilt_problem_parse(const char* text, rilt_problem** out);
/* Problems shipped with the library, by file stem (e.g. "ex02_riccati"). */
RILT_API rilt_status rilt_problem_builtin(const char* name, rilt_problem** out);
/* Newline-separated list of built-in problem names. */
RILT_API rilt_status rilt_builtin_names(char** out);
/* Keys: order, precision, backend (rational|float), projection
 * (none|polynomial), max_iterations, param:NAME. */
RILT_API rilt_status rilt_problem_set_option(rilt_problem* p, const char* key, const char* value);
RILT_API void rilt_problem_free(rilt_problem* p);

RILT_API rilt_status rilt_solve(const rilt_problem* p, rilt_solution** out);
/* JSON document with every unknown's series and the solve report. */
RILT_API rilt_status rilt_solution_json(const rilt_solution* s, char** out);
/* CSV rows unknown,power,log,coefficient. */
RILT_API rilt_status rilt_solution_csv(const rilt_solution* s, char** out);
/* Value of unknown `index` at x, written as decimal text. */
RILT_API rilt_status rilt_solution_eval(const rilt_solution* s, unsigned index, const char* x, char** out);
/* CSV over a grid "lo:hi:count" or a comma-separated list; "" gives the
 * header only. NULL uses the problem's benchmark grid. */
RILT_API rilt_status rilt_solution_eval_csv(const rilt_solution* s, const char* grid, char** out);
RILT_API void rilt_solution_free(rilt_solution* s);

/* Residual series of the solved problem, as JSON or CSV (format "json"/"csv"). */
RILT_API rilt_status rilt_residual(const rilt_problem* p, const char* format, char** out);
/* Piecewise-series trajectory, CSV header t,<unknowns...>. */
RILT_API rilt_status rilt_traj_csv(const rilt_problem* p, const char* dt, const char* until, char** out);
/* Truncation-level convergence fit at x = at; levels comma-separated. */
RILT_API rilt_status rilt_converge(const rilt_problem* p, const char* at, const char* levels, const char* format, char** out);
/* Runs a benchmark suite ("acceptance" or "tables"). `only` may be NULL.
 * *all_pass receives 1 when every criterion passed. */
RILT_API rilt_status rilt_bench(const char* suite, const char* only, uint64_t seed, unsigned jobs, const char* format, char** out,
                                int* all_pass);

#ifdef __cplusplus
}
#endif

#endif /* RILT_RILT_H */
