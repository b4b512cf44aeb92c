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

/* Exercises the C interface exactly as a C client would. */

#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "rilt/rilt.h"

static int failures = 0;

#define CHECK(cond)                                                  \
  do {                                                               \
    if (!(cond)) {                                                   \
      fprintf(stderr, "%s:%d: CHECK(%s) failed\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                    \
    }                                                                \
  } while (0)

static int fabs_str_close(const char* text, double want, double tol) {
  const double got = strtod(text, NULL);
  return (got > want ? got - want : want - got) <= tol;
}

static int contains(const char* hay, const char* needle) { return hay && strstr(hay, needle) != NULL; }

static void test_parse_and_solve(void) {
  const char* text =
      "[problem]\nname = riccati\n[params]\nc\n[unknowns]\ny: c\n[equations]\nD(y) = 1 + y^2\n[solver]\norder = 3\n";
  rilt_problem* p = NULL;
  rilt_solution* s = NULL;
  char* out = NULL;
  CHECK(rilt_problem_parse(text, &p) == RILT_OK);
  CHECK(rilt_solve(p, &s) == RILT_OK);
  CHECK(rilt_solution_csv(s, &out) == RILT_OK);
  CHECK(contains(out, "1/3 + 4/3*c^2 + c^4"));
  rilt_string_free(out);
  CHECK(rilt_solution_json(s, &out) == RILT_OK);
  CHECK(contains(out, "\"unknowns\""));
  CHECK(contains(out, "\"residual_max\""));
  rilt_string_free(out);
  /* a free parameter leaves the value undefined */
  CHECK(rilt_solution_eval(s, 0, "1/2", &out) != RILT_OK);
  CHECK(strlen(rilt_last_error()) > 0);
  rilt_solution_free(s);

  CHECK(rilt_problem_set_option(p, "param:c", "0") == RILT_OK);
  CHECK(rilt_problem_set_option(p, "order", "9") == RILT_OK);
  CHECK(rilt_solve(p, &s) == RILT_OK);
  CHECK(rilt_solution_eval(s, 0, "1/2", &out) == RILT_OK);
  /* tan(1/2) = 0.5463..., truncated at order 9 */
  CHECK(out && fabs_str_close(out, 0.54630248984379051, 1e-4));
  rilt_string_free(out);
  CHECK(rilt_solution_eval_csv(s, "", &out) == RILT_OK);
  CHECK(out && strcmp(out, "x,y\n") == 0);
  rilt_string_free(out);
  CHECK(rilt_solution_eval_csv(s, "0:1/2:3", &out) == RILT_OK);
  CHECK(contains(out, "2.5e-01,"));
  rilt_string_free(out);
  CHECK(rilt_solution_eval(s, 7, "1/2", &out) == RILT_ERR_USAGE);
  rilt_solution_free(s);
  rilt_problem_free(p);
}

static void test_errors(void) {
  rilt_problem* p = NULL;
  CHECK(rilt_problem_parse("[equations]\nD(y) = y +\n", &p) == RILT_ERR_PARSE);
  CHECK(p == NULL);
  CHECK(contains(rilt_last_error(), "line 2, column"));
  CHECK(rilt_problem_builtin("no_such_problem", &p) == RILT_ERR_USAGE);
  CHECK(rilt_problem_parse(NULL, &p) == RILT_ERR_USAGE);
  CHECK(rilt_problem_builtin("ex02_riccati", &p) == RILT_OK);
  CHECK(rilt_problem_set_option(p, "backend", "quantum") == RILT_ERR_USAGE);
  CHECK(rilt_problem_set_option(p, "colour", "blue") == RILT_ERR_USAGE);
  CHECK(rilt_problem_set_option(p, "param:nope", "1") == RILT_ERR_USAGE);
  rilt_problem_free(p);
  rilt_problem_free(NULL);
  rilt_solution_free(NULL);
  rilt_string_free(NULL);
}

static void test_builtins_and_commands(void) {
  char* out = NULL;
  rilt_problem* p = NULL;
  CHECK(rilt_builtin_names(&out) == RILT_OK);
  CHECK(contains(out, "ex05_rossler"));
  CHECK(contains(out, "rotation"));
  rilt_string_free(out);

  CHECK(rilt_problem_builtin("rotation", &p) == RILT_OK);
  CHECK(rilt_traj_csv(p, "1/10", "2", &out) == RILT_OK);
  if (out) {
    int rows = 0;
    for (const char* c = out; *c; ++c) rows += *c == '\n';
    CHECK(rows == 22); /* header plus t = 0, 0.1, ..., 2 */
    CHECK(strncmp(out, "t,X,Y\n", 6) == 0);
  }
  rilt_string_free(out);
  CHECK(rilt_traj_csv(p, "0", "1", &out) == RILT_ERR_USAGE);
  CHECK(rilt_residual(p, "json", &out) == RILT_OK);
  CHECK(contains(out, "residual"));
  rilt_string_free(out);
  CHECK(rilt_converge(p, "1/2", "4,6,8,10", "csv", &out) == RILT_OK);
  rilt_string_free(out);
  CHECK(rilt_converge(p, "1/2", "4,6", "csv", &out) == RILT_ERR_USAGE);
  rilt_problem_free(p);

  int all_pass = 0;
  CHECK(rilt_bench("acceptance", "14", 20260101u, 1, "csv", &out, &all_pass) == RILT_OK);
  CHECK(all_pass == 1);
  CHECK(contains(out, "id,measured,threshold,pass,seconds,detail"));
  rilt_string_free(out);
  CHECK(rilt_bench("", NULL, 1u, 1, "csv", &out, &all_pass) == RILT_ERR_USAGE);
}

int main(void) {
  CHECK(strlen(rilt_version()) > 0);
  test_parse_and_solve();
  test_errors();
  test_builtins_and_commands();
  if (failures) fprintf(stderr, "%d check(s) failed\n", failures);
  else printf("all C API checks passed\n");
  return failures ? EXIT_FAILURE : EXIT_SUCCESS;
}
