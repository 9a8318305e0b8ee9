/* Exercises the C interface from plain C, linking only the shared library. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "symsolve/symsolve.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static void write_file(const char* path, const char* text) {
  FILE* f = fopen(path, "w");
  fputs(text, f);
  fclose(f);
}

static void test_fixture_factor_and_solve(void) {
  ss_matrix* m = NULL;
  EXPECT(ss_matrix_fixture("lap2d:6x6", &m) == SS_OK);
  EXPECT(ss_matrix_order(m) == 36);

  ss_options o;
  ss_options_init(&o);
  o.nprocs = 4;
  o.record_trace = 1;
  ss_run* r = NULL;
  EXPECT(ss_factorize(m, &o, &r) == SS_OK);
  EXPECT(ss_run_completed(r) == 1);
  EXPECT(ss_run_residual(r) <= 1e-12);

  double b[36], x[36], res = 1.0;
  for (int i = 0; i < 36; ++i) b[i] = 1.0 + i;
  EXPECT(ss_run_solve(r, b, 36, x) == SS_OK);
  EXPECT(ss_run_relative_residual(r, x, b, 36, &res) == SS_OK);
  EXPECT(res <= 1e-12);
  EXPECT(ss_run_solve(r, b, 35, x) == SS_ERR_DIMENSION);

  char* s = NULL;
  EXPECT(ss_run_stats_json(r, &s) == SS_OK);
  EXPECT(s != NULL && strstr(s, "\"makespan\"") != NULL);
  ss_string_free(s);
  EXPECT(ss_run_trace_ndjson(r, &s) == SS_OK);
  EXPECT(s != NULL && strstr(s, "\"finish\"") != NULL);
  ss_string_free(s);
  EXPECT(ss_run_stats_csv(r, &s) == SS_OK);
  EXPECT(s != NULL && strncmp(s, "nprocs,", 7) == 0);
  ss_string_free(s);
  EXPECT(ss_run_deadlock_cycle(r, NULL, 0) == 0);
  ss_run_free(r);

  EXPECT(ss_analyze(m, &o, &s) == SS_OK);
  EXPECT(strstr(s, "\"nnz_L\"") != NULL);
  ss_string_free(s);
  EXPECT(ss_task_graph(m, &o, &s) == SS_OK);
  EXPECT(strstr(s, "\"messages\"") != NULL);
  ss_string_free(s);
  ss_matrix_free(m);
}

static void test_deadlock(void) {
  ss_options o;
  ss_options_init(&o);
  o.nprocs = 3;
  o.protocol = SS_PROTOCOL_PUSH;
  o.schedule = SS_SCHEDULE_STATIC;
  ss_run* r = NULL;
  EXPECT(ss_run_deadlock_fixture(&o, &r) == SS_ERR_DEADLOCK);
  EXPECT(r != NULL);
  EXPECT(ss_run_completed(r) == 0);
  int ranks[16];
  const int len = ss_run_deadlock_cycle(r, ranks, 16);
  EXPECT(len >= 2);
  int has0 = 0, has1 = 0;
  for (int k = 0; k < len && k < 16; ++k) {
    has0 |= ranks[k] == 0;
    has1 |= ranks[k] == 1;
  }
  EXPECT(has0 && has1);
  EXPECT(isnan(ss_run_residual(r)));
  ss_run_free(r);

  o.protocol = SS_PROTOCOL_PUSH_ORDERED;
  EXPECT(ss_run_deadlock_fixture(&o, &r) == SS_OK);
  EXPECT(ss_run_completed(r) == 1);
  ss_run_free(r);
}

static void test_errors(void) {
  ss_matrix* m = NULL;
  EXPECT(ss_matrix_load("/nonexistent/file.mtx", &m) == SS_ERR_IO);
  EXPECT(strlen(ss_last_error()) > 0);

  const char* path = "capi_test_unsym.mtx";
  write_file(path, "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n2 2 1\n");
  EXPECT(ss_matrix_load(path, &m) == SS_ERR_UNSYMMETRIC);
  write_file(path, "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n3 1 1\n");
  EXPECT(ss_matrix_load(path, &m) == SS_ERR_INDEX_RANGE);
  write_file(path, "%%MatrixMarket matrix coordinate real symmetric\n3 3 4\n1 1 1\n2 2 1\n3 3 1\n3 2 2\n");
  EXPECT(ss_matrix_load(path, &m) == SS_OK);
  ss_options o;
  ss_options_init(&o);
  o.ordering = SS_ORDER_NATURAL;
  ss_run* r = NULL;
  EXPECT(ss_factorize(m, &o, &r) == SS_ERR_NOT_POSITIVE_DEFINITE);
  EXPECT(ss_last_error_index() == 2);
  ss_matrix_free(m);
  remove(path);

  EXPECT(ss_matrix_fixture("bogus:3", &m) == SS_ERR_INVALID_ARGUMENT);
  EXPECT(strcmp(ss_status_name(SS_ERR_DEADLOCK), "deadlock") == 0);
  EXPECT(strcmp(ss_status_name(SS_ERR_NOT_POSITIVE_DEFINITE), "not-positive-definite") == 0);
  EXPECT(ss_matrix_fixture("arrow:5", NULL) == SS_ERR_INVALID_ARGUMENT);
}

int main(void) {
  test_fixture_factor_and_solve();
  test_deadlock();
  test_errors();
  if (failures) {
    fprintf(stderr, "%d failure(s)\n", failures);
    return 1;
  }
  puts("c api: ok");
  return 0;
}
