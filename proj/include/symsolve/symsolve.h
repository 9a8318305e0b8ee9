/* C interface to the symsolve library. All functions return SS_OK or an error
 * status; ss_last_error() describes the most recent failure on the calling
 * thread. Strings returned through char** are released with ss_string_free. */
#ifndef SYMSOLVE_SYMSOLVE_H
#define SYMSOLVE_SYMSOLVE_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  SS_OK = 0,
  SS_ERR_PARSE = 1,
  SS_ERR_UNSYMMETRIC = 2,
  SS_ERR_INDEX_RANGE = 3,
  SS_ERR_NOT_POSITIVE_DEFINITE = 4,
  SS_ERR_DEADLOCK = 5,
  SS_ERR_DIMENSION = 6,
  SS_ERR_STRUCTURE = 7,
  SS_ERR_PROTOCOL = 8,
  SS_ERR_IO = 9,
  SS_ERR_INVALID_ARGUMENT = 10,
  SS_ERR_INTERNAL = 11
} ss_status;

typedef enum { SS_MAP_FANIN = 0, SS_MAP_FANOUT = 1, SS_MAP_FANBOTH = 2 } ss_map;
typedef enum { SS_PROTOCOL_PUSH = 0, SS_PROTOCOL_PUSH_ORDERED = 1, SS_PROTOCOL_PULL = 2 } ss_protocol;
typedef enum { SS_SCHEDULE_STATIC = 0, SS_SCHEDULE_DYNAMIC = 1 } ss_schedule;
typedef enum { SS_ORDER_MINDEG = 0, SS_ORDER_NATURAL = 1, SS_ORDER_FILE = 2 } ss_ordering;

typedef struct {
  int nprocs;
  ss_map map;
  ss_protocol protocol;
  ss_schedule schedule;
  int send_slots;
  int recv_slots;
  uint64_t seed;
  double perturbation;
  double alpha;
  double beta;
  double gamma;
  ss_ordering ordering;
  /* Read when ordering == SS_ORDER_FILE. */
  const char* perm_path;
  int64_t max_supernode_width;
  int record_trace;
} ss_options;

typedef struct ss_matrix ss_matrix;
typedef struct ss_run ss_run;

void ss_options_init(ss_options* opts);
const char* ss_last_error(void);
/* Failing column of the last SS_ERR_NOT_POSITIVE_DEFINITE, else -1. */
int64_t ss_last_error_index(void);
const char* ss_status_name(ss_status s);
void ss_string_free(char* s);

ss_status ss_matrix_load(const char* path, ss_matrix** out);
/* "arrow:N", "lap2d:KxK" (or "lap2d:K"), "random:N:SEED". */
ss_status ss_matrix_fixture(const char* desc, ss_matrix** out);
int64_t ss_matrix_order(const ss_matrix* m);
void ss_matrix_free(ss_matrix* m);

ss_status ss_analyze(const ss_matrix* m, const ss_options* opts, char** json_out);
ss_status ss_task_graph(const ss_matrix* m, const ss_options* opts, char** json_out);

/* On a deadlock *out is still set (stats only) and SS_ERR_DEADLOCK returned. */
ss_status ss_factorize(const ss_matrix* m, const ss_options* opts, ss_run** out);
/* Runs the bounded-buffer tree fixture on opts->nprocs ranks. */
ss_status ss_run_deadlock_fixture(const ss_options* opts, ss_run** out);

int ss_run_completed(const ss_run* r);
/* Copies up to cap ranks of the wait-for cycle; returns its length (0 if none). */
int ss_run_deadlock_cycle(const ss_run* r, int* ranks, int cap);
/* Relative Frobenius residual of the factor, or NaN without one. */
double ss_run_residual(const ss_run* r);
ss_status ss_run_stats_json(const ss_run* r, char** out);
ss_status ss_run_trace_ndjson(const ss_run* r, char** out);
ss_status ss_run_stats_csv(const ss_run* r, char** out);
ss_status ss_run_solve(const ss_run* r, const double* b, int64_t n, double* x);
/* ||A x - b||_2 / ||b||_2 against the factored matrix. */
ss_status ss_run_relative_residual(const ss_run* r, const double* x, const double* b, int64_t n,
                                   double* out);
ss_status ss_run_write_factor(const ss_run* r, const char* path);
void ss_run_free(ss_run* r);

#ifdef __cplusplus
}
#endif

#endif
