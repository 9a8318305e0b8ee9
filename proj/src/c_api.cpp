#include "symsolve/symsolve.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <string>

#include "symsolve/driver.hpp"
#include "symsolve/error.hpp"
#include "symsolve/fixtures.hpp"
#include "symsolve/ordering.hpp"
#include "symsolve/report.hpp"

using namespace symsolve;

struct ss_matrix {
  SparseSymMatrix a;
};

struct ss_run {
  RunConfig cfg;
  std::optional<SparseSymMatrix> a;
  std::optional<FactorRun> run;
  RunStats fixture_stats;
  std::optional<double> residual;

  const RunStats& stats() const { return run ? run->stats : fixture_stats; }
};

namespace {

thread_local std::string g_last_error;
thread_local std::int64_t g_last_index = -1;

ss_status to_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::kParse: return SS_ERR_PARSE;
    case ErrorCode::kUnsymmetricInput: return SS_ERR_UNSYMMETRIC;
    case ErrorCode::kIndexOutOfRange: return SS_ERR_INDEX_RANGE;
    case ErrorCode::kNotPositiveDefinite: return SS_ERR_NOT_POSITIVE_DEFINITE;
    case ErrorCode::kDeadlock: return SS_ERR_DEADLOCK;
    case ErrorCode::kDimensionMismatch: return SS_ERR_DIMENSION;
    case ErrorCode::kStructuralMismatch: return SS_ERR_STRUCTURE;
    case ErrorCode::kProtocol: return SS_ERR_PROTOCOL;
    case ErrorCode::kIo: return SS_ERR_IO;
    case ErrorCode::kInvalidArgument: return SS_ERR_INVALID_ARGUMENT;
  }
  return SS_ERR_INTERNAL;
}

template <class F>
ss_status guarded(F&& f) {
  g_last_error.clear();
  g_last_index = -1;
  try {
    return f();
  } catch (const Error& e) {
    g_last_error = e.what();
    g_last_index = e.index();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  }
  return SS_ERR_INTERNAL;
}

ss_status fail(ss_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

char* dup_string(const std::string& s) {
  char* p = new char[s.size() + 1];
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

SolverOptions solver_options(const ss_options* o, Index n) {
  ss_options defaults;
  if (o == nullptr) {
    ss_options_init(&defaults);
    o = &defaults;
  }
  SolverOptions s;
  switch (o->ordering) {
    case SS_ORDER_MINDEG: s.ordering = OrderingKind::kMinDegree; break;
    case SS_ORDER_NATURAL: s.ordering = OrderingKind::kNatural; break;
    case SS_ORDER_FILE:
      if (o->perm_path == nullptr) throw Error(ErrorCode::kInvalidArgument, "no permutation file");
      s.ordering = OrderingKind::kGiven;
      s.given_perm = read_permutation(o->perm_path, n);
      break;
    default: throw Error(ErrorCode::kInvalidArgument, "unknown ordering");
  }
  if (o->max_supernode_width < 1) throw Error(ErrorCode::kInvalidArgument, "supernode width must be >= 1");
  s.max_supernode_width = o->max_supernode_width;
  RunConfig& c = s.run;
  c.nprocs = o->nprocs;
  switch (o->map) {
    case SS_MAP_FANIN: c.map = MapKind::kFanIn; break;
    case SS_MAP_FANOUT: c.map = MapKind::kFanOut; break;
    case SS_MAP_FANBOTH: c.map = MapKind::kFanBoth; break;
    default: throw Error(ErrorCode::kInvalidArgument, "unknown map");
  }
  switch (o->protocol) {
    case SS_PROTOCOL_PUSH: c.protocol = Protocol::kPush; break;
    case SS_PROTOCOL_PUSH_ORDERED: c.protocol = Protocol::kPushOrdered; break;
    case SS_PROTOCOL_PULL: c.protocol = Protocol::kPull; break;
    default: throw Error(ErrorCode::kInvalidArgument, "unknown protocol");
  }
  switch (o->schedule) {
    case SS_SCHEDULE_STATIC: c.schedule = Schedule::kStatic; break;
    case SS_SCHEDULE_DYNAMIC: c.schedule = Schedule::kDynamic; break;
    default: throw Error(ErrorCode::kInvalidArgument, "unknown schedule");
  }
  c.send_slots = o->send_slots;
  c.recv_slots = o->recv_slots;
  c.seed = o->seed;
  c.perturbation = o->perturbation;
  c.cost = {o->alpha, o->beta, o->gamma};
  c.record_trace = o->record_trace != 0;
  c.validate();
  return s;
}

Index parse_count(const std::string& s, const std::string& desc) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || v < 1) throw Error(ErrorCode::kInvalidArgument, "bad fixture '" + desc + "'");
  return static_cast<Index>(v);
}

SparseSymMatrix fixture_matrix(const std::string& desc) {
  const auto colon = desc.find(':');
  const std::string name = desc.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : desc.substr(colon + 1);
  if (name == "arrow") {
    const Index n = arg.empty() ? 5 : parse_count(arg, desc);
    // The center diagonal must outweigh n - 1 unit couplings.
    return arrow_matrix(n, std::max(4.0, static_cast<double>(n)));
  }
  if (name == "lap2d") {
    if (arg.empty()) return laplacian_2d(4, 4);
    const auto x = arg.find('x');
    if (x == std::string::npos) {
      const Index k = parse_count(arg, desc);
      return laplacian_2d(k, k);
    }
    return laplacian_2d(parse_count(arg.substr(0, x), desc), parse_count(arg.substr(x + 1), desc));
  }
  if (name == "random") {
    const auto c2 = arg.find(':');
    const Index n = parse_count(arg.substr(0, c2), desc);
    const Index seed = c2 == std::string::npos ? 1 : parse_count(arg.substr(c2 + 1), desc);
    return random_spd(n, 0.05, static_cast<std::uint64_t>(seed));
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown fixture '" + desc + "'");
}

}  // namespace

extern "C" {

void ss_options_init(ss_options* o) {
  if (o == nullptr) return;
  const RunConfig c;
  o->nprocs = c.nprocs;
  o->map = SS_MAP_FANBOTH;
  o->protocol = SS_PROTOCOL_PULL;
  o->schedule = SS_SCHEDULE_DYNAMIC;
  o->send_slots = c.send_slots;
  o->recv_slots = c.recv_slots;
  o->seed = c.seed;
  o->perturbation = c.perturbation;
  o->alpha = c.cost.alpha;
  o->beta = c.cost.beta;
  o->gamma = c.cost.gamma;
  o->ordering = SS_ORDER_MINDEG;
  o->perm_path = nullptr;
  o->max_supernode_width = kDefaultMaxSupernodeWidth;
  o->record_trace = 0;
}

const char* ss_last_error(void) { return g_last_error.c_str(); }
int64_t ss_last_error_index(void) { return g_last_index; }

const char* ss_status_name(ss_status s) {
  switch (s) {
    case SS_OK: return "ok";
    case SS_ERR_PARSE: return error_code_name(ErrorCode::kParse);
    case SS_ERR_UNSYMMETRIC: return error_code_name(ErrorCode::kUnsymmetricInput);
    case SS_ERR_INDEX_RANGE: return error_code_name(ErrorCode::kIndexOutOfRange);
    case SS_ERR_NOT_POSITIVE_DEFINITE: return error_code_name(ErrorCode::kNotPositiveDefinite);
    case SS_ERR_DEADLOCK: return error_code_name(ErrorCode::kDeadlock);
    case SS_ERR_DIMENSION: return error_code_name(ErrorCode::kDimensionMismatch);
    case SS_ERR_STRUCTURE: return error_code_name(ErrorCode::kStructuralMismatch);
    case SS_ERR_PROTOCOL: return error_code_name(ErrorCode::kProtocol);
    case SS_ERR_IO: return error_code_name(ErrorCode::kIo);
    case SS_ERR_INVALID_ARGUMENT: return error_code_name(ErrorCode::kInvalidArgument);
    case SS_ERR_INTERNAL: return "internal-error";
  }
  return "unknown";
}

void ss_string_free(char* s) { delete[] s; }

ss_status ss_matrix_load(const char* path, ss_matrix** out) {
  if (path == nullptr || out == nullptr) return fail(SS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new ss_matrix{read_matrix_market(path)};
    return SS_OK;
  });
}

ss_status ss_matrix_fixture(const char* desc, ss_matrix** out) {
  if (desc == nullptr || out == nullptr) return fail(SS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new ss_matrix{fixture_matrix(desc)};
    return SS_OK;
  });
}

int64_t ss_matrix_order(const ss_matrix* m) { return m == nullptr ? -1 : m->a.n; }
void ss_matrix_free(ss_matrix* m) { delete m; }

ss_status ss_analyze(const ss_matrix* m, const ss_options* opts, char** json_out) {
  if (m == nullptr || json_out == nullptr) return fail(SS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const SolverOptions s = solver_options(opts, m->a.n);
    *json_out = dup_string(analysis_json(m->a, analyze(m->a, s), s.run.nprocs));
    return SS_OK;
  });
}

ss_status ss_task_graph(const ss_matrix* m, const ss_options* opts, char** json_out) {
  if (m == nullptr || json_out == nullptr) return fail(SS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const SolverOptions s = solver_options(opts, m->a.n);
    const Analysis an = analyze(m->a, s);
    const TaskGraph g = build_task_graph(an.sf, ComputationMap(s.run.map, s.run.nprocs));
    *json_out = dup_string(graph_json(g));
    return SS_OK;
  });
}

ss_status ss_factorize(const ss_matrix* m, const ss_options* opts, ss_run** out) {
  if (m == nullptr || out == nullptr) return fail(SS_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const SolverOptions s = solver_options(opts, m->a.n);
    auto r = std::make_unique<ss_run>();
    r->cfg = s.run;
    r->a = m->a;
    r->run = factorize(m->a, s);
    if (r->run->factor) r->residual = factor_residual(m->a, *r->run->factor);
    const bool ok = r->run->stats.completed();
    *out = r.release();
    return ok ? SS_OK : fail(SS_ERR_DEADLOCK, "deadlock");
  });
}

ss_status ss_run_deadlock_fixture(const ss_options* opts, ss_run** out) {
  if (out == nullptr) return fail(SS_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const SolverOptions s = solver_options(opts, 1);
    auto r = std::make_unique<ss_run>();
    r->cfg = s.run;
    NullBody body;
    r->fixture_stats = simulate(deadlock_fixture(s.run.nprocs), s.run, body);
    const bool ok = r->fixture_stats.completed();
    *out = r.release();
    return ok ? SS_OK : fail(SS_ERR_DEADLOCK, "deadlock");
  });
}

int ss_run_completed(const ss_run* r) { return r != nullptr && r->stats().completed() ? 1 : 0; }

int ss_run_deadlock_cycle(const ss_run* r, int* ranks, int cap) {
  if (r == nullptr || !r->stats().deadlock) return 0;
  const auto& cycle = r->stats().deadlock->cycle;
  for (int k = 0; k < cap && k < static_cast<int>(cycle.size()); ++k) ranks[k] = cycle[static_cast<std::size_t>(k)];
  return static_cast<int>(cycle.size());
}

double ss_run_residual(const ss_run* r) {
  return r != nullptr && r->residual ? *r->residual : std::numeric_limits<double>::quiet_NaN();
}

ss_status ss_run_stats_json(const ss_run* r, char** out) {
  if (r == nullptr || out == nullptr) return fail(SS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const SymbolicFactor* sf = r->run ? &r->run->analysis.sf : nullptr;
    *out = dup_string(stats_json(r->stats(), r->cfg, sf, r->residual));
    return SS_OK;
  });
}

ss_status ss_run_trace_ndjson(const ss_run* r, char** out) {
  if (r == nullptr || out == nullptr) return fail(SS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = dup_string(trace_ndjson(r->stats()));
    return SS_OK;
  });
}

ss_status ss_run_stats_csv(const ss_run* r, char** out) {
  if (r == nullptr || out == nullptr) return fail(SS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = dup_string(stats_csv(r->stats(), r->cfg, r->residual));
    return SS_OK;
  });
}

ss_status ss_run_solve(const ss_run* r, const double* b, int64_t n, double* x) {
  if (r == nullptr || (n > 0 && (b == nullptr || x == nullptr)))
    return fail(SS_ERR_INVALID_ARGUMENT, "null argument");
  if (!r->run || !r->run->factor) return fail(SS_ERR_INVALID_ARGUMENT, "run holds no factor");
  return guarded([&] {
    const auto sol = solve(*r->run->factor, std::span<const double>(b, static_cast<std::size_t>(n)));
    std::copy(sol.begin(), sol.end(), x);
    return SS_OK;
  });
}

ss_status ss_run_relative_residual(const ss_run* r, const double* x, const double* b, int64_t n,
                                   double* out) {
  if (r == nullptr || out == nullptr || (n > 0 && (b == nullptr || x == nullptr)))
    return fail(SS_ERR_INVALID_ARGUMENT, "null argument");
  if (!r->a) return fail(SS_ERR_INVALID_ARGUMENT, "run holds no matrix");
  return guarded([&] {
    const auto len = static_cast<std::size_t>(n);
    *out = relative_residual(*r->a, std::span<const double>(x, len), std::span<const double>(b, len));
    return SS_OK;
  });
}

ss_status ss_run_write_factor(const ss_run* r, const char* path) {
  if (r == nullptr || path == nullptr) return fail(SS_ERR_INVALID_ARGUMENT, "null argument");
  if (!r->run || !r->run->factor) return fail(SS_ERR_INVALID_ARGUMENT, "run holds no factor");
  return guarded([&] {
    write_factor(*r->run->factor, path);
    return SS_OK;
  });
}

void ss_run_free(ss_run* r) { delete r; }

}  // extern "C"
