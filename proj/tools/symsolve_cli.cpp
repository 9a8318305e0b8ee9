#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "symsolve/symsolve.h"

namespace {

enum Exit {
  kExitOk = 0,
  kExitUsage = 1,
  kExitParse = 2,
  kExitNotPositiveDefinite = 3,
  kExitDeadlock = 4,
  kExitDimension = 5,
  kExitIo = 6,
};

int exit_code(ss_status s) {
  switch (s) {
    case SS_OK: return kExitOk;
    case SS_ERR_PARSE:
    case SS_ERR_UNSYMMETRIC:
    case SS_ERR_INDEX_RANGE: return kExitParse;
    case SS_ERR_NOT_POSITIVE_DEFINITE: return kExitNotPositiveDefinite;
    case SS_ERR_DEADLOCK: return kExitDeadlock;
    case SS_ERR_DIMENSION: return kExitDimension;
    case SS_ERR_IO: return kExitIo;
    default: return kExitUsage;
  }
}

int report(ss_status s) {
  std::cerr << "error: " << ss_status_name(s) << ": " << ss_last_error() << '\n';
  return exit_code(s);
}

struct Owned {
  char* p = nullptr;
  ~Owned() { ss_string_free(p); }
};

struct MatrixDeleter {
  void operator()(ss_matrix* m) const { ss_matrix_free(m); }
};
struct RunDeleter {
  void operator()(ss_run* r) const { ss_run_free(r); }
};

struct Common {
  std::string matrix;
  std::string fixture;
  std::string ordering = "mindeg";
  std::string perm;
  std::string map = "fanboth";
  std::string protocol = "pull";
  std::string schedule = "static";
  ss_options opts{};
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("matrix", c.matrix, "MatrixMarket file (coordinate, symmetric)");
  cmd->add_option("--fixture", c.fixture, "Built-in input: arrow[:N], lap2d:KxK, random:N:SEED, deadlock");
  cmd->add_option("--np", c.opts.nprocs, "Virtual processors")->check(CLI::PositiveNumber);
  cmd->add_option("--map", c.map, "Computation map")->check(CLI::IsMember({"fanin", "fanout", "fanboth"}));
  cmd->add_option("--protocol", c.protocol, "Communication protocol")
      ->check(CLI::IsMember({"push", "push-ordered", "pull"}));
  cmd->add_option("--schedule", c.schedule, "Task scheduling")->check(CLI::IsMember({"static", "dynamic"}));
  cmd->add_option("--send-slots", c.opts.send_slots, "Send buffers per rank")->check(CLI::PositiveNumber);
  cmd->add_option("--recv-slots", c.opts.recv_slots, "Receive buffers per rank")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", c.opts.seed, "Seed for duration perturbation");
  cmd->add_option("--perturbation", c.opts.perturbation, "Task durations scaled by U[1, 1+v]")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--alpha", c.opts.alpha, "Cost per message")->check(CLI::NonNegativeNumber);
  cmd->add_option("--beta", c.opts.beta, "Cost per byte")->check(CLI::NonNegativeNumber);
  cmd->add_option("--gamma", c.opts.gamma, "Cost per flop")->check(CLI::NonNegativeNumber);
  cmd->add_option("--ordering", c.ordering, "Fill-reducing ordering")->check(CLI::IsMember({"mindeg", "natural"}));
  cmd->add_option("--perm", c.perm, "Ordering file, one 0-based index per line (new -> old)");
  cmd->add_option("--max-width", c.opts.max_supernode_width, "Largest supernode width")
      ->check(CLI::PositiveNumber);
}

void finalize(Common& c) {
  static const std::map<std::string, ss_map> maps = {
      {"fanin", SS_MAP_FANIN}, {"fanout", SS_MAP_FANOUT}, {"fanboth", SS_MAP_FANBOTH}};
  static const std::map<std::string, ss_protocol> protocols = {
      {"push", SS_PROTOCOL_PUSH}, {"push-ordered", SS_PROTOCOL_PUSH_ORDERED}, {"pull", SS_PROTOCOL_PULL}};
  c.opts.map = maps.at(c.map);
  c.opts.protocol = protocols.at(c.protocol);
  c.opts.schedule = c.schedule == "static" ? SS_SCHEDULE_STATIC : SS_SCHEDULE_DYNAMIC;
  c.opts.ordering = c.ordering == "natural" ? SS_ORDER_NATURAL : SS_ORDER_MINDEG;
  if (!c.perm.empty()) {
    c.opts.ordering = SS_ORDER_FILE;
    c.opts.perm_path = c.perm.c_str();
  }
}

ss_status load(const Common& c, std::unique_ptr<ss_matrix, MatrixDeleter>& out) {
  ss_matrix* m = nullptr;
  ss_status s = SS_OK;
  if (!c.fixture.empty() && !c.matrix.empty()) {
    std::cerr << "error: give either a matrix file or --fixture\n";
    return SS_ERR_INVALID_ARGUMENT;
  }
  if (!c.fixture.empty()) {
    s = ss_matrix_fixture(c.fixture.c_str(), &m);
  } else if (!c.matrix.empty()) {
    s = ss_matrix_load(c.matrix.c_str(), &m);
  } else {
    std::cerr << "error: no matrix given\n";
    return SS_ERR_INVALID_ARGUMENT;
  }
  out.reset(m);
  return s;
}

bool write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return true;
  }
  std::ofstream f(path);
  f << text;
  if (!f) std::cerr << "error: cannot write " << path << '\n';
  return static_cast<bool>(f);
}

int cmd_analyze(Common& c, const std::string& graph_out) {
  finalize(c);
  std::unique_ptr<ss_matrix, MatrixDeleter> m;
  if (ss_status s = load(c, m); s != SS_OK) return report(s);
  Owned json;
  if (ss_status s = ss_analyze(m.get(), &c.opts, &json.p); s != SS_OK) return report(s);
  std::cout << json.p << '\n';
  if (!graph_out.empty()) {
    Owned graph;
    if (ss_status s = ss_task_graph(m.get(), &c.opts, &graph.p); s != SS_OK) return report(s);
    if (!write_text(graph_out, std::string(graph.p) + "\n")) return kExitIo;
  }
  return kExitOk;
}

struct FactorOutputs {
  std::string stats_out;
  std::string factor_out;
  std::string trace_out;
  std::string csv_out;
};

int emit_run(ss_run* run, const FactorOutputs& out) {
  Owned stats;
  if (ss_status s = ss_run_stats_json(run, &stats.p); s != SS_OK) return report(s);
  if (out.stats_out.empty()) {
    std::cout << stats.p << '\n';
  } else if (!write_text(out.stats_out, std::string(stats.p) + "\n")) {
    return kExitIo;
  }
  if (!out.trace_out.empty()) {
    Owned trace;
    if (ss_status s = ss_run_trace_ndjson(run, &trace.p); s != SS_OK) return report(s);
    if (!write_text(out.trace_out, trace.p)) return kExitIo;
  }
  if (!out.csv_out.empty()) {
    Owned csv;
    if (ss_status s = ss_run_stats_csv(run, &csv.p); s != SS_OK) return report(s);
    if (!write_text(out.csv_out, csv.p)) return kExitIo;
  }
  return kExitOk;
}

int cmd_factor(Common& c, FactorOutputs out) {
  finalize(c);
  c.opts.record_trace = out.trace_out.empty() ? 0 : 1;
  ss_run* raw = nullptr;
  ss_status status = SS_OK;
  if (c.fixture == "deadlock") {
    if (!c.matrix.empty()) {
      std::cerr << "error: give either a matrix file or --fixture\n";
      return kExitUsage;
    }
    status = ss_run_deadlock_fixture(&c.opts, &raw);
  } else {
    std::unique_ptr<ss_matrix, MatrixDeleter> m;
    if (ss_status s = load(c, m); s != SS_OK) return report(s);
    status = ss_factorize(m.get(), &c.opts, &raw);
  }
  std::unique_ptr<ss_run, RunDeleter> run(raw);
  if (!run) return report(status);
  if (int rc = emit_run(run.get(), out); rc != kExitOk) return rc;
  if (status == SS_ERR_DEADLOCK) {
    std::vector<int> cycle(static_cast<std::size_t>(c.opts.nprocs));
    const int len = ss_run_deadlock_cycle(run.get(), cycle.data(), c.opts.nprocs);
    std::cerr << "deadlock: wait-for cycle";
    for (int k = 0; k < len; ++k) std::cerr << ' ' << cycle[static_cast<std::size_t>(k)];
    std::cerr << '\n';
    return kExitDeadlock;
  }
  if (status != SS_OK) return report(status);
  const double res = ss_run_residual(run.get());
  if (!std::isnan(res)) std::cerr << "residual " << res << '\n';
  if (!out.factor_out.empty())
    if (ss_status s = ss_run_write_factor(run.get(), out.factor_out.c_str()); s != SS_OK) return report(s);
  return kExitOk;
}

int read_vector(const std::string& path, std::vector<double>& v) {
  std::ifstream f(path);
  if (!f) {
    std::cerr << "error: cannot read " << path << '\n';
    return kExitIo;
  }
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    std::istringstream is(line);
    double x = 0.0;
    if (!(is >> x)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      std::cerr << "error: parse-error: " << path << ":" << lineno << ": not a number\n";
      return kExitParse;
    }
    v.push_back(x);
  }
  return kExitOk;
}

int cmd_solve(Common& c, const std::string& rhs_path, const std::string& out_path) {
  finalize(c);
  std::unique_ptr<ss_matrix, MatrixDeleter> m;
  if (ss_status s = load(c, m); s != SS_OK) return report(s);
  std::vector<double> b;
  if (int rc = read_vector(rhs_path, b); rc != kExitOk) return rc;
  if (static_cast<std::int64_t>(b.size()) != ss_matrix_order(m.get())) {
    std::cerr << "error: dimension-mismatch: right-hand side has " << b.size()
              << " entries, matrix has order " << ss_matrix_order(m.get()) << '\n';
    return kExitDimension;
  }
  ss_run* raw = nullptr;
  const ss_status fs = ss_factorize(m.get(), &c.opts, &raw);
  std::unique_ptr<ss_run, RunDeleter> run(raw);
  if (fs == SS_ERR_DEADLOCK) {
    std::cerr << "error: deadlock during factorization\n";
    return kExitDeadlock;
  }
  if (fs != SS_OK) return report(fs);
  std::vector<double> x(b.size());
  if (ss_status s = ss_run_solve(run.get(), b.data(), static_cast<std::int64_t>(b.size()), x.data()); s != SS_OK)
    return report(s);
  double rel = 0.0;
  if (ss_status s = ss_run_relative_residual(run.get(), x.data(), b.data(),
                                             static_cast<std::int64_t>(b.size()), &rel);
      s != SS_OK)
    return report(s);
  std::ostringstream text;
  text.precision(17);
  for (double v : x) text << v << '\n';
  if (!write_text(out_path.empty() ? "-" : out_path, text.str())) return kExitIo;
  std::cerr << "relative_residual " << rel << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Supernodal sparse Cholesky on simulated distributed memory"};
  app.require_subcommand(1);

  Common analyze_opts, factor_opts, solve_opts;
  for (Common* c : {&analyze_opts, &factor_opts, &solve_opts}) ss_options_init(&c->opts);

  std::string graph_out;
  auto* analyze = app.add_subcommand("analyze", "Ordering, symbolic factorization and communication bounds");
  add_common(analyze, analyze_opts);
  analyze->add_option("--graph", graph_out, "Write the task graph as JSON ('-' for stdout)");

  FactorOutputs fo;
  auto* factor = app.add_subcommand("factor", "Simulated distributed factorization");
  add_common(factor, factor_opts);
  factor->add_option("--stats-out", fo.stats_out, "Stats JSON file (default stdout)");
  factor->add_option("--factor-out", fo.factor_out, "Write L (MatrixMarket) and its permutation");
  factor->add_option("--trace-out", fo.trace_out, "Event trace, newline-delimited JSON");
  factor->add_option("--csv", fo.csv_out, "Headline numbers as CSV");

  std::string rhs, sol_out;
  auto* solve = app.add_subcommand("solve", "Factor and solve A x = b");
  add_common(solve, solve_opts);
  solve->add_option("--rhs", rhs, "Right-hand side, one value per line")->required();
  solve->add_option("-o,--out", sol_out, "Solution file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (*analyze) return cmd_analyze(analyze_opts, graph_out);
  if (*factor) return cmd_factor(factor_opts, fo);
  return cmd_solve(solve_opts, rhs, sol_out);
}
