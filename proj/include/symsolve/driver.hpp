#pragma once

#include <optional>

#include "symsolve/runtime.hpp"
#include "symsolve/solve.hpp"
#include "symsolve/taskgraph.hpp"

namespace symsolve {

enum class OrderingKind { kMinDegree, kNatural, kGiven };

struct SolverOptions {
  OrderingKind ordering = OrderingKind::kMinDegree;
  // Used with kGiven; new -> old.
  std::optional<Permutation> given_perm;
  Index max_supernode_width = kDefaultMaxSupernodeWidth;
  RunConfig run;
};

struct Analysis {
  // Fill-reducing ordering composed with the elimination-tree postorder.
  Permutation perm;
  SparseSymMatrix permuted;
  SymbolicFactor sf;
};

Analysis analyze(const SparseSymMatrix& a, const SolverOptions& opts);

struct FactorRun {
  Analysis analysis;
  TaskGraph graph;
  RunStats stats;
  // Empty when the run deadlocked.
  std::optional<FactorResult> factor;
};

// Full pipeline: order, postorder, symbolic, map, task graph, simulated
// distributed factorization, gather. Throws kNotPositiveDefinite.
FactorRun factorize(const SparseSymMatrix& a, const SolverOptions& opts);

// Numeric execution of an existing graph; the returned result is empty
// after a deadlock.
std::optional<FactorResult> run_factorization(const SparseSymMatrix& permuted,
                                              const SymbolicFactor& sf, const Permutation& perm,
                                              const TaskGraph& g, const RunConfig& cfg,
                                              RunStats& stats);

}  // namespace symsolve
