#pragma once

#include <cstdint>
#include <vector>

#include "symsolve/taskgraph.hpp"

namespace symsolve {

// A tree of column tasks: node k is T_{label[k], label[parent[k]]} (or
// T_{label[k], label[k]} at a root) and feeds the task of its parent column.
struct ColumnTree {
  std::vector<Index> label;
  std::vector<int> parent;  // -1 at roots
  std::vector<Rank> owner;
};

inline constexpr double kFixtureTaskFlops = 1000.0;
inline constexpr std::size_t kFixtureMessageBytes = 512;

// Edges between ranks become single-producer kData messages.
TaskGraph column_tree_graph(const ColumnTree& tree, int nprocs);

// The bounded-buffer tree on 1-based column labels with column c owned by
// rank (c - 1) mod P. Requires P >= 2.
ColumnTree deadlock_tree(int nprocs);
TaskGraph deadlock_fixture(int nprocs);

// Random single-rooted tree on columns 0..n-1, relabeled in postorder,
// column c owned by rank c mod P.
ColumnTree random_postordered_tree(Index n, int nprocs, std::uint64_t seed);

}  // namespace symsolve
