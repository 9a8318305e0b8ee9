#pragma once

#include <vector>

#include "symsolve/matrix.hpp"

namespace symsolve {

inline constexpr Index kNone = -1;
inline constexpr Index kDefaultMaxSupernodeWidth = 150;

struct EliminationTree {
  // parent[v] > v, or kNone for roots.
  std::vector<Index> parent;

  Index size() const { return static_cast<Index>(parent.size()); }
};

struct SymbolicFactor {
  EliminationTree etree;
  Permutation postorder;
  // Sorted row structure of every column of L, diagonal first.
  std::vector<std::vector<Index>> lstruct;
  std::vector<Index> colcount;
  // Supernode s covers columns [snode_start[s], snode_start[s+1]).
  std::vector<Index> snode_start;
  std::vector<Index> col_to_snode;
  std::vector<Index> sn_parent;
  // Rows of supernode s: its diagonal block followed by the shared
  // below-block structure.
  std::vector<std::vector<Index>> sn_rows;
  // Stored lower-triangle entries of the analyzed matrix.
  Index nnz_a = 0;

  Index n() const { return static_cast<Index>(colcount.size()); }
  Index num_supernodes() const { return static_cast<Index>(sn_rows.size()); }
  Index first_col(Index s) const { return snode_start[s]; }
  Index width(Index s) const { return snode_start[s + 1] - snode_start[s]; }
};

struct FillStats {
  Index nnz_l = 0;
  Index fill = 0;
  Index flops = 0;
};

// Liu's ancestor algorithm with path compression; never forms L.
EliminationTree etree(const SparseSymMatrix& a);

// Children are visited in increasing index order.
Permutation postorder_tree(const EliminationTree& t);

// Assumes `a` is already in postorder of its elimination tree (the driver
// guarantees this), so supernodes are contiguous column runs.
SymbolicFactor symbolic_factorize(const SparseSymMatrix& a,
                                  Index max_sn_width = kDefaultMaxSupernodeWidth);

FillStats fill_stats(const SymbolicFactor& sf);

// Width histogram: bucket b counts supernodes of width in [2^b, 2^(b+1)).
std::vector<Index> supernode_histogram(const SymbolicFactor& sf);

}  // namespace symsolve
