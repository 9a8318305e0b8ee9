#pragma once

#include <span>
#include <vector>

#include "symsolve/matrix.hpp"
#include "symsolve/symbolic.hpp"

namespace symsolve {

// Columns [first_col, first_col + width) of one supernode. The first `width`
// rows are the diagonal block; data is m x width, column-major.
struct Panel {
  Index snode = 0;
  Index first_col = 0;
  Index width = 0;
  std::vector<Index> rows;
  std::vector<double> data;

  Index m() const { return static_cast<Index>(rows.size()); }
  double& operator()(Index r, Index c) { return data[static_cast<std::size_t>(c * m() + r)]; }
  double operator()(Index r, Index c) const { return data[static_cast<std::size_t>(c * m() + r)]; }
};

// Update contribution to a target supernode. `src` is the producing
// supernode for a single update, or the producing rank for a per-rank
// accumulation. data is |rows| x tgt_width, column c <-> tgt_first_col + c.
struct AggregateVector {
  Index src = 0;
  Index tgt = 0;
  Index tgt_first_col = 0;
  Index tgt_width = 0;
  std::vector<Index> rows;
  std::vector<double> data;

  Index m() const { return static_cast<Index>(rows.size()); }
  double& operator()(Index r, Index c) { return data[static_cast<std::size_t>(c * m() + r)]; }
  double operator()(Index r, Index c) const { return data[static_cast<std::size_t>(c * m() + r)]; }
  std::size_t bytes() const { return data.size() * sizeof(double) + rows.size() * 4; }
};

// Scatters the columns of supernode s of `a` into a fresh panel.
Panel assemble_panel(const SparseSymMatrix& a, const SymbolicFactor& sf, Index s);

// Dense Cholesky of the diagonal block, then solves the rows below it.
// Columns are processed left to right. Throws kNotPositiveDefinite with the
// global column index.
Panel factor_panel(Panel p);

// -L(rows >= tgt_first_col, :) * L(rows in target block, :)^T.
AggregateVector compute_update(const Panel& src, Index tgt_snode, Index tgt_first_col,
                               Index tgt_width, std::span<const Index> tgt_rows);

AggregateVector zero_aggregate(Index src, Index tgt, Index tgt_first_col, Index tgt_width,
                               std::vector<Index> rows);

// acc += t, matching rows by global index; t.rows must be a subset of acc.rows.
void accumulate(AggregateVector& acc, const AggregateVector& t);

// Adds every aggregate into the panel, in ascending `src` order.
Panel apply_aggregates(Panel p, std::span<const AggregateVector> aggs);

double factor_flops(Index m, Index width);
// Rows of the source at or below the target block (`below`) and the number of
// them inside the block (`in_block`).
double update_flops(Index src_width, Index below, Index in_block);

}  // namespace symsolve
