#include "symsolve/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "symsolve/error.hpp"

namespace symsolve {

namespace {

// pos[k] = index of sub[k] in super; both sorted. Throws on a missing row.
std::vector<Index> relative_indices(std::span<const Index> sub, std::span<const Index> super) {
  std::vector<Index> pos(sub.size());
  std::size_t q = 0;
  for (std::size_t k = 0; k < sub.size(); ++k) {
    while (q < super.size() && super[q] < sub[k]) ++q;
    if (q == super.size() || super[q] != sub[k])
      throw Error(ErrorCode::kStructuralMismatch,
                  "row " + std::to_string(sub[k]) + " absent from target structure");
    pos[k] = static_cast<Index>(q);
  }
  return pos;
}

}  // namespace

Panel assemble_panel(const SparseSymMatrix& a, const SymbolicFactor& sf, Index s) {
  Panel p;
  p.snode = s;
  p.first_col = sf.first_col(s);
  p.width = sf.width(s);
  p.rows = sf.sn_rows[s];
  p.data.assign(static_cast<std::size_t>(p.m() * p.width), 0.0);
  for (Index c = 0; c < p.width; ++c) {
    const Index j = p.first_col + c;
    std::span<const Index> col_rows(a.row_idx.data() + a.col_ptr[j],
                                    static_cast<std::size_t>(a.col_ptr[j + 1] - a.col_ptr[j]));
    auto pos = relative_indices(col_rows, p.rows);
    for (std::size_t k = 0; k < pos.size(); ++k)
      p(pos[k], c) = a.values[static_cast<std::size_t>(a.col_ptr[j]) + k];
  }
  return p;
}

Panel factor_panel(Panel p) {
  const Index m = p.m();
  const Index w = p.width;
  for (Index k = 0; k < w; ++k) {
    const double pivot = p(k, k);
    if (!(pivot > 0.0))
      throw Error(ErrorCode::kNotPositiveDefinite,
                  "not-positive-definite at column " + std::to_string(p.first_col + k),
                  p.first_col + k);
    const double lkk = std::sqrt(pivot);
    p(k, k) = lkk;
    for (Index i = k + 1; i < m; ++i) p(i, k) /= lkk;
    for (Index c = k + 1; c < w; ++c) {
      const double lck = p(c, k);
      if (lck == 0.0) continue;
      for (Index i = c; i < m; ++i) p(i, c) -= p(i, k) * lck;
    }
  }
  for (Index c = 1; c < w; ++c)
    for (Index r = 0; r < c; ++r) p(r, c) = 0.0;
  return p;
}

AggregateVector compute_update(const Panel& src, Index tgt_snode, Index tgt_first_col,
                               Index tgt_width, std::span<const Index> tgt_rows) {
  const auto first = std::lower_bound(src.rows.begin(), src.rows.end(), tgt_first_col);
  const auto block_end = std::lower_bound(first, src.rows.end(), tgt_first_col + tgt_width);
  if (first == block_end)
    throw Error(ErrorCode::kInvalidArgument,
                "supernode " + std::to_string(src.snode) + " does not update supernode " +
                    std::to_string(tgt_snode));
  const Index p0 = static_cast<Index>(first - src.rows.begin());
  const Index p1 = static_cast<Index>(block_end - src.rows.begin());

  AggregateVector t = zero_aggregate(src.snode, tgt_snode, tgt_first_col, tgt_width,
                                     std::vector<Index>(first, src.rows.end()));
  relative_indices(t.rows, tgt_rows);

  const Index w = src.width;
  for (Index q = p0; q < p1; ++q) {
    const Index c = src.rows[q] - tgt_first_col;
    for (Index r = q; r < src.m(); ++r) {
      double s = 0.0;
      for (Index k = 0; k < w; ++k) s += src(r, k) * src(q, k);
      t(r - p0, c) = -s;
    }
  }
  return t;
}

AggregateVector zero_aggregate(Index src, Index tgt, Index tgt_first_col, Index tgt_width,
                               std::vector<Index> rows) {
  AggregateVector t;
  t.src = src;
  t.tgt = tgt;
  t.tgt_first_col = tgt_first_col;
  t.tgt_width = tgt_width;
  t.rows = std::move(rows);
  t.data.assign(t.rows.size() * static_cast<std::size_t>(tgt_width), 0.0);
  return t;
}

void accumulate(AggregateVector& acc, const AggregateVector& t) {
  if (acc.tgt != t.tgt || acc.tgt_width != t.tgt_width || acc.tgt_first_col != t.tgt_first_col)
    throw Error(ErrorCode::kStructuralMismatch, "aggregates target different supernodes");
  const auto pos = relative_indices(t.rows, acc.rows);
  for (Index c = 0; c < t.tgt_width; ++c)
    for (Index r = 0; r < t.m(); ++r) acc(pos[r], c) += t(r, c);
}

Panel apply_aggregates(Panel p, std::span<const AggregateVector> aggs) {
  std::vector<const AggregateVector*> order;
  order.reserve(aggs.size());
  for (const auto& a : aggs) order.push_back(&a);
  std::stable_sort(order.begin(), order.end(),
                   [](const AggregateVector* x, const AggregateVector* y) { return x->src < y->src; });
  for (const AggregateVector* a : order) {
    if (a->tgt != p.snode || a->tgt_width != p.width)
      throw Error(ErrorCode::kStructuralMismatch, "aggregate targets another supernode");
    const auto pos = relative_indices(a->rows, p.rows);
    for (Index c = 0; c < p.width; ++c)
      for (Index r = 0; r < a->m(); ++r) p(pos[r], c) += (*a)(r, c);
  }
  return p;
}

double factor_flops(Index m, Index width) {
  double f = 0.0;
  for (Index k = 0; k < width; ++k) {
    f += 1.0 + static_cast<double>(m - k - 1);
    for (Index c = k + 1; c < width; ++c) f += 2.0 * static_cast<double>(m - c);
  }
  return f;
}

double update_flops(Index src_width, Index below, Index in_block) {
  const double pairs = static_cast<double>(in_block) * static_cast<double>(below) -
                       0.5 * static_cast<double>(in_block) * static_cast<double>(in_block - 1);
  return 2.0 * static_cast<double>(src_width) * pairs;
}

}  // namespace symsolve
