#include "symsolve/symbolic.hpp"

#include <algorithm>
#include <iterator>

#include "symsolve/error.hpp"

namespace symsolve {

EliminationTree etree(const SparseSymMatrix& a) {
  const Index n = a.n;
  // Row k's entries left of the diagonal, i.e. the upper triangle by columns.
  std::vector<Index> row_ptr(static_cast<std::size_t>(n) + 1, 0);
  for (Index j = 0; j < n; ++j)
    for (Index k = a.col_ptr[j]; k < a.col_ptr[j + 1]; ++k)
      if (a.row_idx[k] != j) ++row_ptr[a.row_idx[k] + 1];
  for (Index i = 0; i < n; ++i) row_ptr[i + 1] += row_ptr[i];
  std::vector<Index> cols(static_cast<std::size_t>(row_ptr[n]));
  std::vector<Index> fill_pos(row_ptr.begin(), row_ptr.end() - 1);
  for (Index j = 0; j < n; ++j)
    for (Index k = a.col_ptr[j]; k < a.col_ptr[j + 1]; ++k)
      if (a.row_idx[k] != j) cols[fill_pos[a.row_idx[k]]++] = j;

  EliminationTree t;
  t.parent.assign(static_cast<std::size_t>(n), kNone);
  std::vector<Index> ancestor(static_cast<std::size_t>(n), kNone);
  for (Index k = 0; k < n; ++k) {
    for (Index p = row_ptr[k]; p < row_ptr[k + 1]; ++p) {
      Index i = cols[p];
      while (i != kNone && i < k) {
        Index next = ancestor[i];
        ancestor[i] = k;
        if (next == kNone) t.parent[i] = k;
        i = next;
      }
    }
  }
  return t;
}

Permutation postorder_tree(const EliminationTree& t) {
  const Index n = t.size();
  std::vector<Index> head(static_cast<std::size_t>(n), kNone);
  std::vector<Index> next(static_cast<std::size_t>(n), kNone);
  // Insert in decreasing order so child lists come out increasing.
  for (Index v = n - 1; v >= 0; --v) {
    Index p = t.parent[v];
    if (p == kNone) continue;
    if (p <= v || p >= n)
      throw Error(ErrorCode::kInvalidArgument, "elimination tree edge does not point upward");
    next[v] = head[p];
    head[p] = v;
  }

  std::vector<Index> order;
  order.reserve(static_cast<std::size_t>(n));
  std::vector<Index> stack;
  std::vector<Index> cursor(head);
  for (Index root = 0; root < n; ++root) {
    if (t.parent[root] != kNone) continue;
    stack.push_back(root);
    while (!stack.empty()) {
      Index v = stack.back();
      Index child = cursor[v];
      if (child != kNone) {
        cursor[v] = next[child];
        stack.push_back(child);
      } else {
        stack.pop_back();
        order.push_back(v);
      }
    }
  }
  if (static_cast<Index>(order.size()) != n)
    throw Error(ErrorCode::kInvalidArgument, "elimination tree is not a forest");
  return Permutation(std::move(order));
}

SymbolicFactor symbolic_factorize(const SparseSymMatrix& a, Index max_sn_width) {
  if (max_sn_width < 1) throw Error(ErrorCode::kInvalidArgument, "supernode width cap must be >= 1");
  const Index n = a.n;
  SymbolicFactor sf;
  sf.nnz_a = a.nnz();
  sf.etree = etree(a);
  sf.postorder = postorder_tree(sf.etree);
  sf.lstruct.resize(static_cast<std::size_t>(n));
  sf.colcount.resize(static_cast<std::size_t>(n));

  std::vector<std::vector<Index>> children(static_cast<std::size_t>(n));
  for (Index v = 0; v < n; ++v)
    if (sf.etree.parent[v] != kNone) children[sf.etree.parent[v]].push_back(v);

  // struct(L_j) = struct(A_j) U (struct(L_c) \ {c} for every child c).
  std::vector<Index> scratch;
  for (Index j = 0; j < n; ++j) {
    std::vector<Index> s(a.row_idx.begin() + a.col_ptr[j], a.row_idx.begin() + a.col_ptr[j + 1]);
    for (Index c : children[j]) {
      const auto& cs = sf.lstruct[c];
      scratch.clear();
      std::set_union(s.begin(), s.end(), cs.begin() + 1, cs.end(), std::back_inserter(scratch));
      s.swap(scratch);
    }
    sf.colcount[j] = static_cast<Index>(s.size());
    sf.lstruct[j] = std::move(s);
  }

  sf.snode_start.push_back(0);
  for (Index j = 1; j < n; ++j) {
    const Index start = sf.snode_start.back();
    const bool chained = sf.etree.parent[j - 1] == j && sf.colcount[j] == sf.colcount[j - 1] - 1;
    if (!chained || j - start >= max_sn_width) sf.snode_start.push_back(j);
  }
  if (n == 0) sf.snode_start.clear();
  sf.snode_start.push_back(n);

  const Index ns = static_cast<Index>(sf.snode_start.size()) - 1;
  sf.col_to_snode.resize(static_cast<std::size_t>(n));
  sf.sn_rows.resize(static_cast<std::size_t>(ns));
  sf.sn_parent.assign(static_cast<std::size_t>(ns), kNone);
  for (Index s = 0; s < ns; ++s)
    for (Index j = sf.snode_start[s]; j < sf.snode_start[s + 1]; ++j) sf.col_to_snode[j] = s;
  for (Index s = 0; s < ns; ++s) {
    sf.sn_rows[s] = sf.lstruct[sf.snode_start[s]];
    Index last = sf.snode_start[s + 1] - 1;
    Index p = sf.etree.parent[last];
    if (p != kNone) sf.sn_parent[s] = sf.col_to_snode[p];
  }
  return sf;
}

FillStats fill_stats(const SymbolicFactor& sf) {
  FillStats st;
  for (Index c : sf.colcount) {
    st.nnz_l += c;
    st.flops += c * c;
  }
  st.fill = st.nnz_l - sf.nnz_a;
  return st;
}

std::vector<Index> supernode_histogram(const SymbolicFactor& sf) {
  std::vector<Index> hist;
  for (Index s = 0; s < sf.num_supernodes(); ++s) {
    Index w = sf.width(s);
    std::size_t b = 0;
    while ((Index{2} << b) <= w) ++b;
    if (hist.size() <= b) hist.resize(b + 1, 0);
    ++hist[b];
  }
  return hist;
}

}  // namespace symsolve
