#pragma once

// Independent reference computations for tests. Everything here works on
// dense copies and shares no code with the library beyond the data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "symsolve/matrix.hpp"

namespace oracle {

using symsolve::Index;
using symsolve::SparseSymMatrix;

// Dense column-major copy of the full symmetric matrix.
inline std::vector<double> dense(const SparseSymMatrix& a) {
  const auto n = static_cast<std::size_t>(a.n);
  std::vector<double> d(n * n, 0.0);
  for (Index j = 0; j < a.n; ++j)
    for (Index q = a.col_ptr[j]; q < a.col_ptr[j + 1]; ++q) {
      const auto i = static_cast<std::size_t>(a.row_idx[q]);
      d[static_cast<std::size_t>(j) * n + i] = a.values[q];
      d[i * n + static_cast<std::size_t>(j)] = a.values[q];
    }
  return d;
}

// C(k, l) = A(perm[k], perm[l]) on a dense copy.
inline std::vector<double> permute_dense(const std::vector<double>& d, const std::vector<Index>& perm) {
  const std::size_t n = perm.size();
  std::vector<double> c(n * n);
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t k = 0; k < n; ++k)
      c[l * n + k] = d[static_cast<std::size_t>(perm[l]) * n + static_cast<std::size_t>(perm[k])];
  return c;
}

// Row-by-row (Cholesky-Banachiewicz) factorization; returns column-major L.
inline std::vector<double> cholesky_rows(const std::vector<double>& d, std::size_t n) {
  std::vector<double> l(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = d[j * n + i];
      for (std::size_t k = 0; k < j; ++k) s -= l[k * n + i] * l[k * n + j];
      if (i == j) {
        if (!(s > 0.0)) throw std::runtime_error("oracle: matrix not positive definite");
        l[j * n + i] = std::sqrt(s);
      } else {
        l[j * n + i] = s / l[j * n + j];
      }
    }
  }
  return l;
}

// ||D - L L^T||_F / ||D||_F for dense column-major inputs.
inline double reconstruction_error(const std::vector<double>& d, const std::vector<double>& l,
                                   std::size_t n) {
  double e2 = 0.0;
  double d2 = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k <= std::min(i, j); ++k) s += l[k * n + i] * l[k * n + j];
      const double v = d[j * n + i];
      e2 += (v - s) * (v - s);
      d2 += v * v;
    }
  return std::sqrt(e2 / d2);
}

// Boolean elimination on the dense pattern: returns struct(L(:, j)) per
// column, diagonal included, ascending.
inline std::vector<std::vector<Index>> boolean_elimination(const SparseSymMatrix& a) {
  const auto n = static_cast<std::size_t>(a.n);
  std::vector<std::vector<char>> b(n, std::vector<char>(n, 0));  // b[j][i], i >= j
  for (Index j = 0; j < a.n; ++j)
    for (Index q = a.col_ptr[j]; q < a.col_ptr[j + 1]; ++q) b[j][a.row_idx[q]] = 1;
  for (std::size_t k = 0; k < n; ++k) {
    b[k][k] = 1;
    std::vector<std::size_t> rows;
    for (std::size_t i = k + 1; i < n; ++i)
      if (b[k][i]) rows.push_back(i);
    for (std::size_t x = 0; x < rows.size(); ++x)
      for (std::size_t y = x; y < rows.size(); ++y) b[rows[x]][rows[y]] = 1;
  }
  std::vector<std::vector<Index>> out(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = j; i < n; ++i)
      if (b[j][i]) out[j].push_back(static_cast<Index>(i));
  return out;
}

// Parent = first off-diagonal row of each column of L, -1 for roots.
inline std::vector<Index> etree_from_structure(const std::vector<std::vector<Index>>& ls) {
  std::vector<Index> parent;
  for (const auto& col : ls) parent.push_back(col.size() > 1 ? col[1] : -1);
  return parent;
}

// Supernode starts: column j+1 joins j's group when struct(L(:,j)) minus j
// equals struct(L(:,j+1)) as sets, capped at max_width columns.
inline std::vector<Index> supernode_starts(const std::vector<std::vector<Index>>& ls, Index max_width) {
  std::vector<Index> starts{0};
  const auto n = static_cast<Index>(ls.size());
  for (Index j = 0; j + 1 < n; ++j) {
    std::set<Index> below(ls[j].begin() + 1, ls[j].end());
    std::set<Index> next(ls[j + 1].begin(), ls[j + 1].end());
    const bool same = below == next;
    if (!same || j + 1 - starts.back() >= max_width) starts.push_back(j + 1);
  }
  starts.push_back(n);
  return starts;
}

// Dense lower-triangular solves on a column-major L.
inline std::vector<double> lower_solve(const std::vector<double>& l, std::size_t n, std::vector<double> b) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) b[i] -= l[k * n + i] * b[k];
    b[i] /= l[i * n + i];
  }
  return b;
}

inline std::vector<double> upper_solve(const std::vector<double>& l, std::size_t n, std::vector<double> y) {
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) y[i] -= l[i * n + k] * y[k];
    y[i] /= l[i * n + i];
  }
  return y;
}

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace oracle
