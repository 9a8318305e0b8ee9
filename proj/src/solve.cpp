#include "symsolve/solve.hpp"

#include <cmath>
#include <string>

#include "symsolve/error.hpp"

namespace symsolve {

namespace {

void check_size(const FactorResult& f, std::size_t got) {
  if (static_cast<Index>(got) != f.n())
    throw Error(ErrorCode::kDimensionMismatch, "vector has " + std::to_string(got) +
                                                   " entries, factor has order " +
                                                   std::to_string(f.n()));
}

}  // namespace

LowerCsc lower_factor(const FactorResult& f) {
  LowerCsc l;
  l.n = f.n();
  for (const Panel& p : f.panels) {
    for (Index c = 0; c < p.width; ++c) {
      for (Index r = c; r < p.m(); ++r) {
        l.row_idx.push_back(p.rows[r]);
        l.values.push_back(p(r, c));
      }
      l.col_ptr.push_back(static_cast<Index>(l.row_idx.size()));
    }
  }
  return l;
}

std::vector<double> forward_solve(const FactorResult& f, std::span<const double> b) {
  check_size(f, b.size());
  std::vector<double> y(b.begin(), b.end());
  for (const Panel& p : f.panels) {
    for (Index c = 0; c < p.width; ++c) {
      const Index j = p.first_col + c;
      y[j] /= p(c, c);
      for (Index r = c + 1; r < p.m(); ++r) y[p.rows[r]] -= p(r, c) * y[j];
    }
  }
  return y;
}

std::vector<double> backward_solve(const FactorResult& f, std::span<const double> y) {
  check_size(f, y.size());
  std::vector<double> z(y.begin(), y.end());
  for (auto it = f.panels.rbegin(); it != f.panels.rend(); ++it) {
    const Panel& p = *it;
    for (Index c = p.width - 1; c >= 0; --c) {
      const Index j = p.first_col + c;
      double s = z[j];
      for (Index r = c + 1; r < p.m(); ++r) s -= p(r, c) * z[p.rows[r]];
      z[j] = s / p(c, c);
    }
  }
  return z;
}

std::vector<double> solve(const FactorResult& f, std::span<const double> b) {
  check_size(f, b.size());
  const Index n = f.n();
  std::vector<double> bp(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) bp[k] = b[f.perm.perm[k]];
  const auto z = backward_solve(f, forward_solve(f, bp));
  std::vector<double> x(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) x[f.perm.perm[k]] = z[k];
  return x;
}

double factor_residual(const SparseSymMatrix& a, const FactorResult& f) {
  if (a.n != f.n()) throw Error(ErrorCode::kDimensionMismatch, "matrix and factor orders differ");
  const LowerCsc l = lower_factor(f);
  const Index n = l.n;
  // rows_of[j]: (column k, position of L(j,k)) for every k < j with L(j,k) stored.
  std::vector<std::vector<std::pair<Index, Index>>> rows_of(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k)
    for (Index q = l.col_ptr[k] + 1; q < l.col_ptr[k + 1]; ++q) rows_of[l.row_idx[q]].push_back({k, q});

  std::vector<Index> pos(static_cast<std::size_t>(n), -1);
  std::vector<double> col;
  double err2 = 0.0;
  double covered2 = 0.0;  // squared norm of the entries of C inside struct(L)
  for (Index j = 0; j < n; ++j) {
    const Index b = l.col_ptr[j];
    const Index e = l.col_ptr[j + 1];
    col.assign(static_cast<std::size_t>(e - b), 0.0);
    for (Index q = b; q < e; ++q) pos[l.row_idx[q]] = q - b;
    // (L L^T)(i, j) = sum_k L(i,k) L(j,k), k <= j; i >= j lies in struct(L(:,j)).
    auto add_column = [&](Index k, Index qj) {
      const double ljk = l.values[qj];
      for (Index q = qj; q < l.col_ptr[k + 1]; ++q) {
        const Index p = pos[l.row_idx[q]];
        if (p < 0) throw Error(ErrorCode::kStructuralMismatch, "factor structure is not closed");
        col[p] += l.values[q] * ljk;
      }
    };
    for (const auto& [k, q] : rows_of[j]) add_column(k, q);
    add_column(j, b);
    // Subtract C(:, j) where C(k,l) = A(perm[k], perm[l]).
    const Index pj = f.perm.perm[j];
    for (Index q = b; q < e; ++q) {
      const Index i = l.row_idx[q];
      const double c = a.at(f.perm.perm[i], pj);
      const double w = i == j ? 1.0 : 2.0;
      err2 += w * (col[q - b] - c) * (col[q - b] - c);
      covered2 += w * c * c;
    }
    for (Index q = b; q < e; ++q) pos[l.row_idx[q]] = -1;
  }
  const double na = a.frobenius_norm();
  // Entries of C outside struct(L) are missed by L L^T entirely.
  const double uncovered2 = na * na - covered2;
  if (uncovered2 > 1e-14 * na * na) err2 += uncovered2;
  return na > 0.0 ? std::sqrt(err2) / na : std::sqrt(err2);
}

double relative_residual(const SparseSymMatrix& a, std::span<const double> x,
                         std::span<const double> b) {
  if (static_cast<Index>(x.size()) != a.n || static_cast<Index>(b.size()) != a.n)
    throw Error(ErrorCode::kDimensionMismatch, "vector length differs from matrix order");
  const auto ax = a.multiply(x);
  double r2 = 0.0;
  double b2 = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    r2 += (ax[i] - b[i]) * (ax[i] - b[i]);
    b2 += b[i] * b[i];
  }
  return b2 > 0.0 ? std::sqrt(r2 / b2) : std::sqrt(r2);
}

}  // namespace symsolve
