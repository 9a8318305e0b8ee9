#pragma once

#include <span>
#include <vector>

#include "symsolve/kernels.hpp"
#include "symsolve/matrix.hpp"
#include "symsolve/symbolic.hpp"

namespace symsolve {

// Gathered factor: C = P^T A P = L L^T with C(k, l) = A(perm[k], perm[l]).
struct FactorResult {
  SymbolicFactor sf;
  std::vector<Panel> panels;
  Permutation perm;

  Index n() const { return sf.n(); }
};

// L in compressed-column form, rows sorted, diagonal first.
struct LowerCsc {
  Index n = 0;
  std::vector<Index> col_ptr{0};
  std::vector<Index> row_idx;
  std::vector<double> values;
};

LowerCsc lower_factor(const FactorResult& f);

// L y = b and L^T z = y in the permuted ordering.
std::vector<double> forward_solve(const FactorResult& f, std::span<const double> b);
std::vector<double> backward_solve(const FactorResult& f, std::span<const double> y);

// A x = b in the original ordering. Throws kDimensionMismatch.
std::vector<double> solve(const FactorResult& f, std::span<const double> b);

// ||A - P L L^T P^T||_F / ||A||_F, with L L^T formed over the structure of L.
double factor_residual(const SparseSymMatrix& a, const FactorResult& f);

// ||A x - b||_2 / ||b||_2.
double relative_residual(const SparseSymMatrix& a, std::span<const double> x,
                         std::span<const double> b);

}  // namespace symsolve
