#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace symsolve {

using Index = std::int64_t;

// Lower triangle (with explicit diagonal) of a symmetric matrix in
// compressed-column form. Row indices are sorted and the first entry of every
// column is its diagonal.
struct SparseSymMatrix {
  Index n = 0;
  std::vector<Index> col_ptr{0};
  std::vector<Index> row_idx;
  std::vector<double> values;

  Index nnz() const { return static_cast<Index>(row_idx.size()); }
  // Entry count of the full symmetric matrix (both triangles).
  Index nnz_full() const { return 2 * nnz() - n; }

  // Value of A(i,j) for any i,j (0 when not stored).
  double at(Index i, Index j) const;

  // Throws Error(kInvalidArgument) when an invariant is broken.
  void validate() const;

  // y = A x using both triangles.
  std::vector<double> multiply(std::span<const double> x) const;
  double frobenius_norm() const;
};

// Symmetric permutation. perm maps new -> old, iperm maps old -> new.
struct Permutation {
  std::vector<Index> perm;
  std::vector<Index> iperm;

  Permutation() = default;
  explicit Permutation(std::vector<Index> new_to_old);

  static Permutation identity(Index n);

  Index size() const { return static_cast<Index>(perm.size()); }
  Permutation inverse() const;
  // Composition: permuting by this and then by `next` equals permuting by
  // the result, i.e. result.perm[k] = perm[next.perm[k]].
  Permutation then(const Permutation& next) const;

  bool operator==(const Permutation& o) const { return perm == o.perm; }
};

// Dense symmetric matrix, column-major n x n.
struct DenseSym {
  Index n = 0;
  std::vector<double> a;

  double& operator()(Index i, Index j) { return a[static_cast<std::size_t>(j * n + i)]; }
  double operator()(Index i, Index j) const { return a[static_cast<std::size_t>(j * n + i)]; }
};

struct MatrixMarketFile {
  SparseSymMatrix matrix;
  Index declared_entries = 0;
  // Columns whose diagonal was absent from the file and inserted as zero.
  Index missing_diagonals = 0;
};

MatrixMarketFile load_matrix_market(const std::filesystem::path& path);
SparseSymMatrix read_matrix_market(const std::filesystem::path& path);
void write_matrix_market(const SparseSymMatrix& a, const std::filesystem::path& path);

// Builds the canonical store from (row, col, value) triplets of the lower
// triangle; duplicates are summed, missing diagonals inserted as zero.
SparseSymMatrix from_lower_triplets(Index n, std::span<const Index> rows,
                                    std::span<const Index> cols,
                                    std::span<const double> vals,
                                    Index* missing_diagonals = nullptr);

SparseSymMatrix laplacian_2d(Index kx, Index ky);
// Diagonal `diag`, ones in the last row (the "arrowhead pointing down").
SparseSymMatrix arrow_matrix(Index n, double diag = 4.0);
SparseSymMatrix diagonal_matrix(std::span<const double> diag);
SparseSymMatrix dense_spd_matrix(Index n);
// Strictly diagonally dominant random SPD matrix with about `density`
// off-diagonal fill per column.
SparseSymMatrix random_spd(Index n, double density, std::uint64_t seed);

// B(iperm[i], iperm[j]) = A(i, j), canonical lower form.
SparseSymMatrix permute_symmetric(const SparseSymMatrix& a, const Permutation& p);

// Dense oracle size cap: SYMSOLVE_ORACLE_CAP or 2000.
Index oracle_cap();
DenseSym to_dense(const SparseSymMatrix& a, Index cap = oracle_cap());

// Column-oriented dense Cholesky exactly as the textbook column loop.
// Returns L column-major with a zero strict upper triangle.
std::vector<double> dense_cholesky(const DenseSym& d);

}  // namespace symsolve
