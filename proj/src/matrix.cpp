#include "symsolve/matrix.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <tuple>

#include "symsolve/error.hpp"

namespace symsolve {

namespace {

struct Triplet {
  Index col;
  Index row;
  double value;
};

// Sorts by (col,row) and sums duplicates in place.
void sort_and_sum(std::vector<Triplet>& t) {
  std::stable_sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
    return std::tie(a.col, a.row) < std::tie(b.col, b.row);
  });
  std::size_t out = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (out > 0 && t[out - 1].col == t[k].col && t[out - 1].row == t[k].row) {
      t[out - 1].value += t[k].value;
    } else {
      t[out++] = t[k];
    }
  }
  t.resize(out);
}

SparseSymMatrix assemble(Index n, const std::vector<Triplet>& sorted,
                         Index* missing_diagonals) {
  SparseSymMatrix a;
  a.n = n;
  a.col_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  a.row_idx.reserve(sorted.size() + static_cast<std::size_t>(n));
  a.values.reserve(sorted.size() + static_cast<std::size_t>(n));
  Index missing = 0;
  std::size_t k = 0;
  for (Index j = 0; j < n; ++j) {
    if (k >= sorted.size() || sorted[k].col != j || sorted[k].row != j) {
      a.row_idx.push_back(j);
      a.values.push_back(0.0);
      ++missing;
    }
    while (k < sorted.size() && sorted[k].col == j) {
      a.row_idx.push_back(sorted[k].row);
      a.values.push_back(sorted[k].value);
      ++k;
    }
    a.col_ptr[static_cast<std::size_t>(j) + 1] = a.nnz();
  }
  if (missing_diagonals != nullptr) *missing_diagonals = missing;
  return a;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

double SparseSymMatrix::at(Index i, Index j) const {
  if (i < j) std::swap(i, j);
  auto first = row_idx.begin() + col_ptr[static_cast<std::size_t>(j)];
  auto last = row_idx.begin() + col_ptr[static_cast<std::size_t>(j) + 1];
  auto it = std::lower_bound(first, last, i);
  if (it == last || *it != i) return 0.0;
  return values[static_cast<std::size_t>(it - row_idx.begin())];
}

void SparseSymMatrix::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidArgument, msg); };
  if (n < 0) fail("negative dimension");
  if (col_ptr.size() != static_cast<std::size_t>(n) + 1) fail("col_ptr has wrong length");
  if (col_ptr.front() != 0 || col_ptr.back() != nnz()) fail("col_ptr endpoints inconsistent");
  if (values.size() != row_idx.size()) fail("values and row_idx differ in length");
  for (Index j = 0; j < n; ++j) {
    Index b = col_ptr[static_cast<std::size_t>(j)];
    Index e = col_ptr[static_cast<std::size_t>(j) + 1];
    if (e < b) fail("col_ptr decreasing at column " + std::to_string(j));
    if (b == e || row_idx[static_cast<std::size_t>(b)] != j)
      fail("missing diagonal in column " + std::to_string(j));
    for (Index k = b + 1; k < e; ++k) {
      if (row_idx[static_cast<std::size_t>(k)] <= row_idx[static_cast<std::size_t>(k) - 1])
        fail("row indices not strictly increasing in column " + std::to_string(j));
      if (row_idx[static_cast<std::size_t>(k)] >= n) fail("row index out of range");
    }
  }
}

std::vector<double> SparseSymMatrix::multiply(std::span<const double> x) const {
  if (static_cast<Index>(x.size()) != n)
    throw Error(ErrorCode::kDimensionMismatch, "vector length does not match matrix");
  std::vector<double> y(static_cast<std::size_t>(n), 0.0);
  for (Index j = 0; j < n; ++j) {
    for (Index k = col_ptr[j]; k < col_ptr[j + 1]; ++k) {
      Index i = row_idx[k];
      double v = values[k];
      y[i] += v * x[j];
      if (i != j) y[j] += v * x[i];
    }
  }
  return y;
}

double SparseSymMatrix::frobenius_norm() const {
  double s = 0.0;
  for (Index j = 0; j < n; ++j) {
    for (Index k = col_ptr[j]; k < col_ptr[j + 1]; ++k) {
      double v = values[k];
      s += (row_idx[k] == j ? 1.0 : 2.0) * v * v;
    }
  }
  return std::sqrt(s);
}

Permutation::Permutation(std::vector<Index> new_to_old) : perm(std::move(new_to_old)) {
  const Index n = static_cast<Index>(perm.size());
  iperm.assign(perm.size(), -1);
  for (Index k = 0; k < n; ++k) {
    Index old = perm[k];
    if (old < 0 || old >= n || iperm[old] != -1)
      throw Error(ErrorCode::kInvalidArgument, "permutation is not a bijection");
    iperm[old] = k;
  }
}

Permutation Permutation::identity(Index n) {
  std::vector<Index> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), Index{0});
  return Permutation(std::move(p));
}

Permutation Permutation::inverse() const { return Permutation(iperm); }

Permutation Permutation::then(const Permutation& next) const {
  if (next.size() != size())
    throw Error(ErrorCode::kDimensionMismatch, "permutation sizes differ");
  std::vector<Index> p(perm.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = perm[next.perm[k]];
  return Permutation(std::move(p));
}

MatrixMarketFile load_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorCode::kParse, "empty Matrix Market file");
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || lower(object) != "matrix" || lower(format) != "coordinate")
    throw Error(ErrorCode::kParse, "expected '%%MatrixMarket matrix coordinate' header");
  field = lower(field);
  if (field != "real" && field != "integer")
    throw Error(ErrorCode::kParse, "unsupported field '" + field + "'");
  if (lower(symmetry) != "symmetric")
    throw Error(ErrorCode::kUnsymmetricInput, "header does not declare a symmetric matrix");

  Index rows = -1, cols = -1, entries = -1;
  while (std::getline(in, line)) {
    auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '%') continue;
    std::istringstream size_line(line);
    if (!(size_line >> rows >> cols >> entries))
      throw Error(ErrorCode::kParse, "malformed size line");
    break;
  }
  if (rows < 0) throw Error(ErrorCode::kParse, "missing size line");
  if (rows != cols) throw Error(ErrorCode::kParse, "symmetric matrix must be square");

  std::vector<Triplet> lower_part;
  std::vector<Triplet> upper_part;
  lower_part.reserve(static_cast<std::size_t>(entries));
  Index read = 0;
  while (read < entries && std::getline(in, line)) {
    auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '%') continue;
    std::istringstream t(line);
    Index i = 0, j = 0;
    double v = 0.0;
    if (!(t >> i >> j >> v))
      throw Error(ErrorCode::kParse, "malformed entry on line: " + line);
    if (i < 1 || i > rows || j < 1 || j > cols)
      throw Error(ErrorCode::kIndexOutOfRange,
                  "entry (" + std::to_string(i) + "," + std::to_string(j) + ") outside " +
                      std::to_string(rows) + "x" + std::to_string(cols));
    --i;
    --j;
    if (i >= j) {
      lower_part.push_back({j, i, v});
    } else {
      upper_part.push_back({i, j, v});
    }
    ++read;
  }
  if (read != entries)
    throw Error(ErrorCode::kParse, "expected " + std::to_string(entries) + " entries, found " +
                                       std::to_string(read));

  sort_and_sum(lower_part);
  sort_and_sum(upper_part);
  // An entry given in both triangles is the same symmetric entry stated twice.
  std::vector<Triplet> merged;
  merged.reserve(lower_part.size() + upper_part.size());
  std::size_t a = 0, b = 0;
  auto key = [](const Triplet& t) { return std::tie(t.col, t.row); };
  while (a < lower_part.size() || b < upper_part.size()) {
    if (b == upper_part.size() || (a < lower_part.size() && key(lower_part[a]) < key(upper_part[b]))) {
      merged.push_back(lower_part[a++]);
    } else if (a == lower_part.size() || key(upper_part[b]) < key(lower_part[a])) {
      merged.push_back(upper_part[b++]);
    } else {
      if (lower_part[a].value != upper_part[b].value)
        throw Error(ErrorCode::kUnsymmetricInput,
                    "entries (" + std::to_string(lower_part[a].row + 1) + "," +
                        std::to_string(lower_part[a].col + 1) + ") and its mirror differ");
      merged.push_back(lower_part[a++]);
      ++b;
    }
  }

  MatrixMarketFile out;
  out.declared_entries = entries;
  out.matrix = assemble(rows, merged, &out.missing_diagonals);
  return out;
}

SparseSymMatrix read_matrix_market(const std::filesystem::path& path) {
  return load_matrix_market(path).matrix;
}

void write_matrix_market(const SparseSymMatrix& a, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << a.n << ' ' << a.n << ' ' << a.nnz() << '\n';
  out.precision(17);
  for (Index j = 0; j < a.n; ++j)
    for (Index k = a.col_ptr[j]; k < a.col_ptr[j + 1]; ++k)
      out << a.row_idx[k] + 1 << ' ' << j + 1 << ' ' << a.values[k] << '\n';
}

SparseSymMatrix from_lower_triplets(Index n, std::span<const Index> rows,
                                    std::span<const Index> cols,
                                    std::span<const double> vals,
                                    Index* missing_diagonals) {
  if (rows.size() != cols.size() || rows.size() != vals.size())
    throw Error(ErrorCode::kDimensionMismatch, "triplet arrays differ in length");
  std::vector<Triplet> t;
  t.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    Index i = rows[k], j = cols[k];
    if (i < 0 || j < 0 || i >= n || j >= n)
      throw Error(ErrorCode::kIndexOutOfRange, "triplet index out of range");
    if (i < j) std::swap(i, j);
    t.push_back({j, i, vals[k]});
  }
  sort_and_sum(t);
  return assemble(n, t, missing_diagonals);
}

SparseSymMatrix laplacian_2d(Index kx, Index ky) {
  if (kx < 1 || ky < 1) throw Error(ErrorCode::kInvalidArgument, "grid sides must be >= 1");
  const Index n = kx * ky;
  std::vector<Triplet> t;
  for (Index y = 0; y < ky; ++y) {
    for (Index x = 0; x < kx; ++x) {
      Index v = y * kx + x;
      t.push_back({v, v, 4.0});
      if (x + 1 < kx) t.push_back({v, v + 1, -1.0});
      if (y + 1 < ky) t.push_back({v, v + kx, -1.0});
    }
  }
  sort_and_sum(t);
  return assemble(n, t, nullptr);
}

SparseSymMatrix arrow_matrix(Index n, double diag) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "arrow size must be >= 1");
  std::vector<Triplet> t;
  for (Index j = 0; j < n; ++j) {
    t.push_back({j, j, diag});
    if (j + 1 < n) t.push_back({j, n - 1, 1.0});
  }
  sort_and_sum(t);
  return assemble(n, t, nullptr);
}

SparseSymMatrix diagonal_matrix(std::span<const double> diag) {
  std::vector<Triplet> t;
  for (std::size_t j = 0; j < diag.size(); ++j)
    t.push_back({static_cast<Index>(j), static_cast<Index>(j), diag[j]});
  return assemble(static_cast<Index>(diag.size()), t, nullptr);
}

SparseSymMatrix dense_spd_matrix(Index n) {
  std::vector<Triplet> t;
  for (Index j = 0; j < n; ++j)
    for (Index i = j; i < n; ++i)
      t.push_back({j, i, i == j ? static_cast<double>(n) + 1.0 : 1.0 / static_cast<double>(1 + i - j)});
  return assemble(n, t, nullptr);
}

SparseSymMatrix random_spd(Index n, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  std::vector<Triplet> t;
  std::vector<double> row_sum(static_cast<std::size_t>(n), 0.0);
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      if (coin(rng) < density) {
        double v = value(rng);
        t.push_back({j, i, v});
        row_sum[i] += std::abs(v);
        row_sum[j] += std::abs(v);
      }
    }
  }
  for (Index j = 0; j < n; ++j) t.push_back({j, j, row_sum[j] + 1.0});
  sort_and_sum(t);
  return assemble(n, t, nullptr);
}

SparseSymMatrix permute_symmetric(const SparseSymMatrix& a, const Permutation& p) {
  if (p.size() != a.n)
    throw Error(ErrorCode::kDimensionMismatch, "permutation size does not match matrix");
  std::vector<Triplet> t;
  t.reserve(a.row_idx.size());
  for (Index j = 0; j < a.n; ++j) {
    for (Index k = a.col_ptr[j]; k < a.col_ptr[j + 1]; ++k) {
      Index r = p.iperm[a.row_idx[k]];
      Index c = p.iperm[j];
      if (r < c) std::swap(r, c);
      t.push_back({c, r, a.values[k]});
    }
  }
  std::sort(t.begin(), t.end(), [](const Triplet& x, const Triplet& y) {
    return std::tie(x.col, x.row) < std::tie(y.col, y.row);
  });
  return assemble(a.n, t, nullptr);
}

Index oracle_cap() {
  if (const char* env = std::getenv("SYMSOLVE_ORACLE_CAP")) {
    char* end = nullptr;
    long long v = std::strtoll(env, &end, 10);
    if (end != env && v > 0) return static_cast<Index>(v);
  }
  return 2000;
}

DenseSym to_dense(const SparseSymMatrix& a, Index cap) {
  if (a.n > cap)
    throw Error(ErrorCode::kInvalidArgument,
                "matrix of order " + std::to_string(a.n) + " exceeds dense oracle cap " +
                    std::to_string(cap));
  DenseSym d;
  d.n = a.n;
  d.a.assign(static_cast<std::size_t>(a.n * a.n), 0.0);
  for (Index j = 0; j < a.n; ++j) {
    for (Index k = a.col_ptr[j]; k < a.col_ptr[j + 1]; ++k) {
      d(a.row_idx[k], j) = a.values[k];
      d(j, a.row_idx[k]) = a.values[k];
    }
  }
  return d;
}

std::vector<double> dense_cholesky(const DenseSym& d) {
  const Index n = d.n;
  std::vector<double> a = d.a;
  auto at = [&](Index i, Index j) -> double& { return a[static_cast<std::size_t>(j * n + i)]; };
  for (Index j = 0; j < n; ++j) {
    if (!(at(j, j) > 0.0))
      throw Error(ErrorCode::kNotPositiveDefinite,
                  "not-positive-definite at column " + std::to_string(j), j);
    at(j, j) = std::sqrt(at(j, j));
    for (Index i = j + 1; i < n; ++i) at(i, j) /= at(j, j);
    for (Index k = j + 1; k < n; ++k)
      for (Index i = k; i < n; ++i) at(i, k) -= at(i, j) * at(k, j);
  }
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < j; ++i) at(i, j) = 0.0;
  return a;
}

}  // namespace symsolve
