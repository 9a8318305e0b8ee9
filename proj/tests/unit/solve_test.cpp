#include <cmath>
#include <random>

#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"
#include "symsolve/driver.hpp"
#include "symsolve/error.hpp"
#include "symsolve/solve.hpp"

using namespace symsolve;

namespace {

FactorResult factor_of(const SparseSymMatrix& a, int nprocs = 1) {
  SolverOptions opts;
  opts.run.nprocs = nprocs;
  auto run = factorize(a, opts);
  REQUIRE(run.factor.has_value());
  return std::move(*run.factor);
}

double inf_rel_error(const std::vector<double>& x, const std::vector<double>& x0) {
  double e = 0.0, m = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    e = std::max(e, std::abs(x[k] - x0[k]));
    m = std::max(m, std::abs(x0[k]));
  }
  return e / m;
}

}  // namespace

TEST_CASE("identity solve returns the right-hand side") {
  const std::vector<double> ones(4, 1.0);
  const auto f = factor_of(diagonal_matrix(ones));
  const std::vector<double> b{3, -1, 0.5, 7};
  CHECK(solve(f, b) == b);
}

TEST_CASE("diagonal solve") {
  const std::vector<double> d{4, 9};
  const auto f = factor_of(diagonal_matrix(d));
  const std::vector<double> b{8, 27};
  CHECK(solve(f, b) == std::vector<double>{2, 3});
  const std::vector<double> wrong{1, 2, 3};
  CHECK_THROWS_AS(solve(f, wrong), Error);
}

TEST_CASE("grid solve recovers ones") {
  const auto a = laplacian_2d(4, 4);
  const std::vector<double> ones(16, 1.0);
  const auto x = solve(factor_of(a, 4), a.multiply(ones));
  for (double v : x) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("triangular solves on a hand factor") {
  // [[4,2],[2,5]] has L = [[2,0],[1,2]] and no fill-reducing reordering to do.
  SolverOptions opts;
  opts.ordering = OrderingKind::kNatural;
  const auto a = from_lower_triplets(2, std::vector<Index>{0, 1, 1}, std::vector<Index>{0, 0, 1},
                                     std::vector<double>{4, 2, 5});
  auto run = factorize(a, opts);
  REQUIRE(run.factor.has_value());
  const auto& f = *run.factor;
  const auto l = lower_factor(f);
  CHECK(l.values == std::vector<double>{2, 1, 2});
  const std::vector<double> b{4, 6};
  CHECK(forward_solve(f, b) == std::vector<double>{2, 2});
  const std::vector<double> y{2, 2};
  CHECK(backward_solve(f, y) == std::vector<double>{0.5, 1});

  const std::vector<double> ones(2, 1.0);
  const auto id = factor_of(diagonal_matrix(ones));
  CHECK(forward_solve(id, b) == b);
}

TEST_CASE("random system against dense triangular solves") {
  std::mt19937_64 rng(81);
  const auto a = gen::random_spd(50, 4.0, rng);
  const auto f = factor_of(a, 3);
  const auto b = oracle::random_vector(50, 82);
  const auto l = oracle::cholesky_rows(oracle::permute_dense(oracle::dense(a), f.perm.perm), 50);
  std::vector<double> pb(50);
  for (std::size_t k = 0; k < 50; ++k) pb[k] = b[static_cast<std::size_t>(f.perm.perm[k])];
  const auto pz = oracle::upper_solve(l, 50, oracle::lower_solve(l, 50, pb));
  std::vector<double> want(50);
  for (std::size_t k = 0; k < 50; ++k) want[static_cast<std::size_t>(f.perm.perm[k])] = pz[k];
  CHECK(inf_rel_error(solve(f, b), want) <= 1e-12);
}

TEST_CASE("property: manufactured solutions and triangular inverses") {
  std::mt19937_64 rng(83);
  for (int trial = 0; trial < 25; ++trial) {
    const Index n = gen::uniform(rng, 1, 120);
    const auto a = gen::random_spd(n, 4.0, rng);
    const auto f = factor_of(a, static_cast<int>(gen::uniform(rng, 1, 6)));
    const auto x0 = oracle::random_vector(static_cast<std::size_t>(n), static_cast<std::uint64_t>(trial));
    const auto b = a.multiply(x0);
    const auto x = solve(f, b);
    CHECK(inf_rel_error(x, x0) <= 1e-9);
    CHECK(relative_residual(a, x, b) <= 1e-12);
    CHECK(factor_residual(a, f) <= 1e-12);

    // L (forward_solve(L, y)) == y.
    const auto l = lower_factor(f);
    const auto y = oracle::random_vector(static_cast<std::size_t>(n), 1000 + static_cast<std::uint64_t>(trial));
    const auto z = forward_solve(f, y);
    std::vector<double> back(static_cast<std::size_t>(n), 0.0);
    for (Index j = 0; j < n; ++j)
      for (Index q = l.col_ptr[j]; q < l.col_ptr[j + 1]; ++q) back[l.row_idx[q]] += l.values[q] * z[j];
    CHECK(inf_rel_error(back, y) <= 1e-12);
    // L^T (backward_solve(L^T, y)) == y.
    const auto w = backward_solve(f, y);
    std::vector<double> up(static_cast<std::size_t>(n), 0.0);
    for (Index j = 0; j < n; ++j)
      for (Index q = l.col_ptr[j]; q < l.col_ptr[j + 1]; ++q) up[j] += l.values[q] * w[l.row_idx[q]];
    CHECK(inf_rel_error(up, y) <= 1e-12);
  }
}

TEST_CASE("factor residual notices a wrong factor") {
  const auto a = laplacian_2d(4, 4);
  auto f = factor_of(a);
  CHECK(factor_residual(a, f) <= 1e-14);
  f.panels[0].data[0] *= 1.01;
  CHECK(factor_residual(a, f) > 1e-6);
}
