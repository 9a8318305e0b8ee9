#include <random>

#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"
#include "symsolve/error.hpp"
#include "symsolve/kernels.hpp"
#include "symsolve/ordering.hpp"
#include "symsolve/taskgraph.hpp"

using namespace symsolve;

namespace {

Panel make_panel(Index first, Index width, std::vector<Index> rows, std::vector<double> data) {
  Panel p;
  p.first_col = first;
  p.width = width;
  p.rows = std::move(rows);
  p.data = std::move(data);
  return p;
}

// Left-looking sequential supernodal factorization built from the kernels.
std::vector<Panel> sequential_factor(const SparseSymMatrix& a, const SymbolicFactor& sf) {
  std::vector<Panel> done;
  for (Index s = 0; s < sf.num_supernodes(); ++s) {
    std::vector<AggregateVector> aggs;
    for (Index i = 0; i < s; ++i)
      for (Index t : update_targets(sf, i))
        if (t == s) aggs.push_back(compute_update(done[i], s, sf.first_col(s), sf.width(s), sf.sn_rows[s]));
    done.push_back(factor_panel(apply_aggregates(assemble_panel(a, sf, s), aggs)));
  }
  return done;
}

std::vector<double> dense_from_panels(const std::vector<Panel>& panels, std::size_t n) {
  std::vector<double> l(n * n, 0.0);
  for (const auto& p : panels)
    for (Index c = 0; c < p.width; ++c)
      for (Index r = 0; r < p.m(); ++r) l[static_cast<std::size_t>(p.first_col + c) * n + p.rows[r]] = p(r, c);
  return l;
}

SparseSymMatrix prepared(const SparseSymMatrix& a) {
  auto b = permute_symmetric(a, minimum_degree(a));
  return permute_symmetric(b, postorder_tree(etree(b)));
}

}  // namespace

TEST_CASE("factor_panel hand cases") {
  auto one = factor_panel(make_panel(3, 1, {3}, {4}));
  CHECK(one.data == std::vector<double>{2});

  auto two_rows = factor_panel(make_panel(3, 1, {3, 5}, {4, 2}));
  CHECK(two_rows.data == std::vector<double>{2, 1});

  auto block = factor_panel(make_panel(0, 2, {0, 1}, {4, 2, 0, 5}));
  CHECK(block.data == std::vector<double>{2, 1, 0, 2});

  try {
    factor_panel(make_panel(7, 2, {7, 8}, {1, 2, 0, 1}));
    FAIL("expected not-positive-definite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNotPositiveDefinite);
    CHECK(e.index() == 8);
  }
}

TEST_CASE("compute_update scalar outer product") {
  Panel src = make_panel(0, 1, {0, 1}, {2, 1});
  const std::vector<Index> tgt_rows{1};
  const auto t = compute_update(src, 1, 1, 1, tgt_rows);
  CHECK(t.rows == std::vector<Index>{1});
  CHECK(t.data == std::vector<double>{-1});

  Panel far = make_panel(0, 1, {0, 4}, {2, 1});
  CHECK_THROWS_AS(compute_update(far, 1, 1, 1, tgt_rows), Error);

  // Rows outside the target structure are refused rather than dropped.
  const std::vector<Index> narrow{1};
  Panel wide = make_panel(0, 1, {0, 1, 2}, {2, 1, 1});
  try {
    compute_update(wide, 1, 1, 1, narrow);
    FAIL("expected a structural mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kStructuralMismatch);
  }
}

TEST_CASE("accumulate into zero and apply") {
  AggregateVector t = zero_aggregate(0, 2, 4, 2, {4, 6});
  t.data = {1, 2, 3, 4};
  AggregateVector acc = zero_aggregate(9, 2, 4, 2, {4, 5, 6});
  accumulate(acc, t);
  CHECK(acc.data == std::vector<double>{1, 0, 2, 3, 0, 4});

  Panel p = make_panel(4, 2, {4, 5, 6}, {7, 1, 2, 0, 9, 3});
  CHECK(apply_aggregates(p, {}).data == p.data);

  AggregateVector neg = zero_aggregate(0, 0, 4, 2, {4, 5, 6});
  for (std::size_t k = 0; k < p.data.size(); ++k) neg.data[k] = -p.data[k];
  p.snode = 0;
  const std::vector<AggregateVector> one{neg};
  for (double v : apply_aggregates(p, one).data) CHECK(v == 0.0);

  AggregateVector other = zero_aggregate(0, 3, 4, 2, {4});
  CHECK_THROWS_AS(accumulate(acc, other), Error);
}

TEST_CASE("accumulated grid aggregates equal the dense sum of their outer products") {
  const auto a = permute_symmetric(laplacian_2d(3, 3), postorder_tree(etree(laplacian_2d(3, 3))));
  const auto sf = symbolic_factorize(a, 1);
  const auto n = static_cast<std::size_t>(a.n);
  const auto l = oracle::cholesky_rows(oracle::dense(a), n);
  const auto panels = sequential_factor(a, sf);

  int checked = 0;
  for (Index s = 0; s < sf.num_supernodes(); ++s) {
    std::vector<Index> sources;
    for (Index i = 0; i < s; ++i)
      for (Index t : update_targets(sf, i))
        if (t == s) sources.push_back(i);
    if (sources.size() < 3) continue;
    AggregateVector acc = zero_aggregate(0, s, sf.first_col(s), sf.width(s), sf.sn_rows[s]);
    for (Index i : sources) accumulate(acc, compute_update(panels[i], s, sf.first_col(s), sf.width(s), sf.sn_rows[s]));
    const Index col = sf.first_col(s);
    for (Index r = 0; r < acc.m(); ++r) {
      const auto row = static_cast<std::size_t>(acc.rows[r]);
      double want = 0.0;
      for (Index i : sources) {
        const auto k = static_cast<std::size_t>(sf.first_col(i));
        want -= l[k * n + row] * l[k * n + static_cast<std::size_t>(col)];
      }
      CHECK(acc(r, 0) == doctest::Approx(want).epsilon(1e-14));
    }
    ++checked;
  }
  CHECK(checked >= 1);
}

TEST_CASE("property: kernel pipeline matches dense cholesky") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = gen::uniform(rng, 1, 60);
    const auto a = prepared(gen::random_spd(n, 3.0, rng));
    const Index width = trial % 2 == 0 ? 150 : 3;
    const auto sf = symbolic_factorize(a, width);
    const auto un = static_cast<std::size_t>(n);
    const auto got = dense_from_panels(sequential_factor(a, sf), un);
    const auto want = oracle::cholesky_rows(oracle::dense(a), un);
    double err = 0.0, norm = 0.0;
    for (std::size_t k = 0; k < got.size(); ++k) {
      err += (got[k] - want[k]) * (got[k] - want[k]);
      norm += want[k] * want[k];
    }
    CHECK(std::sqrt(err / norm) <= 1e-13);
    CHECK(oracle::reconstruction_error(oracle::dense(a), got, un) <= 1e-13);
  }
}

TEST_CASE("property: a single wide panel factors like dense cholesky of its block") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = gen::uniform(rng, 1, 25);
    const auto a = dense_spd_matrix(n);
    const auto sf = symbolic_factorize(a, 150);
    REQUIRE(sf.num_supernodes() == 1);
    const auto p = factor_panel(assemble_panel(a, sf, 0));
    const auto want = dense_cholesky(to_dense(a));
    for (std::size_t k = 0; k < want.size(); ++k)
      CHECK(p.data[k] == doctest::Approx(want[k]).epsilon(1e-14).scale(1.0));
  }
}

TEST_CASE("flop counts") {
  CHECK(factor_flops(1, 1) == 1.0);
  // Column 0: sqrt + 2 divides, column 1 update of 2 rows + sqrt + divide.
  CHECK(factor_flops(3, 2) == 1 + 2 + 2 * 2 + 1 + 1);
  CHECK(update_flops(1, 1, 1) == 2.0);
  CHECK(update_flops(2, 3, 2) == 2.0 * 2 * (2 * 3 - 1));
}
