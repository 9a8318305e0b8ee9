#include <cmath>
#include <random>

#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"
#include "symsolve/driver.hpp"
#include "symsolve/error.hpp"
#include "symsolve/fixtures.hpp"
#include "symsolve/ordering.hpp"

using namespace symsolve;

namespace {

SolverOptions options(int p, MapKind map, Protocol proto, Schedule s) {
  SolverOptions o;
  o.run.nprocs = p;
  o.run.map = map;
  o.run.protocol = proto;
  o.run.schedule = s;
  return o;
}

std::vector<double> dense_l(const FactorResult& f) {
  const auto n = static_cast<std::size_t>(f.n());
  std::vector<double> l(n * n, 0.0);
  const auto csc = lower_factor(f);
  for (Index j = 0; j < csc.n; ++j)
    for (Index q = csc.col_ptr[j]; q < csc.col_ptr[j + 1]; ++q)
      l[static_cast<std::size_t>(j) * n + static_cast<std::size_t>(csc.row_idx[q])] = csc.values[q];
  return l;
}

}  // namespace

TEST_CASE("analysis composes the ordering with the tree postorder") {
  const auto a = laplacian_2d(5, 5);
  const auto an = analyze(a, SolverOptions{});
  CHECK(oracle::dense(an.permuted) == oracle::permute_dense(oracle::dense(a), an.perm.perm));
  // Postordered: every parent above its child.
  for (Index v = 0; v < a.n; ++v)
    if (an.sf.etree.parent[v] != kNone) CHECK(an.sf.etree.parent[v] > v);
  CHECK(an.sf.lstruct == oracle::boolean_elimination(an.permuted));

  SolverOptions given;
  given.ordering = OrderingKind::kGiven;
  CHECK_THROWS_AS(analyze(a, given), Error);
  given.given_perm = Permutation::identity(3);
  CHECK_THROWS_AS(analyze(a, given), Error);
}

TEST_CASE("grid factor matches dense cholesky of the permuted matrix") {
  const auto a = laplacian_2d(3, 3);
  for (auto map : {MapKind::kFanIn, MapKind::kFanOut, MapKind::kFanBoth}) {
    const auto run = factorize(a, options(3, map, Protocol::kPull, Schedule::kDynamic));
    REQUIRE(run.factor.has_value());
    const auto want = oracle::cholesky_rows(oracle::permute_dense(oracle::dense(a), run.factor->perm.perm), 9);
    const auto got = dense_l(*run.factor);
    double err = 0.0, norm = 0.0;
    for (std::size_t k = 0; k < want.size(); ++k) {
      err += (got[k] - want[k]) * (got[k] - want[k]);
      norm += want[k] * want[k];
    }
    CHECK(std::sqrt(err / norm) <= 1e-12);
  }
}

TEST_CASE("not positive definite reports the original column") {
  // Column 2 (0-based) is the first failing pivot under the natural order.
  const auto a = from_lower_triplets(3, std::vector<Index>{0, 1, 2, 2}, std::vector<Index>{0, 1, 2, 1},
                                     std::vector<double>{1, 1, 1, 2});
  for (auto ord : {OrderingKind::kNatural, OrderingKind::kMinDegree}) {
    SolverOptions o = options(2, MapKind::kFanBoth, Protocol::kPull, Schedule::kStatic);
    o.ordering = ord;
    try {
      factorize(a, o);
      FAIL("expected not-positive-definite");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kNotPositiveDefinite);
      CHECK((e.index() == 1 || e.index() == 2));
    }
  }
  SolverOptions o;
  o.ordering = OrderingKind::kNatural;
  try {
    factorize(a, o);
    FAIL("expected not-positive-definite");
  } catch (const Error& e) {
    CHECK(e.index() == 2);
  }
}

TEST_CASE("missing diagonal fails fast") {
  const auto a = from_lower_triplets(2, std::vector<Index>{1}, std::vector<Index>{0}, std::vector<double>{1});
  CHECK_THROWS_AS(factorize(a, SolverOptions{}), Error);
}

TEST_CASE("property: every protocol, schedule and map gives the same factor quality and traffic") {
  std::mt19937_64 rng(91);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = gen::uniform(rng, 5, 150);
    const auto a = gen::random_spd(n, 3.0, rng);
    for (int p : {1, 2, 3, 7}) {
      for (auto map : {MapKind::kFanIn, MapKind::kFanOut, MapKind::kFanBoth}) {
        std::optional<RunStats> base;
        for (auto proto : {Protocol::kPushOrdered, Protocol::kPull})
          for (auto s : {Schedule::kStatic, Schedule::kDynamic}) {
            auto o = options(p, map, proto, s);
            o.max_supernode_width = trial % 2 ? 150 : 4;
            o.run.perturbation = 0.3;
            o.run.seed = static_cast<std::uint64_t>(trial);
            const auto run = factorize(a, o);
            REQUIRE(run.factor.has_value());
            CHECK(factor_residual(a, *run.factor) <= 1e-12);
            CHECK(run.stats.live_aggregate_buffers() == 0);
            if (!base) {
              base = run.stats;
            } else {
              CHECK(run.stats.messages == base->messages);
              CHECK(run.stats.bytes == base->bytes);
            }
          }
      }
    }
  }
}

TEST_CASE("static factor is bitwise repeatable") {
  const auto a = laplacian_2d(7, 6);
  auto o = options(4, MapKind::kFanBoth, Protocol::kPull, Schedule::kStatic);
  o.run.record_trace = true;
  o.run.perturbation = 0.5;
  o.run.seed = 9;
  const auto x = factorize(a, o);
  const auto y = factorize(a, o);
  REQUIRE(x.factor.has_value());
  REQUIRE(y.factor.has_value());
  for (std::size_t s = 0; s < x.factor->panels.size(); ++s) CHECK(x.factor->panels[s].data == y.factor->panels[s].data);
  CHECK(x.stats.trace == y.stats.trace);
}

TEST_CASE("eager push on a matrix graph either finishes correctly or reports a cycle") {
  const auto a = laplacian_2d(8, 8);
  for (int p : {2, 3, 4}) {
    const auto run = factorize(a, options(p, MapKind::kFanBoth, Protocol::kPush, Schedule::kStatic));
    if (run.factor) {
      CHECK(factor_residual(a, *run.factor) <= 1e-12);
    } else {
      REQUIRE_FALSE(run.stats.completed());
      CHECK(run.stats.deadlock->cycle.size() >= 1);
    }
  }
}

TEST_CASE("pull holds no more aggregate memory than buffered ordered push") {
  const auto a = laplacian_2d(8, 8);
  const auto pull = factorize(a, options(4, MapKind::kFanIn, Protocol::kPull, Schedule::kStatic));
  const auto push = factorize(a, options(4, MapKind::kFanIn, Protocol::kPushOrdered, Schedule::kStatic));
  REQUIRE(pull.factor.has_value());
  REQUIRE(push.factor.has_value());
  CHECK(pull.stats.peak_aggregate_bytes > 0);
  CHECK(pull.stats.peak_aggregate_bytes <= push.stats.peak_aggregate_bytes);
  CHECK(factor_residual(a, *pull.factor) <= 1e-12);
  CHECK(factor_residual(a, *push.factor) <= 1e-12);
}
