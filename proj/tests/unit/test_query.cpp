#include <doctest.h>

#include <cmath>

#include "ldb/error.hpp"
#include "ldb/query.hpp"
#include "oracles.hpp"

using namespace ldb;

TEST_CASE("matches is closed on both ends") {
  const std::vector<double> p{0.5};
  CHECK(matches(p, RangeQuery{{0.4}, {0.2}}));
  CHECK_FALSE(matches(p, RangeQuery{{0.6}, {0.1}}));
  const std::vector<double> p2{0.4, 0.9};
  CHECK(matches(p2, RangeQuery{{0.4}, {0.0}}));
}

TEST_CASE("rank") {
  const auto d = make_dataset_1d({0.2, 0.4, 0.6});
  CHECK(rank(d, 0.5) == 2);
  CHECK(rank(d, 0.0) == 0);
  CHECK(rank(d, 1.0) == 3);
  CHECK(rank(make_dataset_1d({0.3, 0.3}), 0.3) == 2);
  try {
    rank(make_dataset_1d({0.6, 0.2}), 0.5);
    FAIL("expected NotSorted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotSorted);
  }

  Rng rng(21);
  for (int t = 0; t < 1000; ++t) {
    const auto v = oracle::sorted_uniform(1 + rng.below(40), rng);
    const double q = rng.uniform();
    const auto data = oracle::ds(v);
    CHECK(rank(data, q) == oracle::count_le(v, q));
    CHECK(rank(data, q) <= rank(data, std::min(1.0, q + 0.01)));
  }
}

TEST_CASE("cardinality and range_sum") {
  CHECK(cardinality(make_dataset({{0.5}}, 1), RangeQuery{{0.4}, {0.2}}) == 1);
  const auto d2 = make_dataset({{0.1, 0.9}, {0.5, 0.5}}, 2);
  CHECK(cardinality(d2, RangeQuery{{0.0, 0.4}, {0.6, 0.2}}) == 1);
  CHECK(cardinality(d2, RangeQuery{{0.0, 0.0}, {1.0, 1.0}}) == 2);
  try {
    cardinality(d2, RangeQuery{{0.0}, {1.0}});
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DimensionMismatch);
  }

  CHECK(range_sum(make_dataset({{0.5, 1.0}}, 2), RangeQuery{{0.4}, {0.2}}) == 1.0);
  CHECK(range_sum(make_dataset({{0.2, 0.3}, {0.8, 0.7}}, 2), RangeQuery{{0.0}, {1.0}}) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(range_sum(d2, RangeQuery{{0.0, 0.0}, {1.0, 1.0}}), Error);

  // With a constant 1 value column, range-sum is cardinality of the predicate
  // columns.
  Rng rng(5);
  for (std::size_t d : {1u, 2u, 3u}) {
    std::vector<std::vector<double>> rows, proj;
    for (int i = 0; i < 30; ++i) {
      std::vector<double> r;
      for (std::size_t j = 0; j < d; ++j) r.push_back(rng.uniform());
      proj.push_back(r);
      r.push_back(1.0);
      rows.push_back(r);
    }
    const auto full = make_dataset(rows, d + 1);
    const auto pr = make_dataset(proj, d);
    for (int t = 0; t < 1000; ++t) {
      const auto q = std::get<RangeQuery>(sample_query(OpKind::CardEst, d, rng));
      CHECK(range_sum(full, q) == static_cast<double>(cardinality(pr, q)));
    }
  }
}

TEST_CASE("sample_query stays in the domain") {
  Rng rng(8);
  double rsum = 0.0;
  for (int t = 0; t < 100000; ++t) {
    const auto q = sample_query(OpKind::RangeSum, 2, rng);
    const auto& g = std::get<RangeQuery>(q);
    CHECK(in_domain(q));
    rsum += g.r[0];
  }
  CHECK(std::abs(rsum / 1e5 - 0.5) < 0.01);
  const auto a = std::get<RangeQuery>(sample_query(OpKind::CardEst, 3, 99));
  const auto b = std::get<RangeQuery>(sample_query(OpKind::CardEst, 3, 99));
  CHECK(a.c == b.c);
  CHECK(a.r == b.r);
  CHECK(std::holds_alternative<RankQuery>(sample_query(OpKind::Index, 1, 1)));
}

TEST_CASE("easy query distribution") {
  Rng rng(3);
  const std::uint64_t n = 7, k = 3;
  const double h = 1.0 / static_cast<double>(n * k);
  for (int t = 0; t < 10000; ++t) {
    const auto q = sample_easy_query(n, k, rng);
    CHECK(q.r[0] <= h + 1e-15);
    CHECK(q.c[0] >= 0.0);
    CHECK(in_domain(Query{q}));
    // Inside one cell of width h.
    const double cell = std::floor(q.c[0] / h);
    CHECK(q.c[0] + q.r[0] <= (cell + 1.0) * h + 1e-12);
  }
  // Under the triangle {offset + r <= h}, P(r <= h/2) = 3/4.
  int low = 0;
  const int samples = 100000;
  for (int t = 0; t < samples; ++t) low += sample_easy_query(n, k, rng).r[0] <= h / 2 ? 1 : 0;
  const double frac = static_cast<double>(low) / samples;
  CHECK(std::abs(frac - 0.75) < 3.0 * std::sqrt(0.75 * 0.25 / samples) + 1e-3);

  const auto single = sample_easy_query(1, 1, 10);
  CHECK(single.c[0] >= 0.0);
  CHECK(single.c[0] + single.r[0] <= 1.0);
}

TEST_CASE("indexed evaluator agrees with the scan") {
  Rng rng(12);
  for (int t = 0; t < 50; ++t) {
    const auto n = 1 + rng.below(60);
    const auto idx = oracle::ds(oracle::sorted_uniform(n, rng));
    const auto ce = sample_uniform(n, 1, rng.next_u64());
    const auto rs = sample_uniform(n, 2, rng.next_u64());
    const auto ce2 = sample_uniform(n, 2, rng.next_u64());
    const QueryEvaluator ei(idx, OpKind::Index), ec(ce, OpKind::CardEst), er(rs, OpKind::RangeSum),
        ec2(ce2, OpKind::CardEst);
    for (int s = 0; s < 50; ++s) {
      const auto qi = sample_query(OpKind::Index, 1, rng);
      const auto q1 = sample_query(OpKind::CardEst, 1, rng);
      const auto q2 = sample_query(OpKind::CardEst, 2, rng);
      CHECK(ei(qi) == evaluate(OpKind::Index, idx, qi));
      CHECK(ec(q1) == evaluate(OpKind::CardEst, ce, q1));
      CHECK(er(q1) == doctest::Approx(evaluate(OpKind::RangeSum, rs, q1)).epsilon(1e-12));
      CHECK(ec2(q2) == evaluate(OpKind::CardEst, ce2, q2));
    }
  }
}
