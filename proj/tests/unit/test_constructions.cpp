#include <doctest.h>

#include <cmath>
#include <set>

#include "ldb/cover.hpp"
#include "ldb/constructions.hpp"
#include "ldb/error.hpp"

using namespace ldb;

namespace {

void check_members(const PackingFamily& fam, std::size_t cols) {
  std::set<std::vector<double>> distinct;
  for (const auto& d : fam.datasets) {
    CHECK(d.size() == fam.params.n);
    CHECK(d.dims() == cols);
    distinct.insert(d.values());
  }
  CHECK(distinct.size() == fam.datasets.size());
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::IoError;
}

}  // namespace

TEST_CASE("inf-norm packing") {
  const auto fam = packing_linf(OpKind::Index, 10, 1, 1.0, 4, 20, 7);
  CHECK(fam.claimed_separation == 2.0);
  CHECK(fam.rule == SeparationRule::Inclusive);
  CHECK(fam.params.k == 2);
  CHECK(fam.params.multiset_size == 5);
  // 5 grid points, multisets of size 5: C(9, 5) = 126 members possible.
  CHECK(fam.log2_available == doctest::Approx(std::log2(126.0)));
  check_members(fam, 1);
  for (const auto& d : fam.datasets) {
    CHECK(d.is_sorted());
    for (double v : d.values()) CHECK(std::fmod(v * 4.0, 1.0) == 0.0);
  }
  const auto cert = certify(fam, 1000, 0, 1);
  CHECK(cert.pass);
  CHECK(cert.method == CertMethod::Exact);
  CHECK(cert.pairs_checked == 190);
  CHECK(cert.min_observed >= 2.0);

  const auto rs = packing_linf(OpKind::RangeSum, 10, 1, 1.0, 4, 10, 7);
  check_members(rs, 2);
  for (const auto& d : rs.datasets)
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(d.at(i, 1) == 1.0);
  CHECK(certify(rs, 45, 0, 2).pass);

  const auto ce2 = packing_linf(OpKind::CardEst, 12, 2, 2.0, 3, 10, 9);
  const auto c2 = certify(ce2, 45, 0, 3);
  CHECK(c2.method == CertMethod::WitnessQueries);
  CHECK(c2.pass);

  CHECK(kind_of([] { packing_linf(OpKind::Index, 10, 1, 0.5, 4, 2, 1); }) ==
        ErrorKind::InvalidParams);
  CHECK(kind_of([] { packing_linf(OpKind::Index, 3, 1, 1.0, 1, 3, 1); }) ==
        ErrorKind::FamilyTooLarge);
}

TEST_CASE("1-norm packings") {
  const auto idx = packing_l1_index(100, 0.5, 20, 4);
  CHECK(idx.rule == SeparationRule::Strict);
  CHECK(idx.params.k == 10);
  check_members(idx, 1);
  const auto c1 = certify(idx, 200, 0, 4);
  CHECK(c1.pass);
  CHECK(c1.min_observed > 0.5);

  const auto ce = packing_l1_ce(100, 1, 0.05, 20, 5);
  CHECK(ce.params.internal_eps == doctest::Approx(0.2));
  check_members(ce, 1);
  const auto c2 = certify(ce, 50, 0, 5);
  CHECK(c2.method == CertMethod::Exact);
  CHECK(c2.pass);
  CHECK(c2.min_observed > 0.05);

  CHECK(kind_of([] { packing_l1_ce(100, 1, 2.0, 2, 1); }) == ErrorKind::InvalidParams);
  CHECK(kind_of([] { packing_l1_index(100, 6.0, 2, 1); }) == ErrorKind::InvalidParams);
}

TEST_CASE("quantile grid and mu packing") {
  const Cdf sq = [](double x) { return x * x; };
  const auto g = quantile_grid(sq, 4);
  REQUIRE(g.size() == 5);
  CHECK(g[0] == 0.0);
  CHECK(g[4] == 1.0);
  for (int i = 1; i < 4; ++i) CHECK(g[i] == doctest::Approx(std::sqrt(i / 4.0)).epsilon(1e-10));

  CHECK(kind_of([] { validate_cdf([](double x) { return 1.0 - x; }); }) ==
        ErrorKind::CdfNotMonotone);
  CHECK(kind_of([] { validate_cdf([](double x) { return 0.5 * x; }); }) ==
        ErrorKind::CdfNotMonotone);

  const auto mu = packing_mu_index(100, 0.5, sq, 20, 6);
  CHECK(mu.norm.tag == NormTag::Mu);
  check_members(mu, 1);
  const auto cert = certify(mu, 190, 0, 6);
  CHECK(cert.method == CertMethod::Exact);
  CHECK(cert.pass);
}

TEST_CASE("delta family and pigeonhole") {
  const auto fam = delta_family(10, 4);
  REQUIRE(fam.datasets.size() == 5);
  const auto cert = certify(fam, 10, 0, 1);
  CHECK(cert.pass);
  CHECK(cert.min_observed == 10.0);

  const double eps = 2.5;  // cover unit 1/4 holds the family exactly
  const auto w = pigeonhole_witness(fam, 2, truncated_cover_encoder(OpKind::Index, eps, 2),
                                    truncated_cover_decoder(OpKind::Index, 10, 1, eps, 2));
  CHECK(w.exact);
  CHECK(w.max_error > 5.0);
  CHECK(w.exceeds_half);

  // Answer-level decoder: predict the midpoint rank of the two collided
  // members for every code; the error is still at least half the separation.
  const AnswerDecoder mid = [](std::uint64_t, const Query& q) {
    const double x = std::get<RankQuery>(q).q;
    return x >= 0.25 ? 10.0 : 5.0;
  };
  EvalConfig cfg;
  const Encoder collide = [](const Dataset&) { return std::uint64_t{0}; };
  const auto a = pigeonhole_witness(fam, 2, collide, mid, cfg);
  CHECK(a.max_error >= 5.0);
  CHECK(a.exceeds_half);

  CHECK(kind_of([&] { pigeonhole_witness(fam, 3, collide, truncated_cover_decoder(OpKind::Index, 10, 1, eps, 3)); }) ==
        ErrorKind::NoCollision);
  const Encoder wide = [](const Dataset&) { return std::uint64_t{9}; };
  CHECK(kind_of([&] { pigeonhole_witness(fam, 2, wide, truncated_cover_decoder(OpKind::Index, 10, 1, eps, 2)); }) ==
        ErrorKind::InvalidArgs);
}

TEST_CASE("witness queries") {
  const auto a = make_dataset({{0.25, 0.5}, {0.25, 0.5}}, 2);
  const auto b = make_dataset({{0.5, 0.5}, {0.5, 0.5}}, 2);
  CHECK(witness_linf(OpKind::CardEst, a, b, 4) == 2.0);
  CHECK(witness_linf(OpKind::CardEst, a, a, 4) == 0.0);
}
