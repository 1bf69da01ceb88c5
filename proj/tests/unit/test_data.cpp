#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "ldb/dataset.hpp"
#include "ldb/error.hpp"
#include "ldb/rng.hpp"

using namespace ldb;

TEST_CASE("rng is counter based and seed separated") {
  Rng a(7);
  CHECK(a.next_u64() == mix64(7 + kGoldenGamma));
  CHECK(a.next_u64() == mix64(7 + 2 * kGoldenGamma));
  Rng b(7), c(8);
  CHECK(b.next_u64() != c.next_u64());
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  Rng r(3);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    CHECK(r.below(7) < 7);
  }
}

TEST_CASE("make_dataset validates and flags sortedness") {
  const auto d = make_dataset({{0.2}, {0.4}, {0.6}}, 1);
  CHECK(d.size() == 3);
  CHECK(d.dims() == 1);
  CHECK(d.is_sorted());
  CHECK_FALSE(make_dataset({{0.6}, {0.2}}, 1).is_sorted());

  const auto p = make_dataset({{0.5, 0.5}}, 2);
  CHECK(p.size() == 1);
  CHECK(p.dims() == 2);
  CHECK_FALSE(p.is_sorted());

  try {
    make_dataset({{1.2}}, 1);
    FAIL("expected EntryOutOfRange");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EntryOutOfRange);
  }
  try {
    make_dataset({{0.1, 0.2}, {0.3}}, 2);
    FAIL("expected ShapeMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ShapeMismatch);
  }
  CHECK_THROWS_AS(make_dataset({}, 1), Error);
  CHECK_THROWS_AS(make_dataset({{std::nan("")}}, 1), Error);
}

TEST_CASE("uniform sampler") {
  CHECK(sample_uniform(3, 1, 7) == sample_uniform(3, 1, 7));
  CHECK_FALSE(sample_uniform(3, 1, 7) == sample_uniform(3, 1, 8));
  const auto big = sample_uniform(100000, 1, 1);
  double mean = 0.0;
  for (double v : big.values()) mean += v;
  mean /= 1e5;
  CHECK(std::abs(mean - 0.5) < 0.01);
  const auto one = sample_uniform(1, 2, 0);
  CHECK(one.size() == 1);
  CHECK(one.dims() == 2);
}

TEST_CASE("gmm sampler") {
  GmmParams narrow{{{1.0, 0.5, 0.01}}};
  const auto d = sample_gmm(10000, 1, narrow, 3);
  std::size_t inside = 0;
  for (double v : d.values()) inside += (v >= 0.45 && v <= 0.55) ? 1 : 0;
  CHECK(inside >= 9900);

  GmmParams two{{{0.5, 0.25, 0.05}, {0.5, 0.75, 0.05}}};
  const auto t = sample_gmm(10000, 1, two, 4);
  double mean = 0.0;
  for (double v : t.values()) mean += v;
  CHECK(std::abs(mean / 1e4 - 0.5) < 0.02);
  CHECK(sample_gmm(50, 2, two, 9) == sample_gmm(50, 2, two, 9));

  GmmParams far{{{1.0, 5.0, 0.1}}};
  try {
    sample_gmm(10, 1, far, 1);
    FAIL("expected RejectionStarvation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::RejectionStarvation);
  }
  GmmParams bad{{{0.5, 0.5, 0.1}}};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("sort_dataset_1d") {
  CHECK(sort_dataset_1d(make_dataset_1d({0.6, 0.2, 0.4})).values() == std::vector<double>{0.2, 0.4, 0.6});
  const auto dup = sort_dataset_1d(make_dataset_1d({0.3, 0.3}));
  CHECK(dup.values() == std::vector<double>{0.3, 0.3});
  CHECK(dup.is_sorted());
  const auto s = make_dataset_1d({0.1, 0.2});
  CHECK(sort_dataset_1d(s) == s);
  try {
    sort_dataset_1d(make_dataset({{0.1, 0.2}}, 2));
    FAIL("expected NotOneDimensional");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotOneDimensional);
  }
}

TEST_CASE("quantize") {
  const auto q = quantize(make_dataset_1d({0.1, 0.3, 0.62, 0.99}), {4, 1});
  CHECK(q.values() == std::vector<double>{0.0, 0.25, 0.5, 0.75});
  CHECK(quantize(make_dataset_1d({1.0}), {4, 1}).values() == std::vector<double>{1.0});
  const auto on_grid = make_dataset_1d({0.0, 0.25, 1.0});
  CHECK(quantize(on_grid, {4, 1}) == on_grid);

  // (1/49) * 49 < 1 in binary floating point; the grid cell must still be 1.
  CHECK(grid_cell(1.0 / 49.0, 49) == 1);
  Rng rng(11);
  for (std::uint64_t u : {1ULL, 3ULL, 7ULL, 49ULL, 100ULL, 999ULL, 1ULL << 32}) {
    for (std::uint64_t k = 0; k <= std::min<std::uint64_t>(u, 200); ++k) {
      CHECK(grid_cell(grid_value(k, u), u) == k);
    }
    const auto data = sample_uniform(200, 2, rng.next_u64());
    const auto once = quantize(data, {u, 2});
    CHECK(quantize(once, {u, 2}) == once);
    for (std::size_t i = 0; i < data.values().size(); ++i) {
      const double err = data.values()[i] - once.values()[i];
      CHECK(err >= 0.0);
      CHECK(err < 1.0 / static_cast<double>(u) + 1e-15);
    }
  }
  CHECK_THROWS_AS(quantize(make_dataset_1d({0.5}), {4, 2}), Error);
}

TEST_CASE("csv round trip") {
  const auto data = sample_uniform(17, 3, 5);
  const auto path = std::filesystem::temp_directory_path() / "ldb_data_roundtrip.csv";
  write_csv(data, path);
  CHECK(read_csv(path) == data);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_csv("/nonexistent/ldb.csv"), Error);
}
