#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "ldb/bounds.hpp"
#include "ldb/cover.hpp"
#include "ldb/error.hpp"

using namespace ldb;

namespace {

Dataset with_value_column(const Dataset& keys, Rng& rng) {
  std::vector<double> v;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    for (double x : keys.row(i)) v.push_back(x);
    v.push_back(rng.uniform());
  }
  return Dataset(keys.size(), keys.dims() + 1, v);
}

}  // namespace

TEST_CASE("record_cell is mixed radix") {
  const std::vector<double> r{0.5, 0.25};
  CHECK(record_cell(r, 4) == 2 * 5 + 1);
  const std::vector<double> one{1.0};
  CHECK(record_cell(one, 4) == 4);
}

TEST_CASE("decode of encode is the sorted quantized dataset") {
  Rng rng(40);
  for (int t = 0; t < 200; ++t) {
    const auto n = 1 + rng.below(30);
    const double eps = 0.05 + rng.uniform() * 3.0;
    if (eps > static_cast<double>(n)) continue;
    const auto op = static_cast<OpKind>(t % 3);
    const std::size_t d = op == OpKind::Index ? 1 : 1 + rng.below(2);
    Dataset data = sample_uniform(n, d, rng.next_u64());
    if (op == OpKind::RangeSum) data = with_value_column(data, rng);
    if (op == OpKind::Index) data = sort_dataset_1d(data);

    const auto code = cover_encode(data, eps, op);
    const auto u = cover_denominator(n, eps);
    CHECK(code.denominator == u);
    CHECK(code.d == d);
    CHECK(code.index < covering_count(op, n, d, u));
    CHECK(code.bit_length ==
          static_cast<std::uint64_t>(std::ceil(covering_count_log2(op, n, d, eps))));
    CHECK(cover_decode(code) == sort_rows(quantize(data, GridSpec{u, data.dims()})));

    const auto back = deserialize(serialize(code));
    CHECK(back.op == code.op);
    CHECK(back.n == code.n);
    CHECK(back.d == code.d);
    CHECK(back.denominator == code.denominator);
    CHECK(back.index == code.index);
    CHECK(back.bit_length == code.bit_length);
  }
}

TEST_CASE("cover error guarantees in one dimension") {
  Rng rng(41);
  for (int t = 0; t < 100; ++t) {
    const auto n = 1 + rng.below(40);
    const double eps = std::min<double>(n, 0.01 + rng.uniform() * 2.0);
    const auto idx = sort_dataset_1d(sample_uniform(n, 1, rng.next_u64()));
    CHECK(rank_l1(idx, cover_decode(cover_encode(idx, eps, OpKind::Index))) <= eps);

    const auto ce = sample_uniform(n, 1, rng.next_u64());
    CHECK(card1d_l1(ce, cover_decode(cover_encode(ce, eps, OpKind::CardEst))) <= 2.0 * eps);

    const auto rs = with_value_column(sample_uniform(n, 1, rng.next_u64()), rng);
    CHECK(sum1d_l1(rs, cover_decode(cover_encode(rs, eps, OpKind::RangeSum))) <= 3.0 * eps);
  }
}

TEST_CASE("mu cover") {
  const Cdf sq = [](double x) { return x * x; };
  Rng rng(42);
  for (int t = 0; t < 50; ++t) {
    const auto n = 1 + rng.below(30);
    const double eps = std::min<double>(n, 0.05 + rng.uniform());
    const auto data = sort_dataset_1d(sample_uniform(n, 1, rng.next_u64()));
    const auto code = cover_encode_mu(data, eps, sq);
    const auto back = cover_decode_mu(code, sq);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(back.at(i, 0) <= data.at(i, 0));
      CHECK(sq(data.at(i, 0)) - sq(back.at(i, 0)) <= eps / static_cast<double>(n) + 1e-9);
    }
    CHECK(rank_mu(data, back, sq) <= eps + 1e-9);
  }
}

TEST_CASE("cover errors") {
  const auto data = make_dataset_1d({0.1, 0.2});
  CHECK_THROWS_AS(cover_encode(data, 0.0, OpKind::Index), Error);
  CHECK_THROWS_AS(cover_encode(data, 3.0, OpKind::Index), Error);
  CHECK_THROWS_AS(cover_encode(make_dataset({{0.1}}, 1), 1.0, OpKind::RangeSum), Error);

  auto code = cover_encode(data, 1.0, OpKind::Index);
  code.index = covering_count(OpKind::Index, 2, 1, code.denominator);
  try {
    cover_decode(code);
    FAIL("expected IndexOutOfRange");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IndexOutOfRange);
  }

  auto bytes = serialize(cover_encode(data, 1.0, OpKind::Index));
  auto bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(deserialize(bad), Error);
  bad = bytes;
  bad.push_back(0);
  CHECK_THROWS_AS(deserialize(bad), Error);
  bad = bytes;
  bad[4] = 2;
  CHECK_THROWS_AS(deserialize(bad), Error);
}

TEST_CASE("cover file round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "ldb_cover_test";
  std::filesystem::create_directories(dir);
  const auto data = sample_uniform(25, 2, 3);
  const auto code = cover_encode(data, 0.5, OpKind::CardEst);
  write_code(code, dir / "c.bin");
  const auto back = read_code(dir / "c.bin");
  CHECK(back.index == code.index);
  CHECK(cover_decode(back) == cover_decode(code));
  CHECK_THROWS_AS(read_code(dir / "missing.bin"), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("truncated cover codec") {
  const auto data = sort_dataset_1d(sample_uniform(10, 1, 5));
  const auto enc = truncated_cover_encoder(OpKind::Index, 1.0, 64 - 1);
  const auto dec = truncated_cover_decoder(OpKind::Index, 10, 1, 1.0, 63);
  // With more bits than the code needs, truncation is the identity.
  CHECK(dec(enc(data)) == cover_decode(cover_encode(data, 1.0, OpKind::Index)));
  const auto enc2 = truncated_cover_encoder(OpKind::Index, 1.0, 2);
  CHECK(enc2(data) < 4);
}
