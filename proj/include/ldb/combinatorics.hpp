#pragma once

#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ldb/rng.hpp"

namespace ldb {

using BigInt = boost::multiprecision::cpp_int;

BigInt binomial(std::uint64_t a, std::uint64_t b);

// log2 of a positive integer, correctly rounded up to the last bit of the
// mantissa; never reports an integer value for a non-power of two, so
// ceil(bigint_log2(x)) is exact.
double bigint_log2(const BigInt& x);

// Position of the highest set bit plus one; 0 for x = 0.
std::uint64_t bit_length(const BigInt& x);

// log2 C(a, b): exact big-integer binomial for a <= 10^4, log-gamma above.
double log2_binomial(std::uint64_t a, std::uint64_t b);
double log2_binomial_lgamma(std::uint64_t a, std::uint64_t b);
// sum_{i=1..b} log2((a - b + i) / i); accurate for huge a with moderate b.
double log2_binomial_sum(double a, std::uint64_t b);

// Colexicographic rank of a sorted size-m multiset over {0..alphabet-1}:
// sum_i C(a_i + i, i + 1) with 0-based i.
BigInt multiset_rank(const std::vector<std::uint64_t>& items, std::uint64_t alphabet);
std::vector<std::uint64_t> multiset_unrank(const BigInt& rank, std::uint64_t size,
                                           std::uint64_t alphabet);
// C(size + alphabet - 1, size).
BigInt multiset_count(std::uint64_t size, std::uint64_t alphabet);

// Uniform integer in [0, bound), bound > 0.
BigInt random_below(const BigInt& bound, Rng& rng);

}  // namespace ldb
