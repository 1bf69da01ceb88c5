#include "ldb/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ldb/error.hpp"

namespace ldb {

BigInt binomial(std::uint64_t a, std::uint64_t b) {
  if (b > a) return 0;
  b = std::min(b, a - b);
  BigInt c = 1;
  for (std::uint64_t i = 1; i <= b; ++i) {
    c *= a - b + i;
    c /= i;
  }
  return c;
}

std::uint64_t bit_length(const BigInt& x) {
  if (x <= 0) return 0;
  return boost::multiprecision::msb(x) + 1;
}

double bigint_log2(const BigInt& x) {
  if (x <= 0) return -std::numeric_limits<double>::infinity();
  const std::uint64_t top = boost::multiprecision::msb(x);
  const bool power_of_two = boost::multiprecision::lsb(x) == top;
  if (power_of_two) return static_cast<double>(top);
  double result;
  if (top < 64) {
    result = std::log2(static_cast<double>(x.convert_to<std::uint64_t>()));
  } else {
    const auto head = static_cast<std::uint64_t>(x >> (top - 63));
    result = std::log2(static_cast<double>(head)) + static_cast<double>(top - 63);
  }
  // Keep the rounded value strictly inside (top, top + 1).
  const auto lo = static_cast<double>(top);
  const double hi = lo + 1.0;
  if (result <= lo) result = std::nextafter(lo, hi);
  if (result >= hi) result = std::nextafter(hi, lo);
  return result;
}

double log2_binomial_lgamma(std::uint64_t a, std::uint64_t b) {
  if (b > a) throw Error(ErrorKind::InvalidArgs, "log2_binomial needs b <= a");
  const long double la = static_cast<long double>(a);
  const long double lb = static_cast<long double>(b);
  const long double nats = std::lgamma(la + 1) - std::lgamma(lb + 1) - std::lgamma(la - lb + 1);
  return static_cast<double>(nats / std::numbers::ln2_v<long double>);
}

double log2_binomial_sum(double a, std::uint64_t b) {
  if (static_cast<double>(b) > a) throw Error(ErrorKind::InvalidArgs, "log2_binomial needs b <= a");
  long double total = 0.0L;
  const long double base = static_cast<long double>(a) - static_cast<long double>(b);
  for (std::uint64_t i = 1; i <= b; ++i) {
    total += std::log1p(base / static_cast<long double>(i));
  }
  return static_cast<double>(total / std::numbers::ln2_v<long double>);
}

double log2_binomial(std::uint64_t a, std::uint64_t b) {
  if (b > a) throw Error(ErrorKind::InvalidArgs, "log2_binomial needs b <= a");
  if (a <= 10000) return std::max(0.0, bigint_log2(binomial(a, b)));
  return log2_binomial_lgamma(a, b);
}

BigInt multiset_count(std::uint64_t size, std::uint64_t alphabet) {
  if (alphabet == 0) return size == 0 ? 1 : 0;
  return binomial(size + alphabet - 1, size);
}

BigInt multiset_rank(const std::vector<std::uint64_t>& items, std::uint64_t alphabet) {
  BigInt r = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i] >= alphabet) throw Error(ErrorKind::InvalidArgs, "multiset item outside alphabet");
    if (i > 0 && items[i] < items[i - 1]) throw Error(ErrorKind::InvalidArgs, "multiset items not sorted");
    r += binomial(items[i] + i, i + 1);
  }
  return r;
}

namespace {

// log2 C(b, j) for b >= j in double precision, O(j).
double approx_log2_binomial(std::uint64_t b, std::uint64_t j) {
  double s = 0.0;
  for (std::uint64_t t = 0; t < j; ++t) {
    s += std::log2(static_cast<double>(b - t)) - std::log2(static_cast<double>(t + 1));
  }
  return s;
}

}  // namespace

std::vector<std::uint64_t> multiset_unrank(const BigInt& rank, std::uint64_t size,
                                           std::uint64_t alphabet) {
  if (rank < 0 || rank >= multiset_count(size, alphabet)) {
    throw Error(ErrorKind::InvalidRank, "rank outside the multiset enumeration");
  }
  std::vector<std::uint64_t> items(size);
  BigInt rest = rank;
  for (std::uint64_t pos = size; pos-- > 0;) {
    const std::uint64_t j = pos + 1;
    // Largest b in [pos, pos + alphabet - 1] with C(b, j) <= rest.
    std::uint64_t b = pos;
    if (rest > 0) {
      const double target = bigint_log2(rest);
      std::uint64_t lo = pos;
      std::uint64_t hi = pos + alphabet - 1;
      while (lo < hi) {
        const std::uint64_t mid = lo + (hi - lo + 1) / 2;
        if (approx_log2_binomial(mid, j) <= target) {
          lo = mid;
        } else {
          hi = mid - 1;
        }
      }
      b = lo;
      BigInt c = binomial(b, j);
      while (b > pos && c > rest) {
        // C(b-1, j) = C(b, j) * (b - j) / b
        c = c * (b - j) / b;
        --b;
      }
      for (;;) {
        if (b + 1 > pos + alphabet - 1) break;
        const BigInt next = b + 1 == j ? BigInt(1) : BigInt(c * (b + 1) / (b + 1 - j));
        if (next > rest) break;
        c = next;
        ++b;
      }
      rest -= c;
    }
    items[pos] = b - pos;
  }
  return items;
}

BigInt random_below(const BigInt& bound, Rng& rng) {
  if (bound <= 0) throw Error(ErrorKind::InvalidArgs, "random_below needs a positive bound");
  const std::uint64_t bits = bit_length(bound - 1);
  if (bits == 0) return 0;
  for (;;) {
    BigInt x = 0;
    std::uint64_t filled = 0;
    while (filled < bits) {
      x = (x << 64) | BigInt(rng.next_u64());
      filled += 64;
    }
    x >>= filled - bits;
    if (x < bound) return x;
  }
}

}  // namespace ldb
