#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ldb/combinatorics.hpp"
#include "ldb/norms.hpp"
#include "ldb/query.hpp"

namespace ldb {

enum class Side { Lower, Upper };

enum class FormulaId {
  InfLower,        // n/(2e+1) log2(1 + (2e+1) u^d / n)
  IndexL1Lower,    // (sqrt n - 2) log2(1 + 1/(2e) - 1/sqrt n)
  RangeL1Lower,    // (sqrt n - 2) log2(1 + sqrt n^(d-1) / (4^(d(d+1)) e^d) - 1/sqrt n)
  IndexMuLower,    // same expression as IndexL1Lower
  IndexUpper,      // n log2(e + e/eps + e/n)
  CardEstUpper,    // n log2(e 2^d (d+1)^d n^(d-1) / eps^d + e - e/n)
  RangeSumUpper,   // n log2(e (2(d+2)/eps)^(d+1) n^d + e - e/n)
  IndexMuUpper,    // same expression as IndexUpper
  NoBound,         // mu norm for range operations: no data-dependent bound exists
  NoFormula,       // request outside every formula (e.g. upper bound in the inf norm)
};

enum class Validity { InRange, OutOfRange, NoBound };

const char* to_string(FormulaId id);
const char* to_string(Validity v);
const char* to_string(Side s);
Side parse_side(const std::string& name);

struct BoundRequest {
  OpKind op = OpKind::Index;
  NormTag norm = NormTag::L1;
  Side side = Side::Lower;
  std::uint64_t n = 1;
  std::uint64_t d = 1;
  double eps = 1.0;
  std::optional<std::uint64_t> u;  // domain size, inf norm only
};

struct BoundResult {
  double bits = 0.0;  // clamped at 0; 0 unless InRange
  FormulaId formula = FormulaId::NoFormula;
  Validity validity = Validity::OutOfRange;
  std::string reason;  // violated condition when not InRange
};

BoundResult lower_bound_bits(const BoundRequest& req);
BoundResult upper_bound_bits(const BoundRequest& req);
BoundResult bound_bits(const BoundRequest& req);

enum class EpsStarFlag { Interior, ClampedLow, ClampedHigh };
const char* to_string(EpsStarFlag f);

struct EpsStar {
  double eps = 0.0;
  EpsStarFlag flag = EpsStarFlag::Interior;
  FormulaId formula = FormulaId::NoFormula;
  double eps_min = 0.0;
  double eps_max = 0.0;
};

inline constexpr double kEpsStarFloor = 1e-9;

// Largest eps in the validity interval of the matching lower bound with
// sigma_bits <= lower bound(eps).
EpsStar eps_star(double sigma_bits, OpKind op, NormTag norm, std::uint64_t n, std::uint64_t d,
                 std::optional<std::uint64_t> u = std::nullopt);

// ceil(n / eps) as the cover grid denominator.
std::uint64_t cover_denominator(std::uint64_t n, double eps);
// Number of distinct grid cells a record can occupy: (u'+1)^cols.
std::uint64_t cover_alphabet(OpKind op, std::uint64_t d, std::uint64_t denominator);
// Exact cover size C(alphabet + n - 1, n); throws InvalidArgs if too large
// to materialize.
BigInt covering_count(OpKind op, std::uint64_t n, std::uint64_t d, std::uint64_t denominator);
double covering_count_log2(OpKind op, std::uint64_t n, std::uint64_t d, double eps);
double covering_count_log2_at(OpKind op, std::uint64_t n, std::uint64_t d,
                              std::uint64_t denominator);
bool covering_count_is_exact(OpKind op, std::uint64_t n, std::uint64_t d,
                             std::uint64_t denominator);

}  // namespace ldb
