#include "ldb/bounds.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "ldb/error.hpp"

namespace ldb {

const char* to_string(FormulaId id) {
  switch (id) {
    case FormulaId::InfLower: return "inf_lower";
    case FormulaId::IndexL1Lower: return "index_l1_lower";
    case FormulaId::RangeL1Lower: return "range_l1_lower";
    case FormulaId::IndexMuLower: return "index_mu_lower";
    case FormulaId::IndexUpper: return "index_upper";
    case FormulaId::CardEstUpper: return "ce_upper";
    case FormulaId::RangeSumUpper: return "rs_upper";
    case FormulaId::IndexMuUpper: return "index_mu_upper";
    case FormulaId::NoBound: return "no_bound";
    case FormulaId::NoFormula: return "no_formula";
  }
  return "?";
}

const char* to_string(Validity v) {
  switch (v) {
    case Validity::InRange: return "in_range";
    case Validity::OutOfRange: return "out_of_range";
    case Validity::NoBound: return "no_bound";
  }
  return "?";
}

const char* to_string(Side s) { return s == Side::Lower ? "lower" : "upper"; }

Side parse_side(const std::string& name) {
  if (name == "lower") return Side::Lower;
  if (name == "upper") return Side::Upper;
  throw Error(ErrorKind::InvalidArgs, "unknown side '" + name + "'");
}

const char* to_string(EpsStarFlag f) {
  switch (f) {
    case EpsStarFlag::Interior: return "interior";
    case EpsStarFlag::ClampedLow: return "clamped_low";
    case EpsStarFlag::ClampedHigh: return "clamped_high";
  }
  return "?";
}

namespace {

constexpr double kLn2 = std::numbers::ln2;

// log2(1 + 2^lx) without overflow.
double log2_1p_exp2(double lx) {
  if (lx > 0.0) return lx + std::log1p(std::exp2(-lx)) / kLn2;
  return std::log1p(std::exp2(lx)) / kLn2;
}

// log2(2^lt + c) for c > -2^lt.
double log2_exp2_plus(double lt, double c) {
  if (lt > 0.0) return lt + std::log1p(c * std::exp2(-lt)) / kLn2;
  return std::log2(std::exp2(lt) + c);
}

double inf_lower(double n, double d, double eps, double u) {
  const double m = 2.0 * eps + 1.0;
  const double lx = std::log2(m) + d * std::log2(u) - std::log2(n);
  return n / m * log2_1p_exp2(lx);
}

double index_l1_lower(double n, double eps) {
  const double rn = std::sqrt(n);
  return (rn - 2.0) * std::log1p(1.0 / (2.0 * eps) - 1.0 / rn) / kLn2;
}

double range_l1_lower(double n, double d, double eps) {
  const double rn = std::sqrt(n);
  const double lt = (d - 1.0) * 0.5 * std::log2(n) - 2.0 * d * (d + 1.0) - d * std::log2(eps);
  return (rn - 2.0) * log2_exp2_plus(lt, 1.0 - 1.0 / rn);
}

double index_upper(double n, double eps) {
  const double e = std::numbers::e;
  return n * std::log2(e + e / eps + e / n);
}

double cardest_upper(double n, double d, double eps) {
  const double e = std::numbers::e;
  const double lt = std::log2(e) + d + d * std::log2(d + 1.0) + (d - 1.0) * std::log2(n) -
                    d * std::log2(eps);
  return n * log2_exp2_plus(lt, e - e / n);
}

double rangesum_upper(double n, double d, double eps) {
  const double e = std::numbers::e;
  const double lt = std::log2(e) + (d + 1.0) * (std::log2(2.0 * (d + 2.0)) - std::log2(eps)) +
                    d * std::log2(n);
  return n * log2_exp2_plus(lt, e - e / n);
}

BoundResult out_of_range(FormulaId id, std::string reason) {
  BoundResult r;
  r.formula = id;
  r.validity = Validity::OutOfRange;
  r.reason = std::move(reason);
  return r;
}

BoundResult in_range(FormulaId id, double bits) {
  BoundResult r;
  r.formula = id;
  r.validity = Validity::InRange;
  r.bits = std::max(0.0, bits);
  return r;
}

std::optional<BoundResult> common_checks(const BoundRequest& req) {
  if (req.n < 1) return out_of_range(FormulaId::NoFormula, "n >= 1");
  if (req.d < 1) return out_of_range(FormulaId::NoFormula, "d >= 1");
  if (req.op == OpKind::Index && req.d != 1) {
    return out_of_range(FormulaId::NoFormula, "index operation requires d = 1");
  }
  if (!(req.eps > 0.0) || !std::isfinite(req.eps)) {
    return out_of_range(FormulaId::NoFormula, "eps > 0");
  }
  return std::nullopt;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

BoundResult lower_bound_bits(const BoundRequest& req) {
  if (auto bad = common_checks(req)) return *bad;
  const double n = static_cast<double>(req.n);
  const double d = static_cast<double>(req.d);
  const double rn = std::sqrt(n);

  if (req.norm == NormTag::LInf) {
    if (!req.u || *req.u < 1) return out_of_range(FormulaId::InfLower, "domain size u >= 1 required");
    if (!(req.eps >= 1.0 && req.eps < n / 2.0)) {
      return out_of_range(FormulaId::InfLower, "1 <= eps < n/2 = " + fmt(n / 2.0));
    }
    return in_range(FormulaId::InfLower, inf_lower(n, d, req.eps, static_cast<double>(*req.u)));
  }
  if (req.op == OpKind::Index) {
    const FormulaId id = req.norm == NormTag::Mu ? FormulaId::IndexMuLower : FormulaId::IndexL1Lower;
    if (req.eps > rn / 2.0) return out_of_range(id, "0 < eps <= sqrt(n)/2 = " + fmt(rn / 2.0));
    return in_range(id, index_l1_lower(n, req.eps));
  }
  if (req.norm == NormTag::Mu) {
    BoundResult r;
    r.formula = FormulaId::NoBound;
    r.validity = Validity::NoBound;
    r.reason = "some query distribution makes every pair of datasets indistinguishable";
    return r;
  }
  const double cap = rn / std::pow(4.0, d);
  if (req.eps > cap) return out_of_range(FormulaId::RangeL1Lower, "0 < eps <= sqrt(n)/4^d = " + fmt(cap));
  return in_range(FormulaId::RangeL1Lower, range_l1_lower(n, d, req.eps));
}

BoundResult upper_bound_bits(const BoundRequest& req) {
  if (auto bad = common_checks(req)) return *bad;
  const double n = static_cast<double>(req.n);
  const double d = static_cast<double>(req.d);
  if (req.norm == NormTag::LInf) {
    return out_of_range(FormulaId::NoFormula, "no finite upper bound in the inf norm");
  }
  if (req.norm == NormTag::Mu && req.op != OpKind::Index) {
    BoundResult r;
    r.formula = FormulaId::NoBound;
    r.validity = Validity::NoBound;
    r.reason = "mu-norm bounds exist only for the index operation";
    return r;
  }
  FormulaId id = FormulaId::IndexUpper;
  if (req.op == OpKind::Index && req.norm == NormTag::Mu) id = FormulaId::IndexMuUpper;
  if (req.op == OpKind::CardEst) id = FormulaId::CardEstUpper;
  if (req.op == OpKind::RangeSum) id = FormulaId::RangeSumUpper;
  if (req.eps > n) return out_of_range(id, "0 < eps <= n = " + fmt(n));
  switch (req.op) {
    case OpKind::Index: return in_range(id, index_upper(n, req.eps));
    case OpKind::CardEst: return in_range(id, cardest_upper(n, d, req.eps));
    case OpKind::RangeSum: return in_range(id, rangesum_upper(n, d, req.eps));
  }
  return out_of_range(FormulaId::NoFormula, "unknown operation");
}

BoundResult bound_bits(const BoundRequest& req) {
  return req.side == Side::Lower ? lower_bound_bits(req) : upper_bound_bits(req);
}

EpsStar eps_star(double sigma_bits, OpKind op, NormTag norm, std::uint64_t n, std::uint64_t d,
                 std::optional<std::uint64_t> u) {
  if (!(sigma_bits > 0.0) || !std::isfinite(sigma_bits)) {
    throw Error(ErrorKind::InvalidRequest, "bit budget must be positive and finite");
  }
  if (n < 1 || d < 1) throw Error(ErrorKind::InvalidRequest, "n and d must be at least 1");
  if (op == OpKind::Index && d != 1) throw Error(ErrorKind::InvalidRequest, "index operation requires d = 1");
  if (norm == NormTag::Mu && op != OpKind::Index) {
    throw Error(ErrorKind::InvalidRequest, "no mu-norm lower bound for range operations");
  }
  if (norm == NormTag::LInf && !u) throw Error(ErrorKind::InvalidRequest, "inf norm needs a domain size u");
  if (norm != NormTag::LInf && u) throw Error(ErrorKind::InvalidRequest, "domain size u applies only to the inf norm");

  const double nd = static_cast<double>(n);
  EpsStar out;
  if (norm == NormTag::LInf) {
    if (*u < 1) throw Error(ErrorKind::InvalidRequest, "domain size u must be at least 1");
    if (nd / 2.0 <= 1.0) throw Error(ErrorKind::InvalidRequest, "inf-norm bound needs n > 2");
    out.eps_min = 1.0;
    out.eps_max = nd / 2.0;
  } else if (op == OpKind::Index) {
    out.eps_min = kEpsStarFloor;
    out.eps_max = std::sqrt(nd) / 2.0;
  } else {
    out.eps_min = kEpsStarFloor;
    out.eps_max = std::sqrt(nd) / std::pow(4.0, static_cast<double>(d));
  }

  // The inf-norm interval is open at n/2; the formula itself is smooth there.
  auto g = [&](double eps) {
    const double dd = static_cast<double>(d);
    double bits;
    if (norm == NormTag::LInf) {
      out.formula = FormulaId::InfLower;
      bits = inf_lower(nd, dd, eps, static_cast<double>(*u));
    } else if (op == OpKind::Index) {
      out.formula = norm == NormTag::Mu ? FormulaId::IndexMuLower : FormulaId::IndexL1Lower;
      bits = index_l1_lower(nd, eps);
    } else {
      out.formula = FormulaId::RangeL1Lower;
      bits = range_l1_lower(nd, dd, eps);
    }
    return std::max(0.0, bits);
  };

  if (sigma_bits > g(out.eps_min)) {
    out.eps = out.eps_min;
    out.flag = EpsStarFlag::ClampedLow;
    return out;
  }
  if (sigma_bits <= g(out.eps_max)) {
    out.eps = out.eps_max;
    out.flag = EpsStarFlag::ClampedHigh;
    return out;
  }
  // Invariant: sigma <= g(lo), sigma > g(hi). Bisect geometrically.
  double lo = out.eps_min;
  double hi = out.eps_max;
  while (hi / lo - 1.0 > 1e-12) {
    const double mid = std::sqrt(lo * hi);
    if (mid <= lo || mid >= hi) break;
    if (sigma_bits <= g(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.eps = lo;
  out.flag = EpsStarFlag::Interior;
  return out;
}

std::uint64_t cover_denominator(std::uint64_t n, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw Error(ErrorKind::InvalidArgs, "eps must be positive");
  const double q = std::ceil(static_cast<double>(n) / eps);
  if (!(q < 0x1p62)) throw Error(ErrorKind::InvalidArgs, "grid denominator n/eps too large");
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(q));
}

namespace {

std::uint64_t columns(OpKind op, std::uint64_t d) {
  if (op == OpKind::Index) return 1;
  return op == OpKind::RangeSum ? d + 1 : d;
}

// log2 of the alphabet size, in long double for wide grids.
long double log2_alphabet(OpKind op, std::uint64_t d, std::uint64_t denominator) {
  return static_cast<long double>(columns(op, d)) *
         std::log2(static_cast<long double>(denominator) + 1.0L);
}

}  // namespace

std::uint64_t cover_alphabet(OpKind op, std::uint64_t d, std::uint64_t denominator) {
  if (log2_alphabet(op, d, denominator) > 62.0L) {
    throw Error(ErrorKind::InvalidArgs, "cover alphabet exceeds 2^62 cells");
  }
  std::uint64_t a = 1;
  for (std::uint64_t j = 0; j < columns(op, d); ++j) a *= denominator + 1;
  return a;
}

bool covering_count_is_exact(OpKind op, std::uint64_t n, std::uint64_t d,
                             std::uint64_t denominator) {
  return n <= 20000 && log2_alphabet(op, d, denominator) <= 62.0L;
}

BigInt covering_count(OpKind op, std::uint64_t n, std::uint64_t d, std::uint64_t denominator) {
  if (!covering_count_is_exact(op, n, d, denominator)) {
    throw Error(ErrorKind::InvalidArgs, "cover size too large to materialize");
  }
  return multiset_count(n, cover_alphabet(op, d, denominator));
}

double covering_count_log2_at(OpKind op, std::uint64_t n, std::uint64_t d,
                              std::uint64_t denominator) {
  if (covering_count_is_exact(op, n, d, denominator)) {
    return std::max(0.0, bigint_log2(covering_count(op, n, d, denominator)));
  }
  // sum_{i=1..n} log2(1 + (A - 1)/i) with A = (u'+1)^cols.
  const long double la = log2_alphabet(op, d, denominator);
  long double total = 0.0L;
  for (std::uint64_t i = 1; i <= n; ++i) {
    const long double li = std::log2(static_cast<long double>(i));
    // log2(1 + (A-1)/i) = log2(i + A - 1) - log2(i); A - 1 ~ A here.
    const long double hi = std::max(la, li);
    const long double lo = std::min(la, li);
    total += hi + std::log1p(std::exp2(lo - hi)) / std::numbers::ln2_v<long double> - li;
  }
  return static_cast<double>(total);
}

double covering_count_log2(OpKind op, std::uint64_t n, std::uint64_t d, double eps) {
  if (n < 1 || d < 1) throw Error(ErrorKind::InvalidArgs, "n and d must be at least 1");
  return covering_count_log2_at(op, n, d, cover_denominator(n, eps));
}

}  // namespace ldb
