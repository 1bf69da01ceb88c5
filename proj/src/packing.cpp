#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "ldb/combinatorics.hpp"
#include "ldb/constructions.hpp"
#include "ldb/error.hpp"
#include "ldb/parallel.hpp"

namespace ldb {

const char* to_string(CertMethod m) {
  switch (m) {
    case CertMethod::Exact: return "exact";
    case CertMethod::WitnessQueries: return "witness_queries";
    case CertMethod::MonteCarlo: return "monte_carlo";
  }
  return "?";
}

namespace {

// `count` distinct ranks in [0, total), uniformly without replacement.
std::vector<BigInt> sample_distinct_ranks(const BigInt& total, std::size_t count, Rng& rng) {
  if (BigInt(count) > total) {
    throw Error(ErrorKind::FamilyTooLarge,
                "requested " + std::to_string(count) + " members but only " + total.str() +
                    " distinct multisets exist");
  }
  std::vector<BigInt> out;
  out.reserve(count);
  if (total <= BigInt(4) * count) {
    const auto m = total.convert_to<std::uint64_t>();
    std::vector<std::uint64_t> all(m);
    std::iota(all.begin(), all.end(), std::uint64_t{0});
    for (std::size_t i = 0; i < count; ++i) {
      std::swap(all[i], all[i + rng.below(m - i)]);
      out.emplace_back(all[i]);
    }
    return out;
  }
  std::set<BigInt> seen;
  while (out.size() < count) {
    BigInt r = random_below(total, rng);
    if (seen.insert(r).second) out.push_back(std::move(r));
  }
  return out;
}

// Mixed-radix decoding of a cell id, first coordinate most significant.
void cell_coordinates(std::uint64_t cell, std::uint64_t base, std::uint64_t d,
                      std::vector<std::uint64_t>& coords) {
  coords.assign(d, 0);
  for (std::uint64_t j = d; j-- > 0;) {
    coords[j] = cell % base;
    cell /= base;
  }
}

struct Layout {
  std::uint64_t n;
  std::uint64_t d;          // grid dimensions
  std::uint64_t k;          // repetitions
  bool value_column;        // append a constant 1.0 attribute (range-sum)
  std::vector<double> grid; // per-coordinate values
};

std::uint64_t alphabet_size(std::uint64_t base, std::uint64_t d) {
  if (static_cast<double>(d) * std::log2(static_cast<double>(base)) > 62.0) {
    throw Error(ErrorKind::InvalidParams, "grid has more than 2^62 cells");
  }
  std::uint64_t a = 1;
  for (std::uint64_t j = 0; j < d; ++j) a *= base;
  return a;
}

Dataset build_member(const std::vector<std::uint64_t>& cells, const Layout& lay) {
  const std::size_t cols = lay.d + (lay.value_column ? 1 : 0);
  std::vector<double> values;
  values.reserve(lay.n * cols);
  std::vector<std::uint64_t> coords;
  for (std::uint64_t cell : cells) {
    cell_coordinates(cell, lay.grid.size(), lay.d, coords);
    for (std::uint64_t rep = 0; rep < lay.k; ++rep) {
      for (std::uint64_t c : coords) values.push_back(lay.grid[c]);
      if (lay.value_column) values.push_back(1.0);
    }
  }
  const std::size_t used = cells.size() * lay.k;
  for (std::size_t i = used; i < lay.n; ++i) {
    for (std::size_t j = 0; j < cols; ++j) values.push_back(1.0);
  }
  return Dataset(lay.n, cols, std::move(values));
}

void fill_family(PackingFamily& fam, const Layout& lay, std::size_t count, std::uint64_t seed) {
  const std::uint64_t alphabet = alphabet_size(lay.grid.size(), lay.d);
  const std::uint64_t m = fam.params.multiset_size;
  const BigInt total = multiset_count(m, alphabet);
  fam.params.alphabet = alphabet;
  fam.log2_available = std::max(0.0, bigint_log2(total));
  fam.grid = lay.grid;
  Rng rng(seed);
  for (const BigInt& r : sample_distinct_ranks(total, count, rng)) {
    fam.datasets.push_back(build_member(multiset_unrank(r, m, alphabet), lay));
  }
}

std::vector<double> uniform_grid(std::uint64_t points, std::uint64_t denominator) {
  std::vector<double> g(points);
  for (std::uint64_t i = 0; i < points; ++i) g[i] = grid_value(i, denominator);
  return g;
}

void require_count(std::size_t count) {
  if (count < 1) throw Error(ErrorKind::InvalidParams, "family needs at least one member");
}

}  // namespace

PackingFamily packing_linf(OpKind op, std::uint64_t n, std::uint64_t d, double eps, std::uint64_t u,
                           std::size_t count, std::uint64_t seed) {
  require_count(count);
  if (op == OpKind::Index && d != 1) throw Error(ErrorKind::InvalidParams, "index family needs d = 1");
  if (d < 1 || u < 1) throw Error(ErrorKind::InvalidParams, "d and u must be at least 1");
  if (!(eps >= 1.0 && eps < static_cast<double>(n) / 2.0)) {
    throw Error(ErrorKind::InvalidParams, "packing needs 1 <= eps < n/2");
  }
  const auto eps_bar = static_cast<std::uint64_t>(std::floor(eps)) + 1;
  PackingFamily fam;
  fam.op = op;
  fam.norm = NormKind::linf();
  fam.claimed_separation = static_cast<double>(eps_bar);
  fam.rule = SeparationRule::Inclusive;
  fam.params = {n, d, eps, static_cast<double>(eps_bar), eps_bar, n / eps_bar, u, 0};
  Layout lay{n, d, eps_bar, op == OpKind::RangeSum, uniform_grid(u + 1, u)};
  fill_family(fam, lay, count, seed);
  return fam;
}

PackingFamily packing_l1_index(std::uint64_t n, double eps, std::size_t count, std::uint64_t seed) {
  require_count(count);
  const double rn = std::sqrt(static_cast<double>(n));
  if (!(eps > 0.0 && eps <= rn / 2.0)) throw Error(ErrorKind::InvalidParams, "packing needs 0 < eps <= sqrt(n)/2");
  const auto k = static_cast<std::uint64_t>(std::ceil(rn));
  const auto points = static_cast<std::uint64_t>(std::ceil(static_cast<double>(k) / eps));
  if (points < 2) throw Error(ErrorKind::InvalidParams, "grid collapsed to a single point");
  PackingFamily fam;
  fam.op = OpKind::Index;
  fam.norm = NormKind::l1();
  fam.claimed_separation = eps;
  fam.rule = SeparationRule::Strict;
  fam.params = {n, 1, eps, eps, k, n / k, points - 1, 0};
  Layout lay{n, 1, k, false, uniform_grid(points, points - 1)};
  fill_family(fam, lay, count, seed);
  return fam;
}

PackingFamily packing_l1_ce(std::uint64_t n, std::uint64_t d, double delta, std::size_t count,
                            std::uint64_t seed) {
  require_count(count);
  if (d < 1) throw Error(ErrorKind::InvalidParams, "d must be at least 1");
  const double eps = delta * std::pow(4.0, static_cast<double>(d));
  const double rn = std::sqrt(static_cast<double>(n));
  if (!(eps > 0.0 && eps <= rn)) throw Error(ErrorKind::InvalidParams, "packing needs 0 < delta * 4^d <= sqrt(n)");
  const auto k = static_cast<std::uint64_t>(std::ceil(rn)) + 1;
  const double half_real = std::ceil(static_cast<double>(k) / (2.0 * eps)) - 1.0;
  if (half_real < 1.0) {
    throw Error(ErrorKind::InvalidParams,
                "grid unit u = 2 * (ceil(k / (2 eps)) - 1) is below 2; choose a smaller delta");
  }
  const auto half = static_cast<std::uint64_t>(half_real);
  const std::uint64_t u = 2 * half;
  PackingFamily fam;
  fam.op = OpKind::CardEst;
  fam.norm = NormKind::l1();
  fam.claimed_separation = delta;
  fam.rule = SeparationRule::Strict;
  fam.params = {n, d, delta, eps, k, n / k, u, 0};
  Layout lay{n, d, k, false, uniform_grid(half + 1, u)};
  fill_family(fam, lay, count, seed);
  return fam;
}

void validate_cdf(const Cdf& cdf) {
  if (!cdf) throw Error(ErrorKind::CdfNotMonotone, "missing CDF");
  constexpr int kProbes = 1024;
  double prev = cdf(0.0);
  if (!(std::abs(prev) <= 1e-12)) throw Error(ErrorKind::CdfNotMonotone, "cdf(0) must be 0");
  for (int i = 1; i <= kProbes; ++i) {
    const double v = cdf(static_cast<double>(i) / kProbes);
    if (!(v >= prev) || v > 1.0 + 1e-12) throw Error(ErrorKind::CdfNotMonotone, "cdf decreases or exceeds 1");
    prev = v;
  }
  if (!(std::abs(prev - 1.0) <= 1e-12)) throw Error(ErrorKind::CdfNotMonotone, "cdf(1) must be 1");
}

std::vector<double> quantile_grid(const Cdf& cdf, std::uint64_t cells) {
  validate_cdf(cdf);
  if (cells < 1) throw Error(ErrorKind::InvalidParams, "quantile grid needs at least one cell");
  std::vector<double> grid(cells + 1);
  grid[0] = 0.0;
  for (std::uint64_t i = 1; i <= cells; ++i) {
    const double target = static_cast<double>(i) / static_cast<double>(cells);
    double lo = grid[i - 1];
    double hi = 1.0;
    while (hi - lo > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      if (cdf(mid) >= target) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    grid[i] = i == cells ? std::max(hi, grid[i - 1]) : hi;
  }
  grid[cells] = 1.0;
  return grid;
}

PackingFamily packing_mu_index(std::uint64_t n, double eps, const Cdf& cdf, std::size_t count,
                               std::uint64_t seed) {
  require_count(count);
  const double rn = std::sqrt(static_cast<double>(n));
  if (!(eps > 0.0 && eps <= rn / 2.0)) throw Error(ErrorKind::InvalidParams, "packing needs 0 < eps <= sqrt(n)/2");
  const auto k = static_cast<std::uint64_t>(std::ceil(rn));
  const auto points = static_cast<std::uint64_t>(std::ceil(static_cast<double>(k) / eps));
  if (points < 2) throw Error(ErrorKind::InvalidParams, "grid collapsed to a single point");
  PackingFamily fam;
  fam.op = OpKind::Index;
  fam.norm = NormKind::mu(cdf);
  fam.claimed_separation = eps;
  fam.rule = SeparationRule::Strict;
  fam.params = {n, 1, eps, eps, k, n / k, 0, 0};
  Layout lay{n, 1, k, false, quantile_grid(cdf, points - 1)};
  fill_family(fam, lay, count, seed);
  return fam;
}

PackingFamily delta_family(std::uint64_t n, std::uint64_t k) {
  if (n < 1 || k < 1) throw Error(ErrorKind::InvalidParams, "n and k must be at least 1");
  PackingFamily fam;
  fam.op = OpKind::Index;
  fam.norm = NormKind::linf();
  fam.claimed_separation = static_cast<double>(n);
  fam.rule = SeparationRule::Inclusive;
  fam.params = {n, 1, static_cast<double>(n), static_cast<double>(n), n, 1, k, k + 1};
  fam.grid = uniform_grid(k + 1, k);
  for (double v : fam.grid) fam.datasets.emplace_back(n, 1, std::vector<double>(n, v));
  fam.log2_available = std::log2(static_cast<double>(k + 1));
  return fam;
}

double witness_linf(OpKind op, const Dataset& a, const Dataset& b, std::uint64_t u) {
  if (op == OpKind::Index) return rank_linf(a, b);
  if (u < 1) throw Error(ErrorKind::InvalidParams, "witness queries need a grid unit");
  const std::size_t cols = a.size() ? a.dims() : b.dims();
  const std::size_t d = predicate_dims(op, cols);
  std::set<std::vector<double>> points;
  for (const Dataset* data : {&a, &b}) {
    for (std::size_t i = 0; i < data->size(); ++i) {
      const auto row = data->row(i);
      points.emplace(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(d));
    }
  }
  const double half = 0.5 / static_cast<double>(u);
  const double width = 1.0 / static_cast<double>(u);
  double best = 0.0;
  for (const auto& p : points) {
    RangeQuery q;
    q.c.resize(d);
    q.r.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
      q.c[j] = p[j] - half;
      q.r[j] = std::min(width, 1.0 - q.c[j]);
    }
    best = std::max(best, std::abs(evaluate(op, a, q) - evaluate(op, b, q)));
  }
  return best;
}

SeparationEvidence family_distance(const PackingFamily& family, const Dataset& a, const Dataset& b,
                                   std::size_t samples, std::uint64_t seed) {
  if (auto exact = exact_distance(family.op, family.norm, a, b)) {
    return {*exact, *exact, CertMethod::Exact};
  }
  if (family.norm.tag == NormTag::LInf) {
    const double w = witness_linf(family.op, a, b, family.params.grid_denominator);
    return {w, w, CertMethod::WitnessQueries};
  }
  if (family.norm.tag == NormTag::L1) {
    const auto est = mc_l1(family.op, a, b, samples, seed);
    return {est.value - 3.0 * est.std_error, est.value, CertMethod::MonteCarlo};
  }
  throw Error(ErrorKind::InvalidParams, "no distance method for a mu-norm range family");
}

SeparationCertificate certify(const PackingFamily& family, std::size_t pairs, std::size_t samples,
                              std::uint64_t seed) {
  SeparationCertificate cert;
  const std::uint64_t f = family.datasets.size();
  if (f < 2 || pairs == 0) return cert;

  const std::uint64_t total = f * (f - 1) / 2;
  std::vector<std::uint64_t> chosen;
  if (pairs >= total) {
    chosen.resize(total);
    std::iota(chosen.begin(), chosen.end(), std::uint64_t{0});
  } else {
    Rng rng(derive_seed(seed, 0x5041495253ULL));
    std::set<std::uint64_t> picked;
    while (picked.size() < pairs) picked.insert(rng.below(total));
    chosen.assign(picked.begin(), picked.end());
  }
  // Pair index t enumerates (i, j), i < j, row by row.
  auto decode_pair = [f](std::uint64_t t) {
    std::uint64_t i = 0;
    while (t >= f - 1 - i) {
      t -= f - 1 - i;
      ++i;
    }
    return std::pair<std::uint64_t, std::uint64_t>{i, i + 1 + t};
  };

  std::vector<SeparationEvidence> evidence(chosen.size());
  parallel_for(chosen.size(), [&](std::size_t s) {
    const auto [i, j] = decode_pair(chosen[s]);
    evidence[s] = family_distance(family, family.datasets[i], family.datasets[j], samples,
                                  derive_seed(seed, chosen[s]));
  });

  cert.pairs_checked = evidence.size();
  for (const auto& e : evidence) {
    cert.min_observed = std::min(cert.min_observed, e.lower);
    if (e.method == CertMethod::MonteCarlo) {
      cert.method = CertMethod::MonteCarlo;
      cert.samples = samples;
      cert.confidence_z = 3.0;
    } else if (e.method == CertMethod::WitnessQueries && cert.method == CertMethod::Exact) {
      cert.method = CertMethod::WitnessQueries;
    }
  }
  cert.pass = family.rule == SeparationRule::Strict ? cert.min_observed > family.claimed_separation
                                                    : cert.min_observed >= family.claimed_separation;
  return cert;
}

}  // namespace ldb
