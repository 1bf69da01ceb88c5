#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "ldb/dataset.hpp"
#include "ldb/norms.hpp"
#include "ldb/query.hpp"

namespace ldb {

// Strict: every pair is more than claimed_separation apart.
// Inclusive: every pair is at least claimed_separation apart.
enum class SeparationRule { Strict, Inclusive };

struct PackingParams {
  std::uint64_t n = 0;
  std::uint64_t d = 1;
  double eps = 0.0;           // requested eps (delta for the range 1-norm family)
  double internal_eps = 0.0;  // eps-bar, or delta * 4^d, as used by the construction
  std::uint64_t k = 1;        // repetitions per selected grid point
  std::uint64_t multiset_size = 0;
  std::uint64_t grid_denominator = 0;  // 0 when the grid is not uniform
  std::uint64_t alphabet = 0;          // number of grid cells
};

struct PackingFamily {
  std::vector<Dataset> datasets;
  OpKind op = OpKind::Index;
  NormKind norm;
  double claimed_separation = 0.0;
  SeparationRule rule = SeparationRule::Strict;
  PackingParams params;
  std::vector<double> grid;      // per-coordinate grid values
  double log2_available = 0.0;   // log2 of the number of distinct members possible
};

PackingFamily packing_linf(OpKind op, std::uint64_t n, std::uint64_t d, double eps, std::uint64_t u,
                           std::size_t count, std::uint64_t seed);
PackingFamily packing_l1_index(std::uint64_t n, double eps, std::size_t count, std::uint64_t seed);
PackingFamily packing_l1_ce(std::uint64_t n, std::uint64_t d, double delta, std::size_t count,
                            std::uint64_t seed);
PackingFamily packing_mu_index(std::uint64_t n, double eps, const Cdf& cdf, std::size_t count,
                               std::uint64_t seed);
// Constant datasets with all n values equal to i/k, i = 0..k; pairwise inf
// distance n.
PackingFamily delta_family(std::uint64_t n, std::uint64_t k);

// Points p with cdf(p_i) = i/(cells) for i = 0..cells (left quantiles,
// bisection to 1e-12).
std::vector<double> quantile_grid(const Cdf& cdf, std::uint64_t cells);
void validate_cdf(const Cdf& cdf);

enum class CertMethod { Exact, WitnessQueries, MonteCarlo };
const char* to_string(CertMethod m);

struct SeparationCertificate {
  std::size_t pairs_checked = 0;
  double min_observed = std::numeric_limits<double>::infinity();
  CertMethod method = CertMethod::Exact;
  std::size_t samples = 0;     // MC samples per pair (MonteCarlo only)
  double confidence_z = 0.0;   // lower bound = mean - z * std_error
  bool pass = true;
};

// Lower bound on the family distance between two members, and how it was
// obtained.
struct SeparationEvidence {
  double lower = 0.0;
  double estimate = 0.0;
  CertMethod method = CertMethod::Exact;
};

SeparationEvidence family_distance(const PackingFamily& family, const Dataset& a, const Dataset& b,
                                   std::size_t samples, std::uint64_t seed);

// Inf-norm lower bound from point queries around every record of a or b on a
// grid of unit 1/u.
double witness_linf(OpKind op, const Dataset& a, const Dataset& b, std::uint64_t u);

SeparationCertificate certify(const PackingFamily& family, std::size_t pairs, std::size_t samples,
                              std::uint64_t seed);

using Encoder = std::function<std::uint64_t(const Dataset&)>;
using DatasetDecoder = std::function<Dataset(std::uint64_t)>;
using AnswerDecoder = std::function<double(std::uint64_t, const Query&)>;

struct PigeonholeWitness {
  std::size_t first = 0;
  std::size_t second = 0;
  std::uint64_t code = 0;
  double error_first = 0.0;
  double error_second = 0.0;
  double max_error = 0.0;
  bool exact = true;
  // max_error clears claimed_separation / 2 under the family's rule.
  bool exceeds_half = false;
};

// Requires |family| > 2^sigma; otherwise throws NoCollision.
PigeonholeWitness pigeonhole_witness(const PackingFamily& family, unsigned sigma,
                                     const Encoder& encoder, const DatasetDecoder& decoder,
                                     std::size_t samples = 100000, std::uint64_t seed = 0);
PigeonholeWitness pigeonhole_witness(const PackingFamily& family, unsigned sigma,
                                     const Encoder& encoder, const AnswerDecoder& decoder,
                                     const EvalConfig& cfg);

}  // namespace ldb
