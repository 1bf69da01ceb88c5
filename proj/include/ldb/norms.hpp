#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "ldb/dataset.hpp"
#include "ldb/query.hpp"

namespace ldb {

enum class NormTag { L1, LInf, Mu };

const char* to_string(NormTag tag);
NormTag parse_norm(const std::string& name);

// Continuous CDF of a query measure on [0,1] with cdf(0) = 0, cdf(1) = 1.
using Cdf = std::function<double(double)>;

struct NormKind {
  NormTag tag = NormTag::L1;
  Cdf cdf;  // set only for Mu

  static NormKind l1() { return {NormTag::L1, {}}; }
  static NormKind linf() { return {NormTag::LInf, {}}; }
  static NormKind mu(Cdf cdf) { return {NormTag::Mu, std::move(cdf)}; }
};

struct DistanceEstimate {
  double value = 0.0;
  bool exact = true;
  double std_error = 0.0;
  std::size_t samples = 0;
};

// Rank-function distances; both datasets sorted, 1-d, equal size.
double rank_l1(const Dataset& a, const Dataset& b);
double rank_l1_oracle(const Dataset& a, const Dataset& b);
double rank_linf(const Dataset& a, const Dataset& b);
double rank_mu(const Dataset& a, const Dataset& b, const Cdf& cdf);

// Exact distances between 1-d range functions over the uniform query domain.
// Sizes may differ. card1d_* take 1-column datasets, sum1d_* take 2-column
// datasets (key, value).
double card1d_l1(const Dataset& a, const Dataset& b);
double card1d_linf(const Dataset& a, const Dataset& b);
double sum1d_l1(const Dataset& a, const Dataset& b);
double sum1d_linf(const Dataset& a, const Dataset& b);

DistanceEstimate mc_l1(OpKind op, const Dataset& a, const Dataset& b, std::size_t samples,
                       std::uint64_t seed);

using QuerySampler = std::function<Query(Rng&)>;

DistanceEstimate mc_mu(OpKind op, const Dataset& a, const Dataset& b, const QuerySampler& sampler,
                       std::size_t samples, std::uint64_t seed);

// Exact distance when a closed form exists for (op, norm, dims); nullopt
// otherwise.
std::optional<double> exact_distance(OpKind op, const NormKind& norm, const Dataset& a,
                                     const Dataset& b);

using Predictor = std::function<double(const Query&)>;

struct EvalConfig {
  std::size_t samples = 10000;
  std::size_t grid = 4;  // probes per inter-breakpoint segment (rank, LInf)
  std::uint64_t seed = 0;
  QuerySampler mu_sampler;  // required for Mu
};

inline constexpr double kLeftLimitProbe = 1e-12;

DistanceEstimate model_error(const Dataset& data, OpKind op, const Predictor& model,
                             const NormKind& norm, const EvalConfig& cfg);

// Running mean with Neumaier-compensated sum and Welford variance.
class MeanAccumulator {
 public:
  void add(double x);
  std::size_t count() const noexcept { return count_; }
  double mean() const;
  double std_error() const;

 private:
  std::size_t count_ = 0;
  double sum_ = 0.0;
  double comp_ = 0.0;
  double w_mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace ldb
