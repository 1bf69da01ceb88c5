#include "ldb/norms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "ldb/error.hpp"

namespace ldb {

const char* to_string(NormTag tag) {
  switch (tag) {
    case NormTag::L1: return "l1";
    case NormTag::LInf: return "inf";
    case NormTag::Mu: return "mu";
  }
  return "?";
}

NormTag parse_norm(const std::string& name) {
  if (name == "l1") return NormTag::L1;
  if (name == "inf" || name == "linf") return NormTag::LInf;
  if (name == "mu") return NormTag::Mu;
  throw Error(ErrorKind::InvalidArgs, "unknown norm '" + name + "'");
}

void MeanAccumulator::add(double x) {
  ++count_;
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
  const double delta = x - w_mean_;
  w_mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (x - w_mean_);
}

double MeanAccumulator::mean() const {
  return count_ ? (sum_ + comp_) / static_cast<double>(count_) : 0.0;
}

double MeanAccumulator::std_error() const {
  if (count_ < 2) return 0.0;
  const double var = std::max(0.0, m2_ / static_cast<double>(count_ - 1));
  return std::sqrt(var / static_cast<double>(count_));
}

namespace {

void check_rank_pair(const Dataset& a, const Dataset& b) {
  if (a.dims() != 1 || b.dims() != 1) {
    throw Error(ErrorKind::NotOneDimensional, "rank distances need 1-d datasets");
  }
  if (a.size() != b.size()) throw Error(ErrorKind::SizeMismatch, "rank distances need equal n");
  if (!a.is_sorted() || !b.is_sorted()) {
    throw Error(ErrorKind::NotSorted, "rank distances need sorted datasets");
  }
}

double neumaier_sum(const std::vector<double>& terms) {
  double sum = 0.0;
  double comp = 0.0;
  for (double x : terms) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

// g(x) = weight of records with key <= x in `a` minus the same in `b`,
// tabulated on the merged breakpoints x_0 = 0 < ... < x_J = 1.
struct StepDifference {
  std::vector<double> x;
  std::vector<double> g;
};

StepDifference step_difference(const Dataset& a, const Dataset& b, bool weighted) {
  const std::size_t want = weighted ? 2 : 1;
  if ((a.size() && a.dims() != want) || (b.size() && b.dims() != want)) {
    throw Error(ErrorKind::DimensionMismatch,
                weighted ? "1-d range-sum distances need 2-column datasets"
                         : "1-d cardinality distances need 1-d datasets");
  }
  std::map<double, double> delta{{0.0, 0.0}, {1.0, 0.0}};
  for (std::size_t i = 0; i < a.size(); ++i) delta[a.at(i, 0)] += weighted ? a.at(i, 1) : 1.0;
  for (std::size_t i = 0; i < b.size(); ++i) delta[b.at(i, 0)] -= weighted ? b.at(i, 1) : 1.0;
  StepDifference s;
  double acc = 0.0;
  for (const auto& [x, w] : delta) {
    acc += w;
    s.x.push_back(x);
    s.g.push_back(acc);
  }
  return s;
}

// Integral of |g(a) - g(b-)| over a in [0,1], b in [a-1, a]. On the cell
// a in A_j = [x_j, x_{j+1}], b in (x_l, x_{l+1}] the integrand is
// |G_j - G_l|: full rectangles for l < j, the diagonal triangle for l = j
// (value 0), and b in [a-1, 0] contributes |G_j| * integral of (1 - a).
double step_l1(const StepDifference& s) {
  const std::size_t cells = s.x.size() - 1;
  std::vector<double> terms;
  terms.reserve(cells * (cells + 1) / 2 + cells);
  for (std::size_t j = 0; j < cells; ++j) {
    const double len_j = s.x[j + 1] - s.x[j];
    if (len_j == 0.0) continue;
    const double below_zero = len_j * (1.0 - 0.5 * (s.x[j] + s.x[j + 1]));
    terms.push_back(std::abs(s.g[j]) * below_zero);
    for (std::size_t l = 0; l < j; ++l) {
      const double diff = std::abs(s.g[j] - s.g[l]);
      if (diff != 0.0) terms.push_back(diff * len_j * (s.x[l + 1] - s.x[l]));
    }
  }
  return neumaier_sum(terms);
}

// Every value in {0, G_0..G_J} is reachable as g(a) or g(b-) for a compatible
// pair, so the sup is the spread of that set.
double step_linf(const StepDifference& s) {
  double lo = 0.0;
  double hi = 0.0;
  for (double v : s.g) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo;
}

// Records of `a` with weight +w and of `b` with -w, identical records merged
// and cancelled. The difference of the two query functions is then a sum over
// this (usually much smaller) set.
class SignedPoints {
 public:
  SignedPoints(OpKind op, const Dataset& a, const Dataset& b) : op_(op) {
    const std::size_t cols = a.size() ? a.dims() : b.dims();
    if ((a.size() && a.dims() != cols) || (b.size() && b.dims() != cols)) {
      throw Error(ErrorKind::DimensionMismatch, "datasets have different dimensions");
    }
    if (op == OpKind::Index && cols != 1) {
      throw Error(ErrorKind::NotOneDimensional, "rank distances need 1-d datasets");
    }
    if (op == OpKind::RangeSum && cols < 2) {
      throw Error(ErrorKind::DimensionMismatch, "range-sum needs d + 1 attributes");
    }
    dims_ = predicate_dims(op, cols);
    std::map<std::vector<double>, double> merged;
    auto add = [&](const Dataset& data, double sign) {
      for (std::size_t i = 0; i < data.size(); ++i) {
        const auto row = data.row(i);
        const double w = op == OpKind::RangeSum ? row[cols - 1] : 1.0;
        merged[std::vector<double>(row.begin(), row.end())] += sign * w;
      }
    };
    add(a, 1.0);
    add(b, -1.0);
    std::vector<std::pair<std::vector<double>, double>> kept;
    for (auto& [row, w] : merged) {
      if (w != 0.0) kept.emplace_back(row, w);
    }
    if (dims_ == 1) {
      std::sort(kept.begin(), kept.end(),
                [](const auto& x, const auto& y) { return x.first[0] < y.first[0]; });
      prefix_.push_back(0.0);
      for (const auto& [row, w] : kept) {
        keys_.push_back(row[0]);
        prefix_.push_back(prefix_.back() + w);
      }
    } else {
      for (const auto& [row, w] : kept) {
        coords_.insert(coords_.end(), row.begin(), row.begin() + static_cast<std::ptrdiff_t>(dims_));
        weights_.push_back(w);
      }
    }
  }

  bool empty() const { return keys_.empty() && weights_.empty(); }
  std::size_t dims() const { return dims_; }

  double operator()(const Query& query) const {
    if (op_ == OpKind::Index) {
      const double q = std::get<RankQuery>(query).q;
      const auto hi = std::upper_bound(keys_.begin(), keys_.end(), q) - keys_.begin();
      return prefix_[static_cast<std::size_t>(hi)];
    }
    const auto& g = std::get<RangeQuery>(query);
    if (dims_ == 1) {
      const auto lo = std::lower_bound(keys_.begin(), keys_.end(), g.c[0]) - keys_.begin();
      const auto hi = std::upper_bound(keys_.begin(), keys_.end(), g.c[0] + g.r[0]) - keys_.begin();
      if (hi <= lo) return 0.0;
      return prefix_[static_cast<std::size_t>(hi)] - prefix_[static_cast<std::size_t>(lo)];
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      if (matches({coords_.data() + i * dims_, dims_}, g)) sum += weights_[i];
    }
    return sum;
  }

 private:
  OpKind op_;
  std::size_t dims_ = 1;
  std::vector<double> keys_;
  std::vector<double> prefix_;
  std::vector<double> coords_;
  std::vector<double> weights_;
};

DistanceEstimate mc_distance(OpKind op, const Dataset& a, const Dataset& b,
                             const QuerySampler& sampler, std::size_t samples,
                             std::uint64_t seed) {
  if (samples < 100) throw Error(ErrorKind::InvalidArgs, "Monte Carlo needs at least 100 samples");
  if (op == OpKind::Index) check_rank_pair(a, b);
  SignedPoints diff(op, a, b);
  DistanceEstimate out;
  out.exact = false;
  out.samples = samples;
  if (diff.empty()) return out;
  Rng rng(seed);
  MeanAccumulator acc;
  for (std::size_t s = 0; s < samples; ++s) acc.add(std::abs(diff(sampler(rng))));
  out.value = acc.mean();
  out.std_error = acc.std_error();
  return out;
}

}  // namespace

double rank_l1(const Dataset& a, const Dataset& b) {
  check_rank_pair(a, b);
  std::vector<double> terms(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) terms[i] = std::abs(a.at(i, 0) - b.at(i, 0));
  return neumaier_sum(terms);
}

double rank_l1_oracle(const Dataset& a, const Dataset& b) {
  check_rank_pair(a, b);
  std::vector<double> xs{0.0, 1.0};
  xs.insert(xs.end(), a.values().begin(), a.values().end());
  xs.insert(xs.end(), b.values().begin(), b.values().end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<double> terms;
  std::size_t ia = 0;
  std::size_t ib = 0;
  for (std::size_t t = 0; t + 1 < xs.size(); ++t) {
    while (ia < a.size() && a.at(ia, 0) <= xs[t]) ++ia;
    while (ib < b.size() && b.at(ib, 0) <= xs[t]) ++ib;
    const double diff = std::abs(static_cast<double>(ia) - static_cast<double>(ib));
    if (diff != 0.0) terms.push_back(diff * (xs[t + 1] - xs[t]));
  }
  return neumaier_sum(terms);
}

double rank_linf(const Dataset& a, const Dataset& b) {
  check_rank_pair(a, b);
  std::vector<double> xs(a.values());
  xs.insert(xs.end(), b.values().begin(), b.values().end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::size_t ia = 0;
  std::size_t ib = 0;
  double best = 0.0;
  for (double x : xs) {
    while (ia < a.size() && a.at(ia, 0) <= x) ++ia;
    while (ib < b.size() && b.at(ib, 0) <= x) ++ib;
    best = std::max(best, std::abs(static_cast<double>(ia) - static_cast<double>(ib)));
  }
  return best;
}

double rank_mu(const Dataset& a, const Dataset& b, const Cdf& cdf) {
  check_rank_pair(a, b);
  if (!cdf) throw Error(ErrorKind::InvalidArgs, "mu distance needs a CDF");
  std::vector<double> terms(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) terms[i] = std::abs(cdf(b.at(i, 0)) - cdf(a.at(i, 0)));
  return neumaier_sum(terms);
}

double card1d_l1(const Dataset& a, const Dataset& b) { return step_l1(step_difference(a, b, false)); }
double card1d_linf(const Dataset& a, const Dataset& b) { return step_linf(step_difference(a, b, false)); }
double sum1d_l1(const Dataset& a, const Dataset& b) { return step_l1(step_difference(a, b, true)); }
double sum1d_linf(const Dataset& a, const Dataset& b) { return step_linf(step_difference(a, b, true)); }

DistanceEstimate mc_l1(OpKind op, const Dataset& a, const Dataset& b, std::size_t samples,
                       std::uint64_t seed) {
  const std::size_t cols = a.size() ? a.dims() : b.dims();
  const std::size_t d = op == OpKind::Index ? 1 : predicate_dims(op, cols);
  return mc_distance(op, a, b, [op, d](Rng& rng) { return sample_query(op, d, rng); }, samples, seed);
}

DistanceEstimate mc_mu(OpKind op, const Dataset& a, const Dataset& b, const QuerySampler& sampler,
                       std::size_t samples, std::uint64_t seed) {
  if (!sampler) throw Error(ErrorKind::InvalidArgs, "mu estimate needs a query sampler");
  return mc_distance(op, a, b, sampler, samples, seed);
}

std::optional<double> exact_distance(OpKind op, const NormKind& norm, const Dataset& a,
                                     const Dataset& b) {
  if (op == OpKind::Index) {
    switch (norm.tag) {
      case NormTag::L1: return rank_l1(a, b);
      case NormTag::LInf: return rank_linf(a, b);
      case NormTag::Mu: return rank_mu(a, b, norm.cdf);
    }
  }
  const std::size_t cols = a.size() ? a.dims() : b.dims();
  if (predicate_dims(op, cols) != 1 || norm.tag == NormTag::Mu) return std::nullopt;
  const bool weighted = op == OpKind::RangeSum;
  const auto s = step_difference(a, b, weighted);
  return norm.tag == NormTag::L1 ? step_l1(s) : step_linf(s);
}

DistanceEstimate model_error(const Dataset& data, OpKind op, const Predictor& model,
                             const NormKind& norm, const EvalConfig& cfg) {
  const QueryEvaluator truth(data, op);
  const std::size_t d = predicate_dims(op, data.dims());
  DistanceEstimate out;
  out.exact = false;

  if (norm.tag == NormTag::LInf && op == OpKind::Index) {
    std::vector<double> probes{0.0, 1.0};
    std::vector<double> xs(data.values());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    for (double v : xs) {
      probes.push_back(v);
      if (v - kLeftLimitProbe >= 0.0) probes.push_back(v - kLeftLimitProbe);
    }
    std::vector<double> cuts{0.0};
    cuts.insert(cuts.end(), xs.begin(), xs.end());
    cuts.push_back(1.0);
    for (std::size_t t = 0; t + 1 < cuts.size(); ++t) {
      const double len = cuts[t + 1] - cuts[t];
      if (len <= 0.0) continue;
      for (std::size_t s = 1; s <= cfg.grid; ++s) {
        probes.push_back(cuts[t] + len * static_cast<double>(s) / static_cast<double>(cfg.grid + 1));
      }
    }
    double best = 0.0;
    for (double q : probes) {
      const Query query = RankQuery{q};
      best = std::max(best, std::abs(truth(query) - model(query)));
    }
    out.value = best;
    out.samples = probes.size();
    return out;
  }

  if (cfg.samples == 0) throw Error(ErrorKind::InvalidArgs, "evaluation needs at least one query");
  QuerySampler sampler = [op, d](Rng& rng) { return sample_query(op, d, rng); };
  if (norm.tag == NormTag::Mu) {
    if (!cfg.mu_sampler) throw Error(ErrorKind::InvalidArgs, "mu error needs a query sampler");
    sampler = cfg.mu_sampler;
  }
  Rng rng(cfg.seed);
  out.samples = cfg.samples;
  if (norm.tag == NormTag::LInf) {
    double best = 0.0;
    for (std::size_t s = 0; s < cfg.samples; ++s) {
      const Query q = sampler(rng);
      best = std::max(best, std::abs(truth(q) - model(q)));
    }
    out.value = best;
    return out;
  }
  MeanAccumulator acc;
  for (std::size_t s = 0; s < cfg.samples; ++s) {
    const Query q = sampler(rng);
    acc.add(std::abs(truth(q) - model(q)));
  }
  out.value = acc.mean();
  out.std_error = acc.std_error();
  return out;
}

}  // namespace ldb
