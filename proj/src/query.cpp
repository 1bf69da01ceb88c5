#include "ldb/query.hpp"

#include <algorithm>
#include <numeric>

#include "ldb/error.hpp"

namespace ldb {

const char* to_string(OpKind op) {
  switch (op) {
    case OpKind::Index: return "index";
    case OpKind::CardEst: return "ce";
    case OpKind::RangeSum: return "rs";
  }
  return "?";
}

OpKind parse_op(const std::string& name) {
  if (name == "index") return OpKind::Index;
  if (name == "ce" || name == "cardest") return OpKind::CardEst;
  if (name == "rs" || name == "rangesum") return OpKind::RangeSum;
  throw Error(ErrorKind::InvalidArgs, "unknown operation '" + name + "'");
}

bool in_domain(const Query& query) {
  if (const auto* rq = std::get_if<RankQuery>(&query)) return rq->q >= 0.0 && rq->q <= 1.0;
  const auto& g = std::get<RangeQuery>(query);
  if (g.c.size() != g.r.size() || g.c.empty()) return false;
  for (std::size_t j = 0; j < g.c.size(); ++j) {
    if (!(g.r[j] >= 0.0 && g.r[j] <= 1.0)) return false;
    if (!(g.c[j] >= -g.r[j] && g.c[j] + g.r[j] <= 1.0)) return false;
  }
  return true;
}

bool matches(std::span<const double> point, const RangeQuery& query) {
  const std::size_t dims = std::min(point.size(), query.dims());
  for (std::size_t j = 0; j < dims; ++j) {
    const double p = point[j];
    if (p < query.c[j] || p > query.c[j] + query.r[j]) return false;
  }
  return true;
}

std::size_t rank(const Dataset& data, double q) {
  if (data.dims() != 1) throw Error(ErrorKind::NotOneDimensional, "rank needs a 1-d dataset");
  if (!data.is_sorted()) throw Error(ErrorKind::NotSorted, "rank needs a sorted dataset");
  const auto& v = data.values();
  return static_cast<std::size_t>(std::upper_bound(v.begin(), v.end(), q) - v.begin());
}

std::size_t cardinality(const Dataset& data, const RangeQuery& query) {
  if (query.dims() != data.dims() || query.r.size() != query.c.size()) {
    throw Error(ErrorKind::DimensionMismatch, "predicate dims must equal dataset dims");
  }
  std::size_t count = 0;
  for (std::size_t i = 0; i < data.size(); ++i) count += matches(data.row(i), query) ? 1 : 0;
  return count;
}

double range_sum(const Dataset& data, const RangeQuery& query) {
  if (query.dims() + 1 != data.dims() || query.r.size() != query.c.size()) {
    throw Error(ErrorKind::DimensionMismatch, "range-sum needs d + 1 attributes");
  }
  const std::size_t last = data.dims() - 1;
  double sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (matches(data.row(i), query)) sum += data.at(i, last);
  }
  return sum;
}

double evaluate(OpKind op, const Dataset& data, const Query& query) {
  if (op == OpKind::Index) {
    const auto* rq = std::get_if<RankQuery>(&query);
    if (!rq) throw Error(ErrorKind::ShapeMismatch, "index operation needs a rank query");
    return static_cast<double>(rank(data, rq->q));
  }
  const auto* g = std::get_if<RangeQuery>(&query);
  if (!g) throw Error(ErrorKind::ShapeMismatch, "range operation needs a range query");
  if (op == OpKind::CardEst) return static_cast<double>(cardinality(data, *g));
  return range_sum(data, *g);
}

std::size_t predicate_dims(OpKind op, std::size_t data_dims) {
  if (op == OpKind::Index) return 1;
  if (op == OpKind::CardEst) return data_dims;
  return data_dims - 1;
}

std::size_t record_dims(OpKind op, std::size_t d) {
  if (op == OpKind::Index) return 1;
  return op == OpKind::RangeSum ? d + 1 : d;
}

Query sample_query(OpKind op, std::size_t d, Rng& rng) {
  if (op == OpKind::Index) return RankQuery{rng.uniform()};
  RangeQuery g;
  g.c.resize(d);
  g.r.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    g.r[j] = rng.uniform();
    g.c[j] = -g.r[j] + rng.uniform();
  }
  return g;
}

Query sample_query(OpKind op, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  return sample_query(op, d, rng);
}

RangeQuery sample_easy_query(std::uint64_t n, std::uint64_t k, Rng& rng) {
  if (n == 0 || k == 0) throw Error(ErrorKind::InvalidArgs, "n and k must be at least 1");
  const std::uint64_t cells = n * k;
  const double h = 1.0 / static_cast<double>(cells);
  const std::uint64_t i = rng.below(cells);
  double u1 = rng.uniform();
  double u2 = rng.uniform();
  if (u1 + u2 > 1.0) {
    u1 = 1.0 - u1;
    u2 = 1.0 - u2;
  }
  const double c = static_cast<double>(i) * h + u1 * h;
  const double r = std::min(u2 * h, 1.0 - c);
  return RangeQuery{{c}, {r}};
}

RangeQuery sample_easy_query(std::uint64_t n, std::uint64_t k, std::uint64_t seed) {
  Rng rng(seed);
  return sample_easy_query(n, k, rng);
}

std::vector<double> flatten(const Query& query) {
  if (const auto* rq = std::get_if<RankQuery>(&query)) return {rq->q};
  const auto& g = std::get<RangeQuery>(query);
  std::vector<double> out(g.c);
  out.insert(out.end(), g.r.begin(), g.r.end());
  return out;
}

QueryEvaluator::QueryEvaluator(const Dataset& data, OpKind op) : data_(data), op_(op) {
  if (op == OpKind::Index) {
    if (data.dims() != 1) throw Error(ErrorKind::NotOneDimensional, "rank needs a 1-d dataset");
    if (!data.is_sorted()) throw Error(ErrorKind::NotSorted, "rank needs a sorted dataset");
    keys_ = data.values();
    indexed_ = true;
    return;
  }
  if (op == OpKind::RangeSum && data.dims() < 2) {
    throw Error(ErrorKind::DimensionMismatch, "range-sum needs d + 1 attributes");
  }
  if (predicate_dims(op, data.dims()) != 1) return;

  const std::size_t n = data.size();
  std::vector<std::pair<double, double>> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    rows[i] = {data.at(i, 0), op == OpKind::RangeSum ? data.at(i, 1) : 1.0};
  }
  // Sorting on (key, weight) fixes the summation order independently of the
  // input row order.
  std::sort(rows.begin(), rows.end());
  keys_.resize(n);
  prefix_.assign(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    keys_[i] = rows[i].first;
    prefix_[i + 1] = prefix_[i] + rows[i].second;
  }
  indexed_ = true;
}

double QueryEvaluator::operator()(const Query& query) const {
  if (!indexed_) return evaluate(op_, data_, query);
  if (op_ == OpKind::Index) {
    const auto* rq = std::get_if<RankQuery>(&query);
    if (!rq) throw Error(ErrorKind::ShapeMismatch, "index operation needs a rank query");
    return static_cast<double>(std::upper_bound(keys_.begin(), keys_.end(), rq->q) - keys_.begin());
  }
  const auto* g = std::get_if<RangeQuery>(&query);
  if (!g) throw Error(ErrorKind::ShapeMismatch, "range operation needs a range query");
  if (g->dims() != 1) throw Error(ErrorKind::DimensionMismatch, "query dims do not match dataset");
  const double lo = g->c[0];
  const double hi = g->c[0] + g->r[0];
  const auto first = std::lower_bound(keys_.begin(), keys_.end(), lo) - keys_.begin();
  const auto last = std::upper_bound(keys_.begin(), keys_.end(), hi) - keys_.begin();
  if (last <= first) return 0.0;
  if (op_ == OpKind::CardEst) return static_cast<double>(last - first);
  return prefix_[last] - prefix_[first];
}

}  // namespace ldb
