#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ldb/dataset.hpp"
#include "ldb/rng.hpp"

namespace ldb {

enum class OpKind { Index, CardEst, RangeSum };

const char* to_string(OpKind op);
OpKind parse_op(const std::string& name);

struct RankQuery {
  double q;
};

// Attribute j must lie in the closed interval [c[j], c[j] + r[j]].
struct RangeQuery {
  std::vector<double> c;
  std::vector<double> r;
  std::size_t dims() const noexcept { return c.size(); }
};

using Query = std::variant<RankQuery, RangeQuery>;

bool in_domain(const Query& query);

// Uses the first query.dims() attributes of the point; extra attributes are
// ignored.
bool matches(std::span<const double> point, const RangeQuery& query);

std::size_t rank(const Dataset& data, double q);
std::size_t cardinality(const Dataset& data, const RangeQuery& query);
double range_sum(const Dataset& data, const RangeQuery& query);

// Dispatches to rank/cardinality/range_sum; the query alternative must match
// the operation.
double evaluate(OpKind op, const Dataset& data, const Query& query);

// Number of predicate dimensions a dataset supports under op.
std::size_t predicate_dims(OpKind op, std::size_t data_dims);
// Attribute count of datasets for op with d predicate dimensions.
std::size_t record_dims(OpKind op, std::size_t d);

Query sample_query(OpKind op, std::size_t d, Rng& rng);
Query sample_query(OpKind op, std::size_t d, std::uint64_t seed);

// Triangle-supported query distribution with density 2nk on cells of width
// 1/(nk); under it every pair of n-record datasets is within 4/k.
RangeQuery sample_easy_query(std::uint64_t n, std::uint64_t k, Rng& rng);
RangeQuery sample_easy_query(std::uint64_t n, std::uint64_t k, std::uint64_t seed);

// Query features fed to models: (q) or (c_1..c_d, r_1..r_d).
std::vector<double> flatten(const Query& query);

// Answers queries against a fixed dataset. One-dimensional predicates use
// binary search over sorted keys with prefix sums; otherwise a scan.
class QueryEvaluator {
 public:
  QueryEvaluator(const Dataset& data, OpKind op);

  double operator()(const Query& query) const;
  OpKind op() const noexcept { return op_; }
  const Dataset& data() const noexcept { return data_; }

 private:
  Dataset data_;
  OpKind op_;
  bool indexed_ = false;
  std::vector<double> keys_;
  std::vector<double> prefix_;  // prefix_[i] = total weight of keys_[0..i)
};

}  // namespace ldb
