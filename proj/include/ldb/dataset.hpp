#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace ldb {

// n records of d attributes in [0,1], stored row-major. Multiset semantics.
class Dataset {
 public:
  Dataset() = default;
  // Validates entries; the sorted flag is set when d = 1 and values are
  // non-decreasing.
  Dataset(std::size_t n, std::size_t d, std::vector<double> values);

  std::size_t size() const noexcept { return n_; }
  std::size_t dims() const noexcept { return d_; }
  bool is_sorted() const noexcept { return sorted_; }
  bool empty() const noexcept { return n_ == 0; }

  double at(std::size_t i, std::size_t j) const { return values_[i * d_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * d_, d_};
  }
  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double> column(std::size_t j) const;

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.n_ == b.n_ && a.d_ == b.d_ && a.values_ == b.values_;
  }

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 1;
  std::vector<double> values_;
  bool sorted_ = false;
};

// Zero-record dataset; only the distance functions accept these, e.g. a
// dataset against its empty subset.
Dataset empty_dataset(std::size_t d);

Dataset make_dataset(const std::vector<std::vector<double>>& rows, std::size_t d);
Dataset make_dataset_1d(const std::vector<double>& values);

struct GmmComponent {
  double weight;
  double mean;
  double sigma;
};

// One mixture shared by every attribute.
struct GmmParams {
  std::vector<GmmComponent> components;

  void validate() const;
  // Probability that one draw of the untruncated mixture lands in [0,1].
  double acceptance_probability() const;
};

struct GridSpec {
  std::uint64_t denominator;
  std::size_t d;
};

Dataset sample_uniform(std::size_t n, std::size_t d, std::uint64_t seed);
Dataset sample_gmm(std::size_t n, std::size_t d, const GmmParams& params, std::uint64_t seed);
Dataset sort_dataset_1d(const Dataset& data);

// Grid cell of x at unit 1/u: floor(u * x). x = 1 maps to u.
std::uint64_t grid_cell(double x, std::uint64_t denominator);
double grid_value(std::uint64_t cell, std::uint64_t denominator);

Dataset quantize(const Dataset& data, const GridSpec& grid);

// Lexicographic order on rows; used to canonicalize multi-dimensional sets.
Dataset sort_rows(const Dataset& data);

Dataset read_csv(const std::filesystem::path& path);
void write_csv(const Dataset& data, const std::filesystem::path& path);

}  // namespace ldb
