#include "ldb/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "ldb/error.hpp"
#include "ldb/rng.hpp"

namespace ldb {

Dataset::Dataset(std::size_t n, std::size_t d, std::vector<double> values)
    : n_(n), d_(d), values_(std::move(values)) {
  if (d_ == 0) throw Error(ErrorKind::ShapeMismatch, "dimension must be at least 1");
  if (values_.size() != n_ * d_) {
    throw Error(ErrorKind::ShapeMismatch, "value count does not equal n * d");
  }
  for (double v : values_) {
    // Written so that NaN fails too.
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorKind::EntryOutOfRange, "entry " + std::to_string(v) + " outside [0,1]");
    }
  }
  sorted_ = d_ == 1 && std::is_sorted(values_.begin(), values_.end());
}

std::vector<double> Dataset::column(std::size_t j) const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = at(i, j);
  return out;
}

Dataset empty_dataset(std::size_t d) { return Dataset(0, d, {}); }

Dataset make_dataset(const std::vector<std::vector<double>>& rows, std::size_t d) {
  if (rows.empty()) throw Error(ErrorKind::ShapeMismatch, "dataset must have at least one record");
  std::vector<double> flat;
  flat.reserve(rows.size() * d);
  for (const auto& r : rows) {
    if (r.size() != d) throw Error(ErrorKind::ShapeMismatch, "row length does not match d");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return Dataset(rows.size(), d, std::move(flat));
}

Dataset make_dataset_1d(const std::vector<double>& values) {
  if (values.empty()) throw Error(ErrorKind::ShapeMismatch, "dataset must have at least one record");
  return Dataset(values.size(), 1, values);
}

void GmmParams::validate() const {
  if (components.empty()) throw Error(ErrorKind::InvalidParams, "mixture has no components");
  double total = 0.0;
  for (const auto& c : components) {
    if (!(c.weight > 0.0 && c.weight <= 1.0)) {
      throw Error(ErrorKind::InvalidParams, "mixture weight must lie in (0,1]");
    }
    if (!(c.sigma > 0.0) || !std::isfinite(c.sigma) || !std::isfinite(c.mean)) {
      throw Error(ErrorKind::InvalidParams, "component sigma must be positive and finite");
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorKind::InvalidParams, "mixture weights must sum to 1");
  }
}

double GmmParams::acceptance_probability() const {
  double p = 0.0;
  for (const auto& c : components) {
    const double hi = (1.0 - c.mean) / (c.sigma * std::sqrt(2.0));
    const double lo = (0.0 - c.mean) / (c.sigma * std::sqrt(2.0));
    p += c.weight * 0.5 * (std::erfc(-hi) - std::erfc(-lo));
  }
  return p;
}

Dataset sample_uniform(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (n == 0 || d == 0) throw Error(ErrorKind::InvalidArgs, "n and d must be at least 1");
  Rng rng(seed);
  std::vector<double> v(n * d);
  for (auto& x : v) x = rng.uniform();
  return Dataset(n, d, std::move(v));
}

Dataset sample_gmm(std::size_t n, std::size_t d, const GmmParams& params, std::uint64_t seed) {
  if (n == 0 || d == 0) throw Error(ErrorKind::InvalidArgs, "n and d must be at least 1");
  params.validate();
  if (params.acceptance_probability() < 1e-6) {
    throw Error(ErrorKind::RejectionStarvation, "mixture puts less than 1e-6 mass on [0,1]");
  }
  std::vector<double> cumulative;
  double acc = 0.0;
  for (const auto& c : params.components) cumulative.push_back(acc += c.weight);

  Rng rng(seed);
  std::vector<double> v(n * d);
  for (auto& x : v) {
    for (;;) {
      const double pick = rng.uniform() * acc;
      std::size_t k = 0;
      while (k + 1 < cumulative.size() && pick >= cumulative[k]) ++k;
      const auto& c = params.components[k];
      const double draw = c.mean + c.sigma * rng.normal();
      if (draw >= 0.0 && draw <= 1.0) {
        x = draw;
        break;
      }
    }
  }
  return Dataset(n, d, std::move(v));
}

Dataset sort_dataset_1d(const Dataset& data) {
  if (data.dims() != 1) throw Error(ErrorKind::NotOneDimensional, "sorting requires d = 1");
  std::vector<double> v = data.values();
  std::sort(v.begin(), v.end());
  return Dataset(data.size(), 1, std::move(v));
}

double grid_value(std::uint64_t cell, std::uint64_t denominator) {
  return static_cast<double>(cell) / static_cast<double>(denominator);
}

std::uint64_t grid_cell(double x, std::uint64_t denominator) {
  // floor(u * x) in floating point can land one cell off (e.g. (1/49) * 49 <
  // 1), so settle on the largest cell whose decoded value does not exceed x.
  // This makes quantize exactly idempotent.
  auto cell = static_cast<std::uint64_t>(std::floor(static_cast<double>(denominator) * x));
  cell = std::min(cell, denominator);
  while (cell > 0 && grid_value(cell, denominator) > x) --cell;
  while (cell < denominator && grid_value(cell + 1, denominator) <= x) ++cell;
  return cell;
}

Dataset quantize(const Dataset& data, const GridSpec& grid) {
  if (grid.denominator == 0) throw Error(ErrorKind::InvalidArgs, "grid denominator must be positive");
  if (grid.d != data.dims()) throw Error(ErrorKind::DimensionMismatch, "grid and dataset dimensions differ");
  std::vector<double> v = data.values();
  for (auto& x : v) x = grid_value(grid_cell(x, grid.denominator), grid.denominator);
  return Dataset(data.size(), data.dims(), std::move(v));
}

Dataset sort_rows(const Dataset& data) {
  const std::size_t n = data.size();
  const std::size_t d = data.dims();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ra = data.row(a);
    const auto rb = data.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  std::vector<double> v;
  v.reserve(n * d);
  for (std::size_t i : order) {
    const auto r = data.row(i);
    v.insert(v.end(), r.begin(), r.end());
  }
  return Dataset(n, d, std::move(v));
}

Dataset read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw Error(ErrorKind::IoError, "non-numeric field '" + cell + "' in " + path.string());
      }
      if (cell.find_first_not_of(" \t", used) != std::string::npos) {
        throw Error(ErrorKind::IoError, "trailing characters in field '" + cell + "'");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorKind::ShapeMismatch, path.string() + " has no records");
  return make_dataset(rows, rows.front().size());
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = 0; j < data.dims(); ++j) {
      std::fprintf(f, j ? ",%.17g" : "%.17g", data.at(i, j));
    }
    std::fputc('\n', f);
  }
  if (std::fclose(f) != 0) throw Error(ErrorKind::IoError, "failed writing " + path.string());
}

}  // namespace ldb
