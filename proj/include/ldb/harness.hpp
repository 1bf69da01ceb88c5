#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ldb/bounds.hpp"
#include "ldb/dataset.hpp"
#include "ldb/models.hpp"
#include "ldb/norms.hpp"
#include "ldb/query.hpp"

namespace ldb {

struct DistributionSpec {
  enum class Kind { Uniform, Gmm } kind = Kind::Uniform;
  GmmParams gmm;
  std::string name = "uniform";

  Dataset sample(std::size_t n, std::size_t cols, std::uint64_t seed) const;
};

// A model entry of the config. Sample without m is sized to the bits of the
// linear model for the same operation.
struct ModelEntry {
  ModelKind kind = ModelKind::Linear;
  std::size_t hidden_width = 0;
  std::optional<std::size_t> m;
  unsigned param_precision_bits = 32;

  ModelSpec resolve(OpKind op, std::size_t d) const;
};

struct ExperimentConfig {
  std::vector<OpKind> ops;
  std::vector<NormTag> norms;
  std::vector<DistributionSpec> distributions;
  std::vector<std::uint64_t> n_values;
  std::uint64_t d = 1;
  std::vector<ModelEntry> models;
  std::size_t datasets_per_cell = 1;
  std::size_t eval_queries = 10000;
  std::size_t eval_grid = 4;
  std::uint64_t master_seed = 0;
  TrainConfig train;
  std::uint64_t u = std::uint64_t{1} << 32;  // domain size for inf-norm eps*
  std::size_t threads = 0;                   // 0 = hardware concurrency

  void validate() const;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct ResultRow {
  OpKind op = OpKind::Index;
  NormTag norm = NormTag::L1;
  std::string distribution;
  std::uint64_t n = 0;
  std::uint64_t d = 1;
  std::string model_id;
  std::uint64_t model_bits = 0;
  double observed_err = 0.0;
  double eps_star = 0.0;
  EpsStarFlag eps_star_flag = EpsStarFlag::Interior;
  std::uint64_t seed = 0;
  bool exact = false;
};

struct CellFailure {
  std::string cell;
  std::string error;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<CellFailure> failures;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

inline constexpr const char* kCsvHeader =
    "op,norm,distribution,n,d,model_id,model_bits,observed_err,eps_star,seed,exact";

std::string to_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_csv(const std::string& text);
void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);

// {"series": [{"label", "op", "norm", "distribution", "model_id", "metric",
//              "x": [n...], "y": [value...]}]}, one series per
// (op, norm, distribution, model, metric) with metric in
// {observed_err, eps_star}.
std::string plot_json(const std::vector<ResultRow>& rows);
void emit_plot_data(const std::vector<ResultRow>& rows, const std::filesystem::path& path);

}  // namespace ldb
