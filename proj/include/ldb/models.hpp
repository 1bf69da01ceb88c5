#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ldb/dataset.hpp"
#include "ldb/query.hpp"

namespace ldb {

enum class ModelKind { Linear, Mlp, Sample };

struct ModelSpec {
  ModelKind kind = ModelKind::Linear;
  std::size_t hidden_width = 0;  // Mlp
  std::size_t m = 0;             // Sample
  std::size_t input_dim = 1;     // 1 for rank queries, 2d for range queries
  unsigned param_precision_bits = 32;

  static ModelSpec linear(std::size_t input_dim);
  static ModelSpec mlp(std::size_t hidden_width, std::size_t input_dim);
  static ModelSpec sample(std::size_t m, std::size_t input_dim);
  // "linear", "nn-s1" (width 3), "nn-s2" (width 16); samples need m.
  static ModelSpec named(const std::string& name, std::size_t input_dim);

  void validate() const;
  std::size_t parameter_count() const;
  std::string id() const;
};

std::size_t input_dim_for(OpKind op, std::size_t d);

struct TrainedModel {
  ModelSpec spec;
  OpKind op = OpKind::Index;
  std::vector<double> parameters;
  double n_train = 1.0;   // output scale
  std::optional<Dataset> sample;

  void attach_sample(Dataset data);

  // n_train * network(features). Sample: n_train / m times the exact answer
  // on the stored sample.
  double predict(const Query& query) const;
  // Network output in normalized units, before the n_train scale.
  double forward(const std::vector<double>& features) const;

 private:
  std::shared_ptr<const QueryEvaluator> sample_eval_;
};

TrainedModel init_model(const ModelSpec& spec, std::uint64_t seed);

struct TrainConfig {
  std::size_t steps = 20000;
  std::size_t batch_size = 256;
  double learning_rate = 0.01;
  double momentum = 0.9;
  std::uint64_t query_seed = 1;
  std::uint64_t init_seed = 2;

  void validate() const;
};

struct TrainResult {
  TrainedModel model;
  std::vector<double> loss_trace;  // mean batch loss per step
  double final_loss = 0.0;
};

// SGD with momentum on (network(q) - f_D(q)/n)^2. Sample models draw their
// m records here, seeded by init_seed.
TrainResult train(const TrainedModel& model, const Dataset& data, OpKind op, const TrainConfig& cfg);

// Squared loss of one (features, normalized label) pair and its gradient.
double loss_and_gradient(const TrainedModel& model, const std::vector<double>& features,
                         double label, std::vector<double>* grad);

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped_kinks = 0;
  bool pass = false;
};

GradCheckReport grad_check(const TrainedModel& model, const std::vector<double>& features,
                           double label, double tol);

std::uint64_t model_bits(const TrainedModel& model);

std::string checkpoint_json(const TrainedModel& model);
TrainedModel load_checkpoint(const std::string& json);

}  // namespace ldb
