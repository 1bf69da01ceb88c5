#include "ldb/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "ldb/error.hpp"
#include "ldb/rng.hpp"

namespace ldb {

ModelSpec ModelSpec::linear(std::size_t input_dim) {
  ModelSpec s;
  s.kind = ModelKind::Linear;
  s.input_dim = input_dim;
  return s;
}

ModelSpec ModelSpec::mlp(std::size_t hidden_width, std::size_t input_dim) {
  ModelSpec s;
  s.kind = ModelKind::Mlp;
  s.hidden_width = hidden_width;
  s.input_dim = input_dim;
  return s;
}

ModelSpec ModelSpec::sample(std::size_t m, std::size_t input_dim) {
  ModelSpec s;
  s.kind = ModelKind::Sample;
  s.m = m;
  s.input_dim = input_dim;
  return s;
}

ModelSpec ModelSpec::named(const std::string& name, std::size_t input_dim) {
  if (name == "linear") return linear(input_dim);
  if (name == "nn-s1") return mlp(3, input_dim);
  if (name == "nn-s2") return mlp(16, input_dim);
  if (name == "sample") return sample(0, input_dim);
  throw Error(ErrorKind::InvalidArgs, "unknown model '" + name + "'");
}

void ModelSpec::validate() const {
  if (input_dim < 1) throw Error(ErrorKind::InvalidArgs, "input_dim must be at least 1");
  if (param_precision_bits < 1) throw Error(ErrorKind::InvalidArgs, "precision must be positive");
  if (kind == ModelKind::Mlp && hidden_width < 1) throw Error(ErrorKind::InvalidArgs, "hidden_width must be at least 1");
  if (kind == ModelKind::Sample && m < 1) throw Error(ErrorKind::InvalidArgs, "sample size m must be at least 1");
}

std::size_t ModelSpec::parameter_count() const {
  switch (kind) {
    case ModelKind::Linear: return input_dim + 1;
    case ModelKind::Mlp: return hidden_width * (input_dim + 2) + 1;
    case ModelKind::Sample: return 0;
  }
  return 0;
}

std::string ModelSpec::id() const {
  switch (kind) {
    case ModelKind::Linear: return "linear";
    case ModelKind::Mlp:
      if (hidden_width == 3) return "nn-s1";
      if (hidden_width == 16) return "nn-s2";
      return "mlp-h" + std::to_string(hidden_width);
    case ModelKind::Sample: return "sample-m" + std::to_string(m);
  }
  return "?";
}

std::size_t input_dim_for(OpKind op, std::size_t d) { return op == OpKind::Index ? 1 : 2 * d; }

void TrainedModel::attach_sample(Dataset data) {
  sample_eval_ = std::make_shared<const QueryEvaluator>(data, op);
  sample = std::move(data);
}

double TrainedModel::forward(const std::vector<double>& x) const {
  if (x.size() != spec.input_dim) throw Error(ErrorKind::ShapeMismatch, "query does not match input_dim");
  const std::size_t in = spec.input_dim;
  if (spec.kind == ModelKind::Linear) {
    double f = parameters[in];
    for (std::size_t j = 0; j < in; ++j) f += parameters[j] * x[j];
    return f;
  }
  if (spec.kind == ModelKind::Mlp) {
    const std::size_t h = spec.hidden_width;
    const double* w1 = parameters.data();
    const double* b1 = w1 + h * in;
    const double* w2 = b1 + h;
    double f = w2[h];
    for (std::size_t i = 0; i < h; ++i) {
      double z = b1[i];
      for (std::size_t j = 0; j < in; ++j) z += w1[i * in + j] * x[j];
      if (z > 0.0) f += w2[i] * z;
    }
    return f;
  }
  throw Error(ErrorKind::InvalidArgs, "sample models have no network");
}

double TrainedModel::predict(const Query& query) const {
  if (spec.kind == ModelKind::Sample) {
    if (!sample_eval_) throw Error(ErrorKind::InvalidArgs, "sample model has no stored sample");
    if (flatten(query).size() != spec.input_dim) throw Error(ErrorKind::ShapeMismatch, "query does not match input_dim");
    const double m = static_cast<double>(sample->size());
    return n_train / m * (*sample_eval_)(query);
  }
  return n_train * forward(flatten(query));
}

TrainedModel init_model(const ModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  TrainedModel model;
  model.spec = spec;
  model.parameters.assign(spec.parameter_count(), 0.0);
  if (spec.kind == ModelKind::Linear) {
    model.parameters.back() = 0.5;
  } else if (spec.kind == ModelKind::Mlp) {
    // U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases of both
    // layers. Zero biases with inputs in [0,1] leave every unit with a
    // negative weight dead from the start.
    Rng rng(seed);
    const std::size_t h = spec.hidden_width;
    const std::size_t in = spec.input_dim;
    const double a1 = 1.0 / std::sqrt(static_cast<double>(in));
    const double a2 = 1.0 / std::sqrt(static_cast<double>(h));
    for (std::size_t t = 0; t < h * in + h; ++t) model.parameters[t] = rng.uniform(-a1, a1);
    for (std::size_t t = h * in + h; t < model.parameters.size(); ++t) model.parameters[t] = rng.uniform(-a2, a2);
  }
  return model;
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw Error(ErrorKind::InvalidArgs, "batch_size must be at least 1");
  if (!(learning_rate > 0.0)) throw Error(ErrorKind::InvalidArgs, "learning_rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw Error(ErrorKind::InvalidArgs, "momentum must lie in [0,1)");
}

double loss_and_gradient(const TrainedModel& model, const std::vector<double>& x, double label,
                         std::vector<double>* grad) {
  const double f = model.forward(x);
  const double r = f - label;
  if (!grad) return r * r;
  const auto& p = model.parameters;
  grad->assign(p.size(), 0.0);
  const double g = 2.0 * r;
  const std::size_t in = model.spec.input_dim;
  if (model.spec.kind == ModelKind::Linear) {
    for (std::size_t j = 0; j < in; ++j) (*grad)[j] = g * x[j];
    (*grad)[in] = g;
    return r * r;
  }
  const std::size_t h = model.spec.hidden_width;
  const std::size_t b1 = h * in;
  const std::size_t w2 = b1 + h;
  for (std::size_t i = 0; i < h; ++i) {
    double z = p[b1 + i];
    for (std::size_t j = 0; j < in; ++j) z += p[i * in + j] * x[j];
    if (z > 0.0) {
      (*grad)[w2 + i] = g * z;
      const double back = g * p[w2 + i];
      (*grad)[b1 + i] = back;
      for (std::size_t j = 0; j < in; ++j) (*grad)[i * in + j] = back * x[j];
    }
  }
  (*grad)[w2 + h] = g;
  return r * r;
}

TrainResult train(const TrainedModel& start, const Dataset& data, OpKind op, const TrainConfig& cfg) {
  cfg.validate();
  TrainResult result;
  result.model = start;
  TrainedModel& model = result.model;
  model.op = op;
  model.n_train = static_cast<double>(data.size());
  const std::size_t d = predicate_dims(op, data.dims());
  if (input_dim_for(op, d) != model.spec.input_dim) {
    throw Error(ErrorKind::ShapeMismatch, "model input_dim does not match the operation");
  }

  if (model.spec.kind == ModelKind::Sample) {
    const std::size_t n = data.size();
    if (model.spec.m >= n) {
      model.attach_sample(data);
      return result;
    }
    // Partial Fisher-Yates: the first m slots form a uniform m-subset.
    Rng rng(cfg.init_seed);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < model.spec.m; ++i) std::swap(idx[i], idx[i + rng.below(n - i)]);
    std::sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(model.spec.m));
    std::vector<double> values;
    for (std::size_t i = 0; i < model.spec.m; ++i) {
      const auto row = data.row(idx[i]);
      values.insert(values.end(), row.begin(), row.end());
    }
    model.attach_sample(Dataset(model.spec.m, data.dims(), std::move(values)));
    return result;
  }

  const QueryEvaluator truth(data, op);
  const double scale = 1.0 / static_cast<double>(data.size());
  Rng rng(cfg.query_seed);
  const std::size_t np = model.parameters.size();
  std::vector<double> velocity(np, 0.0);
  std::vector<double> grad(np);
  std::vector<double> batch_grad(np);
  result.loss_trace.reserve(cfg.steps);
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    std::fill(batch_grad.begin(), batch_grad.end(), 0.0);
    double loss = 0.0;
    for (std::size_t b = 0; b < cfg.batch_size; ++b) {
      const Query q = sample_query(op, d, rng);
      loss += loss_and_gradient(model, flatten(q), truth(q) * scale, &grad);
      for (std::size_t t = 0; t < np; ++t) batch_grad[t] += grad[t];
    }
    const double inv = 1.0 / static_cast<double>(cfg.batch_size);
    loss *= inv;
    if (!std::isfinite(loss)) {
      throw Error(ErrorKind::DivergenceDetected, "training loss became non-finite at step " + std::to_string(step));
    }
    result.loss_trace.push_back(loss);
    for (std::size_t t = 0; t < np; ++t) {
      velocity[t] = cfg.momentum * velocity[t] - cfg.learning_rate * batch_grad[t] * inv;
      model.parameters[t] += velocity[t];
    }
  }
  result.final_loss = result.loss_trace.empty() ? 0.0 : result.loss_trace.back();
  return result;
}

GradCheckReport grad_check(const TrainedModel& model, const std::vector<double>& x, double label,
                           double tol) {
  if (model.spec.kind == ModelKind::Sample) throw Error(ErrorKind::InvalidArgs, "sample models have no gradient");
  constexpr double kStep = 1e-5;
  // Gradients smaller than this are compared in absolute terms; central
  // differences carry ~1e-11 rounding noise at this step size.
  constexpr double kFloor = 1e-6;
  GradCheckReport report;
  std::vector<double> analytic;
  loss_and_gradient(model, x, label, &analytic);

  // A hidden unit whose pre-activation is within reach of the stencil can
  // cross the ReLU kink under perturbation; its incoming parameters are
  // skipped.
  std::vector<bool> near_kink(model.parameters.size(), false);
  if (model.spec.kind == ModelKind::Mlp) {
    const std::size_t in = model.spec.input_dim;
    const std::size_t h = model.spec.hidden_width;
    double reach = 1.0;
    for (double v : x) reach = std::max(reach, std::abs(v));
    for (std::size_t i = 0; i < h; ++i) {
      double z = model.parameters[h * in + i];
      for (std::size_t j = 0; j < in; ++j) z += model.parameters[i * in + j] * x[j];
      if (std::abs(z) <= 2.0 * kStep * reach) {
        near_kink[h * in + i] = true;
        for (std::size_t j = 0; j < in; ++j) near_kink[i * in + j] = true;
      }
    }
  }

  TrainedModel probe = model;
  for (std::size_t t = 0; t < model.parameters.size(); ++t) {
    if (near_kink[t]) {
      ++report.skipped_kinks;
      continue;
    }
    const double saved = probe.parameters[t];
    probe.parameters[t] = saved + kStep;
    const double up = loss_and_gradient(probe, x, label, nullptr);
    probe.parameters[t] = saved - kStep;
    const double down = loss_and_gradient(probe, x, label, nullptr);
    probe.parameters[t] = saved;
    const double numeric = (up - down) / (2.0 * kStep);
    const double rel = std::abs(analytic[t] - numeric) /
                       std::max(std::abs(analytic[t]) + std::abs(numeric), kFloor);
    report.max_rel_error = std::max(report.max_rel_error, rel);
    ++report.checked;
  }
  report.pass = report.max_rel_error < tol;
  return report;
}

std::uint64_t model_bits(const TrainedModel& model) {
  const std::uint64_t bits = model.spec.param_precision_bits;
  if (model.spec.kind == ModelKind::Sample) {
    const std::size_t d = model.op == OpKind::Index ? 1 : model.spec.input_dim / 2;
    const std::uint64_t m = model.sample ? model.sample->size() : model.spec.m;
    return m * record_dims(model.op, d) * bits;
  }
  return model.spec.parameter_count() * bits;
}

namespace {

const char* kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::Linear: return "linear";
    case ModelKind::Mlp: return "mlp";
    case ModelKind::Sample: return "sample";
  }
  return "?";
}

std::string exact_decimal(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string checkpoint_json(const TrainedModel& model) {
  nlohmann::ordered_json j;
  j["spec"] = {{"kind", kind_name(model.spec.kind)},
               {"hidden_width", model.spec.hidden_width},
               {"m", model.spec.m},
               {"input_dim", model.spec.input_dim},
               {"param_precision_bits", model.spec.param_precision_bits}};
  j["op"] = to_string(model.op);
  j["n_train"] = exact_decimal(model.n_train);
  auto params = nlohmann::ordered_json::array();
  for (double p : model.parameters) params.push_back(exact_decimal(p));
  j["parameters"] = params;
  if (model.sample) {
    auto values = nlohmann::ordered_json::array();
    for (double v : model.sample->values()) values.push_back(exact_decimal(v));
    j["sample"] = {{"n", model.sample->size()}, {"d", model.sample->dims()}, {"values", values}};
  }
  return j.dump(2);
}

TrainedModel load_checkpoint(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    TrainedModel model;
    const auto& s = j.at("spec");
    const std::string kind = s.at("kind");
    model.spec.kind = kind == "linear" ? ModelKind::Linear
                      : kind == "mlp"  ? ModelKind::Mlp
                      : kind == "sample"
                          ? ModelKind::Sample
                          : throw Error(ErrorKind::InvalidArgs, "unknown model kind '" + kind + "'");
    model.spec.hidden_width = s.at("hidden_width");
    model.spec.m = s.at("m");
    model.spec.input_dim = s.at("input_dim");
    model.spec.param_precision_bits = s.at("param_precision_bits");
    model.spec.validate();
    model.op = parse_op(j.at("op"));
    model.n_train = std::stod(j.at("n_train").get<std::string>());
    for (const auto& p : j.at("parameters")) model.parameters.push_back(std::stod(p.get<std::string>()));
    if (model.parameters.size() != model.spec.parameter_count()) {
      throw Error(ErrorKind::ShapeMismatch, "parameter count does not match the spec");
    }
    if (j.contains("sample")) {
      const auto& sm = j.at("sample");
      std::vector<double> values;
      for (const auto& v : sm.at("values")) values.push_back(std::stod(v.get<std::string>()));
      model.attach_sample(Dataset(sm.at("n"), sm.at("d"), std::move(values)));
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::IoError, std::string("malformed checkpoint: ") + e.what());
  }
}

}  // namespace ldb
