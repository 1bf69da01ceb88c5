// Command-line front end: bounds, eps*, certificates, cover codec, training
// and the experiment grid. Every subcommand prints one JSON object.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ldb/bounds.hpp"
#include "ldb/constructions.hpp"
#include "ldb/cover.hpp"
#include "ldb/error.hpp"
#include "ldb/harness.hpp"
#include "ldb/models.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int kValidationError = 1;
constexpr int kRuntimeError = 2;

int exit_code_for(ldb::ErrorKind kind) {
  switch (kind) {
    case ldb::ErrorKind::IoError:
    case ldb::ErrorKind::RejectionStarvation:
    case ldb::ErrorKind::DivergenceDetected:
    case ldb::ErrorKind::NoCollision:
      return kRuntimeError;
    default:
      return kValidationError;
  }
}

void print(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

ordered_json number_or_null(double v) {
  return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

ldb::Cdf named_cdf(const std::string& name) {
  if (name == "uniform") return [](double x) { return x; };
  if (name == "square") return [](double x) { return x * x; };
  throw ldb::Error(ldb::ErrorKind::InvalidArgs, "unknown cdf '" + name + "' (uniform|square)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model-size bounds, constructions and experiments for learned database operations"};
  app.require_subcommand(1);

  std::string op_name = "index";
  std::string norm_name = "l1";
  std::string side_name = "lower";
  std::uint64_t n = 0;
  std::uint64_t d = 1;
  double eps = 0.0;
  std::optional<std::uint64_t> u;

  auto* bounds = app.add_subcommand("bounds", "Evaluate a lower or upper model-size bound in bits");
  bounds->add_option("--op", op_name, "index|ce|rs")->required();
  bounds->add_option("--norm", norm_name, "inf|l1|mu")->required();
  bounds->add_option("--side", side_name, "lower|upper")->required();
  bounds->add_option("--n", n)->required();
  bounds->add_option("--d", d);
  bounds->add_option("--eps", eps)->required();
  bounds->add_option("--u", u, "domain size (inf norm)");

  double sigma = 0.0;
  auto* epsstar = app.add_subcommand("eps-star", "Invert the lower bound for a bit budget");
  epsstar->add_option("--bits", sigma)->required();
  epsstar->add_option("--op", op_name)->required();
  epsstar->add_option("--norm", norm_name)->required();
  epsstar->add_option("--n", n)->required();
  epsstar->add_option("--d", d);
  epsstar->add_option("--u", u);

  std::string construction;
  std::size_t count = 50;
  std::size_t pairs = 50;
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  std::string cdf_name = "square";
  auto* cert = app.add_subcommand("certify", "Generate a packing family and certify its separation");
  cert->add_option("--construction", construction, "packing-linf|packing-l1-index|packing-l1-ce|packing-mu")
      ->required();
  cert->add_option("--op", op_name, "operation for packing-linf");
  cert->add_option("--n", n)->required();
  cert->add_option("--d", d);
  cert->add_option("--eps", eps, "eps (delta for packing-l1-ce)")->required();
  cert->add_option("--u", u);
  cert->add_option("--count", count);
  cert->add_option("--pairs", pairs);
  cert->add_option("--samples", samples, "Monte Carlo samples per pair");
  cert->add_option("--seed", seed);
  cert->add_option("--cdf", cdf_name, "query measure for packing-mu: uniform|square");

  std::string input;
  std::string output;
  auto* enc = app.add_subcommand("encode", "Quantize a CSV dataset and write its cover code");
  enc->add_option("--op", op_name)->required();
  enc->add_option("--eps", eps)->required();
  enc->add_option("--input", input)->required();
  enc->add_option("--out", output)->required();

  auto* dec = app.add_subcommand("decode", "Decode a cover code back to CSV");
  dec->add_option("--input", input)->required();
  dec->add_option("--out", output)->required();

  std::string model_name;
  std::optional<std::size_t> sample_m;
  ldb::TrainConfig tc;
  std::size_t eval_queries = 10000;
  std::string checkpoint;
  auto* tr = app.add_subcommand("train", "Train one model on a CSV dataset and report its errors");
  tr->add_option("--model", model_name, "linear|nn-s1|nn-s2|sample")->required();
  tr->add_option("--op", op_name)->required();
  tr->add_option("--data", input)->required();
  tr->add_option("--m", sample_m, "sample size (defaults to the linear model's bits)");
  tr->add_option("--steps", tc.steps);
  tr->add_option("--batch-size", tc.batch_size);
  tr->add_option("--lr", tc.learning_rate);
  tr->add_option("--momentum", tc.momentum);
  tr->add_option("--query-seed", tc.query_seed);
  tr->add_option("--init-seed", tc.init_seed);
  tr->add_option("--eval-queries", eval_queries);
  tr->add_option("--checkpoint", checkpoint, "write the trained model as JSON");

  std::string config_path;
  std::string plot_path;
  auto* exp = app.add_subcommand("experiment", "Run an experiment grid");
  exp->add_option("--config", config_path)->required();
  exp->add_option("--out", output)->required();
  exp->add_option("--plot", plot_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kValidationError;
  }

  try {
    if (bounds->parsed()) {
      ldb::BoundRequest req;
      req.op = ldb::parse_op(op_name);
      req.norm = ldb::parse_norm(norm_name);
      req.side = ldb::parse_side(side_name);
      req.n = n;
      req.d = d;
      req.eps = eps;
      req.u = u;
      const auto r = ldb::bound_bits(req);
      ordered_json j;
      j["bits"] = r.bits;
      j["formula_id"] = ldb::to_string(r.formula);
      j["validity"] = ldb::to_string(r.validity);
      if (!r.reason.empty()) j["reason"] = r.reason;
      print(j);
      return r.validity == ldb::Validity::OutOfRange ? kValidationError : 0;
    }

    if (epsstar->parsed()) {
      const auto r = ldb::eps_star(sigma, ldb::parse_op(op_name), ldb::parse_norm(norm_name), n, d, u);
      ordered_json j;
      j["eps_star"] = r.eps;
      j["flag"] = ldb::to_string(r.flag);
      j["formula_id"] = ldb::to_string(r.formula);
      j["validity"] = "in_range";
      j["eps_min"] = r.eps_min;
      j["eps_max"] = r.eps_max;
      print(j);
      return 0;
    }

    if (cert->parsed()) {
      ldb::PackingFamily fam;
      if (construction == "packing-linf") {
        if (!u) throw ldb::Error(ldb::ErrorKind::InvalidArgs, "packing-linf needs --u");
        fam = ldb::packing_linf(ldb::parse_op(op_name), n, d, eps, *u, count, seed);
      } else if (construction == "packing-l1-index") {
        fam = ldb::packing_l1_index(n, eps, count, seed);
      } else if (construction == "packing-l1-ce") {
        fam = ldb::packing_l1_ce(n, d, eps, count, seed);
      } else if (construction == "packing-mu") {
        fam = ldb::packing_mu_index(n, eps, named_cdf(cdf_name), count, seed);
      } else {
        throw ldb::Error(ldb::ErrorKind::InvalidArgs, "unknown construction '" + construction + "'");
      }
      const auto c = ldb::certify(fam, pairs, samples, seed);
      ordered_json j;
      j["construction"] = construction;
      j["members"] = fam.datasets.size();
      j["claimed_separation"] = fam.claimed_separation;
      j["rule"] = fam.rule == ldb::SeparationRule::Strict ? "strict" : "inclusive";
      j["log2_available"] = fam.log2_available;
      j["pairs_checked"] = c.pairs_checked;
      j["min_observed"] = number_or_null(c.min_observed);
      j["method"] = ldb::to_string(c.method);
      if (c.method == ldb::CertMethod::MonteCarlo) {
        j["samples"] = c.samples;
        j["confidence_z"] = c.confidence_z;
      }
      j["pass"] = c.pass;
      print(j);
      return c.pass ? 0 : kRuntimeError;
    }

    if (enc->parsed()) {
      const ldb::OpKind op = ldb::parse_op(op_name);
      ldb::Dataset data = ldb::read_csv(input);
      const auto code = ldb::cover_encode(data, eps, op);
      ldb::write_code(code, output);
      ordered_json j;
      j["op"] = ldb::to_string(op);
      j["n"] = code.n;
      j["d"] = code.d;
      j["denominator"] = code.denominator;
      j["bit_length"] = code.bit_length;
      j["index"] = code.index.str();
      j["file_bytes"] = ldb::serialize(code).size();
      print(j);
      return 0;
    }

    if (dec->parsed()) {
      const auto code = ldb::read_code(input);
      const auto data = ldb::cover_decode(code);
      ldb::write_csv(data, output);
      ordered_json j;
      j["op"] = ldb::to_string(code.op);
      j["n"] = data.size();
      j["columns"] = data.dims();
      j["denominator"] = code.denominator;
      print(j);
      return 0;
    }

    if (tr->parsed()) {
      const ldb::OpKind op = ldb::parse_op(op_name);
      ldb::Dataset data = ldb::read_csv(input);
      if (op == ldb::OpKind::Index) data = ldb::sort_dataset_1d(data);
      const std::size_t pd = ldb::predicate_dims(op, data.dims());
      ldb::ModelEntry entry;
      if (model_name == "linear") {
        entry.kind = ldb::ModelKind::Linear;
      } else if (model_name == "nn-s1" || model_name == "nn-s2") {
        entry.kind = ldb::ModelKind::Mlp;
        entry.hidden_width = model_name == "nn-s1" ? 3 : 16;
      } else if (model_name == "sample") {
        entry.kind = ldb::ModelKind::Sample;
        entry.m = sample_m;
      } else {
        throw ldb::Error(ldb::ErrorKind::InvalidArgs, "unknown model '" + model_name + "'");
      }
      const ldb::ModelSpec spec = entry.resolve(op, pd);
      const auto result = ldb::train(ldb::init_model(spec, tc.init_seed), data, op, tc);
      const ldb::Predictor predictor = [&](const ldb::Query& q) { return result.model.predict(q); };
      ldb::EvalConfig ec;
      ec.samples = eval_queries;
      ec.seed = tc.query_seed ^ 0xE7A1ULL;
      const auto l1 = ldb::model_error(data, op, predictor, ldb::NormKind::l1(), ec);
      const auto linf = ldb::model_error(data, op, predictor, ldb::NormKind::linf(), ec);
      if (!checkpoint.empty()) {
        std::ofstream out(checkpoint);
        if (!out) throw ldb::Error(ldb::ErrorKind::IoError, "cannot write " + checkpoint);
        out << ldb::checkpoint_json(result.model) << "\n";
      }
      ordered_json j;
      j["model_id"] = spec.id();
      j["parameters"] = spec.parameter_count();
      j["model_bits"] = ldb::model_bits(result.model);
      j["final_loss"] = result.final_loss;
      j["l1_error"] = l1.value;
      j["l1_std_error"] = l1.std_error;
      j["linf_error"] = linf.value;
      print(j);
      return 0;
    }

    if (exp->parsed()) {
      const auto cfg = ldb::load_config(config_path);
      const auto result = ldb::run_experiment(cfg);
      for (const auto& f : result.failures) std::cerr << "cell " << f.cell << " failed: " << f.error << "\n";
      if (result.rows.empty()) throw ldb::Error(ldb::ErrorKind::IoError, "every cell failed");
      ldb::emit_csv(result.rows, output);
      if (!plot_path.empty()) ldb::emit_plot_data(result.rows, plot_path);
      ordered_json j;
      j["rows"] = result.rows.size();
      j["failed_cells"] = result.failures.size();
      j["csv"] = output;
      if (!plot_path.empty()) j["plot"] = plot_path;
      print(j);
      return result.failures.empty() ? 0 : kRuntimeError;
    }
  } catch (const ldb::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return 0;
}
