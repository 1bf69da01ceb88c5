#include "ldb/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "ldb/error.hpp"
#include "ldb/parallel.hpp"
#include "ldb/rng.hpp"

namespace ldb {

using nlohmann::json;

Dataset DistributionSpec::sample(std::size_t n, std::size_t cols, std::uint64_t seed) const {
  return kind == Kind::Uniform ? sample_uniform(n, cols, seed) : sample_gmm(n, cols, gmm, seed);
}

ModelSpec ModelEntry::resolve(OpKind op, std::size_t d) const {
  const std::size_t in = input_dim_for(op, d);
  ModelSpec spec;
  switch (kind) {
    case ModelKind::Linear: spec = ModelSpec::linear(in); break;
    case ModelKind::Mlp: spec = ModelSpec::mlp(hidden_width, in); break;
    case ModelKind::Sample: {
      const std::size_t cols = record_dims(op, d);
      const std::size_t linear_params = in + 1;
      spec = ModelSpec::sample(m ? *m : (linear_params + cols - 1) / cols, in);
      break;
    }
  }
  spec.param_precision_bits = param_precision_bits;
  spec.validate();
  return spec;
}

void ExperimentConfig::validate() const {
  if (ops.empty() || norms.empty() || distributions.empty() || n_values.empty() || models.empty()) {
    throw Error(ErrorKind::InvalidArgs, "ops, norms, distributions, n_values and models must be non-empty");
  }
  if (!std::is_sorted(n_values.begin(), n_values.end())) {
    throw Error(ErrorKind::InvalidArgs, "n_values must be sorted ascending");
  }
  if (n_values.front() < 1) throw Error(ErrorKind::InvalidArgs, "n must be at least 1");
  if (d < 1) throw Error(ErrorKind::InvalidArgs, "d must be at least 1");
  for (NormTag t : norms) {
    if (t == NormTag::Mu) throw Error(ErrorKind::InvalidArgs, "experiments support the l1 and inf norms");
  }
  for (const auto& dist : distributions) {
    if (dist.kind == DistributionSpec::Kind::Gmm) dist.gmm.validate();
  }
  if (datasets_per_cell < 1 || eval_queries < 1) {
    throw Error(ErrorKind::InvalidArgs, "datasets_per_cell and eval_queries must be at least 1");
  }
  if (u < 1) throw Error(ErrorKind::InvalidArgs, "domain size u must be at least 1");
  train.validate();
}

namespace {

ModelEntry parse_model(const json& j) {
  ModelEntry e;
  std::string kind;
  if (j.is_string()) {
    kind = j.get<std::string>();
  } else {
    kind = j.at("kind").get<std::string>();
    if (j.contains("param_precision_bits")) e.param_precision_bits = j.at("param_precision_bits");
  }
  if (kind == "linear") {
    e.kind = ModelKind::Linear;
  } else if (kind == "nn-s1" || kind == "nn-s2") {
    e.kind = ModelKind::Mlp;
    e.hidden_width = kind == "nn-s1" ? 3 : 16;
  } else if (kind == "mlp") {
    e.kind = ModelKind::Mlp;
    e.hidden_width = j.at("hidden_width");
  } else if (kind == "sample") {
    e.kind = ModelKind::Sample;
    if (j.is_object() && j.contains("m")) e.m = j.at("m").get<std::size_t>();
  } else {
    throw Error(ErrorKind::InvalidArgs, "unknown model kind '" + kind + "'");
  }
  return e;
}

DistributionSpec parse_distribution(const json& j) {
  DistributionSpec dist;
  const std::string kind = j.is_string() ? j.get<std::string>() : j.at("kind").get<std::string>();
  if (kind == "uniform") {
    dist.kind = DistributionSpec::Kind::Uniform;
    dist.name = "uniform";
  } else if (kind == "gmm") {
    dist.kind = DistributionSpec::Kind::Gmm;
    dist.name = "gmm";
    for (const auto& c : j.at("components")) {
      dist.gmm.components.push_back({c.at("weight"), c.at("mean"), c.at("sigma")});
    }
  } else {
    throw Error(ErrorKind::InvalidArgs, "unknown distribution kind '" + kind + "'");
  }
  if (j.is_object() && j.contains("name")) dist.name = j.at("name");
  if (dist.name.find_first_of(",\"\n") != std::string::npos) {
    throw Error(ErrorKind::InvalidArgs, "distribution names may not contain commas, quotes or newlines");
  }
  return dist;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  try {
    const json j = json::parse(text);
    for (const auto& op : j.at("ops")) cfg.ops.push_back(parse_op(op));
    for (const auto& nm : j.at("norms")) cfg.norms.push_back(parse_norm(nm));
    for (const auto& dist : j.at("distributions")) cfg.distributions.push_back(parse_distribution(dist));
    for (const auto& n : j.at("n_values")) cfg.n_values.push_back(n);
    for (const auto& m : j.at("models")) cfg.models.push_back(parse_model(m));
    cfg.d = j.value("d", std::uint64_t{1});
    cfg.datasets_per_cell = j.value("datasets_per_cell", cfg.datasets_per_cell);
    cfg.eval_queries = j.value("eval_queries", cfg.eval_queries);
    cfg.eval_grid = j.value("eval_grid", cfg.eval_grid);
    cfg.master_seed = j.value("master_seed", cfg.master_seed);
    cfg.u = j.value("u", cfg.u);
    cfg.threads = j.value("threads", cfg.threads);
    if (j.contains("train")) {
      const auto& t = j.at("train");
      cfg.train.steps = t.value("steps", cfg.train.steps);
      cfg.train.batch_size = t.value("batch_size", cfg.train.batch_size);
      cfg.train.learning_rate = t.value("learning_rate", cfg.train.learning_rate);
      cfg.train.momentum = t.value("momentum", cfg.train.momentum);
      cfg.train.query_seed = t.value("query_seed", cfg.train.query_seed);
      cfg.train.init_seed = t.value("init_seed", cfg.train.init_seed);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgs, std::string("malformed experiment config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

// One training unit: every norm of a cell is measured on the same trained
// models.
struct Unit {
  OpKind op;
  const DistributionSpec* dist;
  std::uint64_t n;
  ModelSpec spec;
};

std::uint64_t hash_key(const std::string& key) { return fnv1a64(key); }

std::vector<ResultRow> run_unit(const ExperimentConfig& cfg, const Unit& unit) {
  const std::string data_key = std::string(to_string(unit.op)) + "|" + unit.dist->name + "|" +
                               std::to_string(unit.n) + "|" + std::to_string(cfg.d);
  const std::string unit_key = data_key + "|" + unit.spec.id();
  const std::uint64_t data_seed = derive_seed(cfg.master_seed, hash_key("data|" + data_key));
  const std::uint64_t unit_seed = derive_seed(cfg.master_seed, hash_key(unit_key));
  const std::size_t cols = record_dims(unit.op, cfg.d);

  std::vector<double> worst(cfg.norms.size(), 0.0);
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < cfg.datasets_per_cell; ++i) {
    Dataset data = unit.dist->sample(unit.n, cols, derive_seed(data_seed, i));
    if (unit.op == OpKind::Index) data = sort_dataset_1d(data);

    TrainConfig tc = cfg.train;
    tc.query_seed = derive_seed(unit_seed, mix64(cfg.train.query_seed) ^ (2 * i + 1));
    tc.init_seed = derive_seed(unit_seed, mix64(cfg.train.init_seed) ^ (2 * i + 2));
    const TrainedModel init = init_model(unit.spec, tc.init_seed);
    const TrainedModel model = train(init, data, unit.op, tc).model;
    bits = model_bits(model);

    const Predictor predictor = [&model](const Query& q) { return model.predict(q); };
    for (std::size_t k = 0; k < cfg.norms.size(); ++k) {
      EvalConfig ec;
      ec.samples = cfg.eval_queries;
      ec.grid = cfg.eval_grid;
      ec.seed = derive_seed(unit_seed, 0x45564C00ULL + i);
      const NormKind norm{cfg.norms[k], {}};
      worst[k] = std::max(worst[k], model_error(data, unit.op, predictor, norm, ec).value);
    }
  }

  std::vector<ResultRow> rows;
  for (std::size_t k = 0; k < cfg.norms.size(); ++k) {
    ResultRow row;
    row.op = unit.op;
    row.norm = cfg.norms[k];
    row.distribution = unit.dist->name;
    row.n = unit.n;
    row.d = cfg.d;
    row.model_id = unit.spec.id();
    row.model_bits = bits;
    row.observed_err = worst[k];
    const auto u = row.norm == NormTag::LInf ? std::optional<std::uint64_t>(cfg.u) : std::nullopt;
    const EpsStar es = eps_star(static_cast<double>(bits), unit.op, row.norm, unit.n, cfg.d, u);
    row.eps_star = es.eps;
    row.eps_star_flag = es.flag;
    row.seed = unit_seed;
    row.exact = false;
    rows.push_back(row);
  }
  return rows;
}

std::tuple<int, int, std::string, std::uint64_t, std::string> row_key(const ResultRow& r) {
  return {static_cast<int>(r.op), static_cast<int>(r.norm), r.distribution, r.n, r.model_id};
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<Unit> units;
  for (OpKind op : cfg.ops) {
    if (op == OpKind::Index && cfg.d != 1) {
      throw Error(ErrorKind::InvalidArgs, "index experiments need d = 1");
    }
    for (const auto& dist : cfg.distributions) {
      for (std::uint64_t n : cfg.n_values) {
        for (const auto& entry : cfg.models) units.push_back({op, &dist, n, entry.resolve(op, cfg.d)});
      }
    }
  }

  std::vector<std::vector<ResultRow>> produced(units.size());
  std::vector<std::string> errors(units.size());
  parallel_for(
      units.size(),
      [&](std::size_t i) {
        try {
          produced[i] = run_unit(cfg, units[i]);
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      },
      cfg.threads);

  ExperimentResult result;
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (!errors[i].empty()) {
      const Unit& u = units[i];
      result.failures.push_back({std::string(to_string(u.op)) + "/" + u.dist->name + "/n=" +
                                     std::to_string(u.n) + "/" + u.spec.id(),
                                 errors[i]});
      continue;
    }
    result.rows.insert(result.rows.end(), produced[i].begin(), produced[i].end());
  }
  std::stable_sort(result.rows.begin(), result.rows.end(),
                   [](const ResultRow& a, const ResultRow& b) { return row_key(a) < row_key(b); });
  return result;
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : rows) {
    out += std::string(to_string(r.op)) + "," + to_string(r.norm) + "," + r.distribution + "," +
           std::to_string(r.n) + "," + std::to_string(r.d) + "," + r.model_id + "," +
           std::to_string(r.model_bits) + "," + format_double(r.observed_err) + "," +
           format_double(r.eps_star) + "," + std::to_string(r.seed) + "," +
           (r.exact ? "true" : "false") + "\n";
  }
  return out;
}

std::vector<ResultRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw Error(ErrorKind::IoError, "results CSV header mismatch");
  }
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 11) throw Error(ErrorKind::IoError, "results CSV row has wrong field count");
    try {
      ResultRow r;
      r.op = parse_op(f[0]);
      r.norm = parse_norm(f[1]);
      r.distribution = f[2];
      r.n = std::stoull(f[3]);
      r.d = std::stoull(f[4]);
      r.model_id = f[5];
      r.model_bits = std::stoull(f[6]);
      r.observed_err = std::stod(f[7]);
      r.eps_star = std::stod(f[8]);
      r.seed = std::stoull(f[9]);
      if (f[10] != "true" && f[10] != "false") throw Error(ErrorKind::IoError, "bad exact flag");
      r.exact = f[10] == "true";
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::IoError, "unparseable results CSV row: " + line);
    }
  }
  return rows;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "failed writing " + path.string());
}

}  // namespace

void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  if (rows.empty()) throw Error(ErrorKind::IoError, "no rows to write");
  write_text(path, to_csv(rows));
}

std::string plot_json(const std::vector<ResultRow>& rows) {
  using Key = std::tuple<int, int, std::string, std::string>;
  std::map<Key, std::vector<const ResultRow*>> groups;
  for (const auto& r : rows) {
    groups[{static_cast<int>(r.op), static_cast<int>(r.norm), r.distribution, r.model_id}].push_back(&r);
  }
  nlohmann::ordered_json series = nlohmann::ordered_json::array();
  for (auto& [key, members] : groups) {
    std::sort(members.begin(), members.end(), [](auto* a, auto* b) { return a->n < b->n; });
    for (const char* metric : {"observed_err", "eps_star"}) {
      const ResultRow& first = *members.front();
      nlohmann::ordered_json s;
      s["label"] = std::string(to_string(first.op)) + "/" + to_string(first.norm) + "/" +
                   first.distribution + "/" + first.model_id + "/" + metric;
      s["op"] = to_string(first.op);
      s["norm"] = to_string(first.norm);
      s["distribution"] = first.distribution;
      s["model_id"] = first.model_id;
      s["metric"] = metric;
      auto xs = nlohmann::ordered_json::array();
      auto ys = nlohmann::ordered_json::array();
      for (const ResultRow* r : members) {
        xs.push_back(r->n);
        ys.push_back(std::string(metric) == "eps_star" ? r->eps_star : r->observed_err);
      }
      s["x"] = xs;
      s["y"] = ys;
      series.push_back(s);
    }
  }
  nlohmann::ordered_json doc;
  doc["series"] = series;
  return doc.dump(2);
}

void emit_plot_data(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  if (rows.empty()) throw Error(ErrorKind::IoError, "no rows to write");
  write_text(path, plot_json(rows));
}

}  // namespace ldb
