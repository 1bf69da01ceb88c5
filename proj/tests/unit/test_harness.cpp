#include <doctest.h>

#include <json.hpp>

#include "ldb/error.hpp"
#include "ldb/harness.hpp"

using namespace ldb;

namespace {

const char* kSmallConfig = R"({
  "ops": ["index", "ce"],
  "norms": ["l1", "inf"],
  "distributions": ["uniform",
    {"kind": "gmm", "name": "bimodal",
     "components": [{"weight": 0.5, "mean": 0.3, "sigma": 0.05},
                    {"weight": 0.5, "mean": 0.7, "sigma": 0.05}]}],
  "n_values": [100, 400],
  "models": ["linear", "nn-s1", {"kind": "sample"}, {"kind": "mlp", "hidden_width": 2}],
  "eval_queries": 500,
  "master_seed": 11,
  "train": {"steps": 200, "batch_size": 32}
})";

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = parse_config(kSmallConfig);
  CHECK(cfg.ops.size() == 2);
  CHECK(cfg.norms[1] == NormTag::LInf);
  CHECK(cfg.distributions[1].name == "bimodal");
  CHECK(cfg.distributions[1].gmm.components.size() == 2);
  CHECK(cfg.models.size() == 4);
  CHECK(cfg.models[3].hidden_width == 2);
  CHECK(cfg.train.steps == 200);
  CHECK(cfg.train.learning_rate == TrainConfig{}.learning_rate);

  // Sample without m gets the linear model's bit budget.
  const auto s = cfg.models[2].resolve(OpKind::Index, 1);
  CHECK(s.m == 2);
  const auto s2 = cfg.models[2].resolve(OpKind::CardEst, 2);
  CHECK(s2.m == 3);

  CHECK_THROWS_AS(parse_config("{"), Error);
  CHECK_THROWS_AS(parse_config(R"({"ops": ["x"], "norms": [], "distributions": [], "n_values": [], "models": []})"),
                  Error);
}

TEST_CASE("experiment end to end") {
  const auto cfg = parse_config(kSmallConfig);
  const auto res = run_experiment(cfg);
  CHECK(res.failures.empty());
  // 2 ops x 2 norms x 2 distributions x 2 sizes x 4 models
  CHECK(res.rows.size() == 64);
  for (const auto& r : res.rows) {
    CHECK(r.observed_err >= 0.0);
    CHECK(r.eps_star > 0.0);
    CHECK(r.model_bits > 0);
    if (r.model_id.rfind("sample", 0) == 0 && r.norm == NormTag::LInf) CHECK(r.observed_err >= 0.0);
  }
  // Deterministic across runs.
  const auto again = run_experiment(cfg);
  CHECK(to_csv(res.rows) == to_csv(again.rows));

  const auto csv = to_csv(res.rows);
  CHECK(csv.rfind(kCsvHeader, 0) == 0);
  const auto parsed = parse_csv(csv);
  REQUIRE(parsed.size() == res.rows.size());
  CHECK(to_csv(parsed) == csv);

  const auto plot = nlohmann::json::parse(plot_json(res.rows));
  // one series per (op, norm, dist, model) and metric
  CHECK(plot.at("series").size() == 64);
  CHECK(plot.at("series")[0].at("x").size() == 2);
}

TEST_CASE("csv emit") {
  CHECK_THROWS_AS(emit_csv({}, "/tmp/ldb_empty.csv"), Error);
  ResultRow r;
  r.distribution = "uniform";
  r.model_id = "linear";
  r.n = 10;
  r.observed_err = 0.1;
  r.eps_star = 0.2;
  const auto back = parse_csv(to_csv({r}));
  REQUIRE(back.size() == 1);
  CHECK(back[0].observed_err == 0.1);
  CHECK(back[0].model_id == "linear");
  CHECK_THROWS_AS(parse_csv("bad,header\n"), Error);
}
