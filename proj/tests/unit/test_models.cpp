#include <doctest.h>

#include <cmath>

#include "ldb/error.hpp"
#include "ldb/models.hpp"

using namespace ldb;

TEST_CASE("model specs") {
  CHECK(ModelSpec::linear(1).parameter_count() == 2);
  CHECK(ModelSpec::linear(4).parameter_count() == 5);
  CHECK(ModelSpec::named("nn-s1", 1).parameter_count() == 10);
  CHECK(ModelSpec::named("nn-s2", 1).parameter_count() == 49);
  CHECK(ModelSpec::named("nn-s1", 2).parameter_count() == 13);
  CHECK(ModelSpec::named("nn-s1", 1).id() == "nn-s1");
  CHECK(ModelSpec::mlp(5, 1).id() == "mlp-h5");
  CHECK(ModelSpec::sample(7, 1).id() == "sample-m7");
  CHECK(input_dim_for(OpKind::Index, 1) == 1);
  CHECK(input_dim_for(OpKind::CardEst, 3) == 6);
  CHECK_THROWS_AS(ModelSpec::named("nope", 1), Error);
  CHECK_THROWS_AS(ModelSpec::sample(0, 1).validate(), Error);
}

TEST_CASE("model bits") {
  auto lin = init_model(ModelSpec::linear(1), 1);
  CHECK(model_bits(lin) == 64);
  auto s = init_model(ModelSpec::sample(3, 4), 1);
  s.op = OpKind::CardEst;
  CHECK(model_bits(s) == 3 * 2 * 32);
  s.op = OpKind::RangeSum;
  CHECK(model_bits(s) == 3 * 3 * 32);
}

TEST_CASE("init and forward") {
  const auto lin = init_model(ModelSpec::linear(1), 3);
  CHECK(lin.forward({0.3}) == 0.5);
  const auto a = init_model(ModelSpec::named("nn-s2", 2), 9);
  const auto b = init_model(ModelSpec::named("nn-s2", 2), 9);
  CHECK(a.parameters == b.parameters);
  CHECK(a.parameters.size() == a.spec.parameter_count());
}

TEST_CASE("gradient check") {
  Rng rng(50);
  for (const char* name : {"linear", "nn-s1", "nn-s2"}) {
    for (std::size_t dim : {1u, 2u, 4u}) {
      for (int t = 0; t < 20; ++t) {
        auto model = init_model(ModelSpec::named(name, dim), rng.next_u64());
        for (auto& p : model.parameters) p += 0.3 * rng.normal();
        std::vector<double> x(dim);
        for (auto& v : x) v = rng.uniform();
        const auto rep = grad_check(model, x, rng.uniform(), 1e-4);
        CHECK(rep.pass);
        CHECK(rep.checked + rep.skipped_kinks == model.parameters.size());
      }
    }
  }
}

TEST_CASE("training reduces the loss and is deterministic") {
  const auto data = sort_dataset_1d(sample_uniform(500, 1, 4));
  TrainConfig cfg;
  cfg.steps = 2000;
  cfg.batch_size = 64;
  const auto init = init_model(ModelSpec::named("nn-s1", 1), cfg.init_seed);
  const auto r1 = train(init, data, OpKind::Index, cfg);
  const auto r2 = train(init, data, OpKind::Index, cfg);
  CHECK(r1.model.parameters == r2.model.parameters);
  CHECK(r1.loss_trace.size() == 2000);
  CHECK(r1.final_loss < r1.loss_trace.front());
  // Linear fit to a uniform CDF is nearly exact.
  const auto lin = train(init_model(ModelSpec::linear(1), 1), data, OpKind::Index, cfg);
  CHECK(std::abs(lin.model.predict(RankQuery{0.5}) - 250.0) < 25.0);

  TrainConfig bad = cfg;
  bad.learning_rate = 1e6;
  try {
    train(init, data, OpKind::Index, bad);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DivergenceDetected);
  }
  bad = cfg;
  bad.momentum = 1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("sample models") {
  const auto data = sort_dataset_1d(sample_uniform(50, 1, 6));
  TrainConfig cfg;
  const auto full = train(init_model(ModelSpec::sample(50, 1), 0), data, OpKind::Index, cfg).model;
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const double q = rng.uniform();
    CHECK(full.predict(RankQuery{q}) == static_cast<double>(rank(data, q)));
  }
  const auto part = train(init_model(ModelSpec::sample(10, 1), 0), data, OpKind::Index, cfg).model;
  REQUIRE(part.sample.has_value());
  CHECK(part.sample->size() == 10);
  CHECK(part.predict(RankQuery{1.0}) == 50.0);

  const auto ce = sample_uniform(40, 2, 7);
  const auto m = train(init_model(ModelSpec::sample(40, 4), 0), ce, OpKind::CardEst, cfg).model;
  for (int t = 0; t < 200; ++t) {
    const auto q = sample_query(OpKind::CardEst, 2, rng);
    CHECK(m.predict(q) == static_cast<double>(cardinality(ce, std::get<RangeQuery>(q))));
  }
}

TEST_CASE("checkpoint round trip") {
  const auto data = sort_dataset_1d(sample_uniform(100, 1, 8));
  TrainConfig cfg;
  cfg.steps = 100;
  const auto model = train(init_model(ModelSpec::named("nn-s2", 1), 1), data, OpKind::Index, cfg).model;
  const auto back = load_checkpoint(checkpoint_json(model));
  CHECK(back.parameters == model.parameters);
  CHECK(back.n_train == model.n_train);
  CHECK(back.spec.id() == model.spec.id());
  CHECK(back.predict(RankQuery{0.37}) == model.predict(RankQuery{0.37}));

  const auto s = train(init_model(ModelSpec::sample(5, 1), 0), data, OpKind::Index, cfg).model;
  const auto sb = load_checkpoint(checkpoint_json(s));
  REQUIRE(sb.sample.has_value());
  CHECK(*sb.sample == *s.sample);
  CHECK(sb.predict(RankQuery{0.5}) == s.predict(RankQuery{0.5}));
  CHECK_THROWS(load_checkpoint("{}"));
}
