// SPDX-License-Identifier: Apache-2.0
#include <beampred/error.hpp>
#include <beampred/mlp.hpp>

#include <doctest.h>

#include <gradcheck.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace beampred;

namespace {

LabeledExample example(std::initializer_list<double> x, std::size_t label, std::size_t q) {
  LabeledExample ex;
  ex.features = Eigen::VectorXd(static_cast<Eigen::Index>(x.size()));
  std::copy(x.begin(), x.end(), ex.features.data());
  ex.label = {label, q};
  return ex;
}

std::vector<LabeledExample> random_examples(Rng& rng, std::size_t n, std::size_t dim, std::size_t q) {
  std::vector<LabeledExample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].features = Eigen::VectorXd(static_cast<Eigen::Index>(dim));
    for (auto& v : out[i].features) v = rng.uniform();
    out[i].label = {rng.index(q), q};
    out[i].source_index = i;
  }
  return out;
}

bool same_parameters(const MlpModel& a, const MlpModel& b) {
  for (std::size_t l = 0; l < a.layers().size(); ++l) {
    if (a.layers()[l].weight != b.layers()[l].weight) return false;
    if (a.layers()[l].bias != b.layers()[l].bias) return false;
  }
  return true;
}

MlpArchitecture small(std::size_t in, std::vector<std::size_t> hidden, std::size_t out) {
  MlpArchitecture a;
  a.input_dim = in;
  a.hidden_dims = std::move(hidden);
  a.output_dim = out;
  return a;
}

}  // namespace

TEST_CASE("architecture and initialization") {
  const auto model = MlpModel::initialize(MlpArchitecture{}, 7);
  REQUIRE(model.layers().size() == 3);
  CHECK(model.layers()[0].weight.rows() == 512);
  CHECK(model.layers()[0].weight.cols() == 2);
  CHECK(model.layers()[2].weight.rows() == 32);
  CHECK(model.parameter_count() == 2 * 512 + 512 + 512 * 512 + 512 + 512 * 32 + 32);
  CHECK(model.layers()[1].bias.isZero());

  const auto& hidden = model.layers()[1].weight;
  const double hidden_var = hidden.array().square().mean();
  CHECK(hidden_var == doctest::Approx(2.0 / 512.0).epsilon(0.02));
  const auto& head = model.layers()[2].weight;
  CHECK(head.array().square().mean() == doctest::Approx(1.0).epsilon(0.05));

  CHECK_THROWS_AS(small(0, {4}, 3).validate(), std::invalid_argument);
  CHECK_THROWS_AS(small(2, {0}, 3).validate(), std::invalid_argument);
}

TEST_CASE("forward") {
  SUBCASE("zero model is uniform") {
    const auto model = MlpModel::zeros(small(3, {4}, 32));
    const auto p = forward(model, Eigen::Vector3d(0.2, 0.5, 0.9));
    for (double v : p) CHECK(v == doctest::Approx(1.0 / 32.0).epsilon(1e-12));
  }
  SUBCASE("softmax sums to one over random inputs") {
    Rng rng(101);
    const auto model = MlpModel::initialize(small(4, {16, 16}, 32), 3);
    for (int i = 0; i < 10000; ++i) {
      Eigen::VectorXd x(4);
      for (auto& v : x) v = rng.uniform(-50.0, 50.0);
      const auto p = forward(model, x);
      CHECK(std::abs(p.sum() - 1.0) <= 1e-9);
      CHECK(p.minCoeff() >= 0.0);
    }
  }
  SUBCASE("fixed seed gives identical output") {
    const auto a = MlpModel::initialize(small(2, {8}, 5), 42);
    const auto b = MlpModel::initialize(small(2, {8}, 5), 42);
    const Eigen::Vector2d x(0.3, 0.7);
    CHECK((forward(a, x) - forward(b, x)).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("batch and single forward agree") {
    const auto model = MlpModel::initialize(small(3, {6}, 4), 9);
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(3, 5);
    const auto batch = forward_batch(model, x);
    for (Eigen::Index c = 0; c < 5; ++c)
      CHECK((batch.col(c) - forward(model, x.col(c))).cwiseAbs().maxCoeff() <= 1e-12);
  }
  CHECK_THROWS_AS(forward(MlpModel::zeros(small(3, {4}, 5)), Eigen::Vector2d(1, 2)),
                  std::invalid_argument);
}

TEST_CASE("loss") {
  SUBCASE("uniform prediction costs ln Q") {
    const auto model = MlpModel::zeros(small(2, {4}, 32));
    const std::vector batch{example({0.1, 0.2}, 5, 32), example({0.9, 0.4}, 17, 32)};
    CHECK(loss_and_gradients(model, batch).loss ==
          doctest::Approx(std::log(32.0)).epsilon(1e-12));
    CHECK(std::log(32.0) == doctest::Approx(3.4657).epsilon(1e-4));
  }
  SUBCASE("a confident correct prediction has vanishing loss and output gradient") {
    auto model = MlpModel::zeros(small(1, {1}, 3));
    model.layers()[1].bias << 0.0, 800.0, 0.0;
    const std::vector batch{example({0.5}, 1, 3)};
    const auto lg = loss_and_gradients(model, batch);
    CHECK(lg.loss == doctest::Approx(0.0));
    CHECK(lg.gradients.layers[1].bias.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(lg.correct == 1);
  }
  SUBCASE("huge logits stay finite") {
    auto model = MlpModel::zeros(small(1, {1}, 3));
    model.layers()[1].bias << 1e6, -1e6, 0.0;
    const std::vector batch{example({0.5}, 1, 3)};
    const auto lg = loss_and_gradients(model, batch);
    CHECK(std::isfinite(lg.loss));
    CHECK(lg.loss == doctest::Approx(2e6));
  }
  CHECK_THROWS_AS(loss_and_gradients(MlpModel::zeros(small(1, {1}, 3)), std::span<const LabeledExample>{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(loss_and_gradients(MlpModel::zeros(small(1, {1}, 3)),
                                     std::vector{example({0.5}, 3, 3)}),
                  std::invalid_argument);
}

TEST_CASE("gradients match central differences") {
  SUBCASE("3-5-4 net, batch of two") {
    Rng rng(55);
    const auto model = MlpModel::initialize(small(3, {5}, 4), 55);
    Eigen::MatrixXd x(3, 2);
    for (auto& v : x.reshaped()) v = rng.uniform();
    const auto r = testing::check_gradients(model, x, {1, 3});
    CHECK(r.entries == 3 * 5 + 5 + 5 * 4 + 4);
    CHECK(r.max_relative_error < 1e-4);
  }
  SUBCASE("random small architectures") {
    Rng rng(1234);
    for (int trial = 0; trial < 20; ++trial) {
      const auto arch = testing::random_architecture(rng);
      const auto model = testing::random_model(arch, rng);
      const std::size_t batch = 1 + rng.index(6);
      Eigen::MatrixXd x(static_cast<Eigen::Index>(arch.input_dim), static_cast<Eigen::Index>(batch));
      for (auto& v : x.reshaped()) v = rng.uniform(-1.0, 1.0);
      std::vector<std::size_t> labels(batch);
      for (auto& y : labels) y = rng.index(arch.output_dim);
      CHECK(testing::check_gradients(model, x, labels).max_relative_error < 1e-4);
    }
  }
  SUBCASE("example and matrix forms agree") {
    Rng rng(8);
    const auto model = MlpModel::initialize(small(3, {4}, 5), 1);
    const auto batch = random_examples(rng, 6, 3, 5);
    Eigen::MatrixXd x(3, 6);
    std::vector<std::size_t> labels;
    for (std::size_t i = 0; i < 6; ++i) {
      x.col(static_cast<Eigen::Index>(i)) = batch[i].features;
      labels.push_back(batch[i].label.index);
    }
    const auto a = loss_and_gradients(model, batch);
    const auto b = loss_and_gradients(model, x, labels);
    CHECK(a.loss == doctest::Approx(b.loss).epsilon(1e-14));
    CHECK((a.gradients.layers[0].weight - b.gradients.layers[0].weight).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("adam") {
  SUBCASE("zero gradient is a fixed point") {
    auto model = MlpModel::initialize(small(2, {3}, 2), 4);
    const auto before = model;
    auto state = AdamState::zeros_like(model);
    Gradients zero;
    for (const auto& layer : model.layers())
      zero.layers.push_back({Eigen::MatrixXd::Zero(layer.weight.rows(), layer.weight.cols()),
                             Eigen::VectorXd::Zero(layer.bias.size())});
    adam_step(model, zero, state, 0.01);
    CHECK(state.step == 1);
    CHECK(same_parameters(model, before));
  }
  SUBCASE("first step of a unit gradient moves by about lr") {
    auto model = MlpModel::zeros(small(1, {1}, 1));
    auto state = AdamState::zeros_like(model);
    Gradients g;
    for (const auto& layer : model.layers())
      g.layers.push_back({Eigen::MatrixXd::Ones(layer.weight.rows(), layer.weight.cols()),
                          Eigen::VectorXd::Ones(layer.bias.size())});
    adam_step(model, g, state, 0.01);
    // 0.009999999900000002 from tests/oracles/derived_values.py
    CHECK(model.layers()[0].weight(0, 0) == doctest::Approx(-0.009999999900000002).epsilon(1e-12));
  }
  SUBCASE("identical gradient streams give identical trajectories") {
    auto a = MlpModel::initialize(small(2, {4}, 3), 6);
    auto b = a;
    auto sa = AdamState::zeros_like(a);
    auto sb = AdamState::zeros_like(b);
    Rng rng(3);
    const auto batch = random_examples(rng, 8, 2, 3);
    for (int step = 0; step < 10; ++step) {
      adam_step(a, loss_and_gradients(a, batch).gradients, sa, 0.01);
      adam_step(b, loss_and_gradients(b, batch).gradients, sb, 0.01);
    }
    CHECK(same_parameters(a, b));
  }
  SUBCASE("shape mismatch") {
    auto model = MlpModel::zeros(small(2, {3}, 2));
    auto state = AdamState::zeros_like(model);
    CHECK_THROWS_AS(adam_step(model, Gradients{}, state, 0.01), std::invalid_argument);
  }
}

TEST_CASE("learning-rate schedule") {
  TrainConfig cfg;
  CHECK(learning_rate_at(cfg, 0) == doctest::Approx(1e-2));
  CHECK(learning_rate_at(cfg, 19) == doctest::Approx(1e-2));
  CHECK(learning_rate_at(cfg, 20) == doctest::Approx(1e-3));
  CHECK(learning_rate_at(cfg, 40) == doctest::Approx(1e-4));
  CHECK(learning_rate_at(cfg, 79) == doctest::Approx(1e-4));
  CHECK(learning_rate_at(cfg, 80) == doctest::Approx(1e-5));
  CHECK(learning_rate_at(cfg, 99) == doctest::Approx(1e-5));
  cfg.lr_factor = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = TrainConfig{};
  cfg.epochs = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = TrainConfig{};
  cfg.initial_lr = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("training") {
  SUBCASE("separable toy set is fit exactly") {
    const std::vector toy{example({0.0, 0.0}, 0, 2), example({0.1, 0.2}, 0, 2),
                          example({1.0, 1.0}, 1, 2), example({0.9, 0.8}, 1, 2)};
    TrainConfig cfg;
    cfg.seed = 5;
    const auto result = train(MlpModel::initialize(small(2, {16, 16}, 2), 5), toy, cfg);
    REQUIRE(result.history.size() == 100);
    CHECK(result.history.back().top1 == 1.0);
    for (const auto& ex : toy) CHECK(predict_topk(result.model, ex.features, 1)[0] == ex.label);
  }

  Rng rng(77);
  const auto data = random_examples(rng, 70, 3, 4);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.seed = 19;
  const auto init = MlpModel::initialize(small(3, {8}, 4), 2);

  SUBCASE("fixed seed is bitwise reproducible") {
    CHECK(same_parameters(train(init, data, cfg).model, train(init, data, cfg).model));
  }
  SUBCASE("input order does not matter") {
    auto shuffled = data;
    Rng perm(4);
    perm.shuffle(std::span<LabeledExample>(shuffled));
    CHECK(same_parameters(train(init, data, cfg).model, train(init, shuffled, cfg).model));
  }
  SUBCASE("zero learning rate leaves the parameters unchanged") {
    cfg.initial_lr = 0.0;
    const auto result = train(init, data, cfg);
    CHECK(same_parameters(result.model, init));
  }
  SUBCASE("history records the schedule") {
    cfg.epochs = 3;
    cfg.lr_decay_epochs = {1};
    const auto result = train(init, data, cfg);
    REQUIRE(result.history.size() == 3);
    CHECK(result.history[0].learning_rate == doctest::Approx(1e-2));
    CHECK(result.history[1].learning_rate == doctest::Approx(1e-3));
    for (const auto& e : result.history) {
      CHECK(std::isfinite(e.loss));
      CHECK(e.top1 >= 0.0);
      CHECK(e.top1 <= 1.0);
    }
  }
  SUBCASE("a partial last batch is used") {
    cfg.batch_size = 64;  // 70 examples -> batches of 64 and 6
    cfg.epochs = 1;
    cfg.initial_lr = 0.0;
    CHECK_NOTHROW(train(init, data, cfg));
  }
  SUBCASE("divergence is reported") {
    cfg.initial_lr = 1e300;
    cfg.epochs = 3;
    CHECK_THROWS_AS(train(init, data, cfg), NumericError);
  }
  CHECK_THROWS_AS(train(init, std::span<const LabeledExample>{}, cfg), std::invalid_argument);
}

TEST_CASE("predict top-k") {
  const auto uniform = MlpModel::zeros(small(2, {3}, 6));
  const Eigen::Vector2d x(0.4, 0.6);
  const auto top3 = predict_topk(uniform, x, 3);
  REQUIRE(top3.size() == 3);
  CHECK(top3[0].index == 0);
  CHECK(top3[1].index == 1);
  CHECK(top3[2].index == 2);

  const auto model = MlpModel::initialize(small(2, {8}, 6), 13);
  const auto all = predict_topk(model, x, 6);
  std::vector<std::size_t> idx;
  for (const auto& l : all) idx.push_back(l.index);
  std::sort(idx.begin(), idx.end());
  CHECK(idx == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
  for (std::size_t k = 1; k <= 6; ++k) {
    const auto prefix = predict_topk(model, x, k);
    CHECK(std::equal(prefix.begin(), prefix.end(), all.begin()));
  }
  CHECK_THROWS_AS(predict_topk(model, x, 0), std::invalid_argument);
  CHECK_THROWS_AS(predict_topk(model, x, 7), std::invalid_argument);
}
