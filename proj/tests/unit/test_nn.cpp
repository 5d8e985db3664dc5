#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "splitchain/error.hpp"
#include "splitchain/nn.hpp"

using namespace splitchain;
using namespace splitchain::nn;

namespace {

// 2-2-4-2-1 network with hand-picked parameters.
FfnnModel hand_model() {
  FfnnModel m = init_model<double>(standard_layer_dims(2), 1);
  m.weights[0] = (MatrixXd(2, 2) << 1, 0, 0, 1).finished();
  m.biases[0] = (VectorXd(2) << 0, -3).finished();
  m.weights[1] = (MatrixXd(2, 4) << 1, 2, -1, 0.5, 1, 1, 1, 1).finished();
  m.biases[1] = VectorXd::Zero(4);
  m.weights[2] = (MatrixXd(4, 2) << 1, 0, 0, 1, 1, 1, 2, -2).finished();
  m.biases[2] = (VectorXd(2) << 0, 0.5).finished();
  m.weights[3] = (MatrixXd(2, 1) << 0.5, -1).finished();
  m.biases[3] = (VectorXd(1) << 0.25).finished();
  return m;
}

}  // namespace

TEST_CASE("forward pass matches a hand computation") {
  const FfnnModel m = hand_model();
  const MatrixXd x = (MatrixXd(1, 2) << 1, 2).finished();
  const auto pass = forward<double>(m, x);
  // h1 = relu(1, -1) = (1, 0); h2 = relu(1, 2, -1, 0.5); h3 = (2, 1.5); z = -0.25
  CHECK(pass.activations[1].row(0) == (MatrixXd(1, 2) << 1, 0).finished());
  CHECK(pass.activations[2].row(0) == (MatrixXd(1, 4) << 1, 2, 0, 0.5).finished());
  CHECK(pass.representation().row(0) == (MatrixXd(1, 2) << 2, 1.5).finished());
  CHECK(pass.probabilities()[0] == doctest::Approx(1.0 / (1.0 + std::exp(0.25))).epsilon(1e-15));
  CHECK(pass.probabilities()[0] == doctest::Approx(0.43782350042481233));
}

TEST_CASE("layer dims and init") {
  CHECK(standard_layer_dims(10) == std::vector<int>{10, 10, 20, 10, 1});
  CHECK_THROWS_AS(validate_layer_dims({3, 3, 5, 3, 1}), Error);
  CHECK_THROWS_AS(validate_layer_dims({3, 3, 6, 3}), Error);
  const auto a = init_model<double>(standard_layer_dims(4), 99);
  const auto b = init_model<double>(standard_layer_dims(4), 99);
  const auto c = init_model<double>(standard_layer_dims(4), 100);
  for (int l = 0; l < kLayerCount; ++l) {
    CHECK(a.weights[l] == b.weights[l]);
    CHECK(a.biases[l].isZero());
    const double limit = std::sqrt(6.0 / a.layer_dims[l]);
    CHECK(a.weights[l].cwiseAbs().maxCoeff() <= limit);
  }
  CHECK(a.weights[0] != c.weights[0]);
}

TEST_CASE("input validation") {
  const FfnnModel m = init_model<double>(standard_layer_dims(3), 1);
  try {
    forward<double>(m, MatrixXd::Zero(2, 4));
    FAIL("expected a shape error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Shape);
  }
  MatrixXd bad = MatrixXd::Zero(2, 3);
  bad(1, 2) = std::nan("");
  try {
    forward<double>(m, bad);
    FAIL("expected a numeric error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NumericInput);
  }
  const VectorXd y = (VectorXd(2) << 0, 2).finished();
  try {
    train<double>(m, MatrixXd::Zero(2, 3), y, TrainConfig{});
    FAIL("expected a label error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Label);
  }
}

TEST_CASE("analytic gradients agree with central differences") {
  for (std::uint64_t s = 0; s < 5; ++s) CHECK(testing::gradient_check(3, 8, 1000 + s) < 1e-4);
  CHECK(testing::gradient_check(5, 4, 77) < 1e-4);
}

TEST_CASE("float instantiation runs the same graph") {
  const auto md = init_model<double>(standard_layer_dims(3), 5);
  const auto mf = testing::cast_model<float>(md);
  const MatrixXd x = MatrixXd::Random(6, 3);
  const auto pd = forward<double>(md, x).probabilities();
  const auto pf = forward<float>(mf, Matrix<float>(x.cast<float>())).probabilities();
  for (Eigen::Index i = 0; i < pd.size(); ++i) CHECK(pf[i] == doctest::Approx(pd[i]).epsilon(1e-5));
}

TEST_CASE("bce loss clamps saturated probabilities") {
  const VectorXd p = (VectorXd(2) << 0.0, 1.0).finished();
  const VectorXd y = (VectorXd(2) << 1.0, 0.0).finished();
  const double loss = bce_loss<double>(p, y);
  CHECK(std::isfinite(loss));
  CHECK(loss == doctest::Approx(-std::log(1e-12)));
}

TEST_CASE("training separates linearly separable data") {
  Rng rng(3);
  const int n = 400;
  MatrixXd x(n, 2);
  VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = rng.normal();
    x(i, 1) = rng.normal();
    const double margin = x(i, 0) + 0.5 * x(i, 1);
    if (std::abs(margin) < 0.2) x(i, 0) += margin > 0 ? 0.4 : -0.4;
    y[i] = x(i, 0) + 0.5 * x(i, 1) > 0 ? 1.0 : 0.0;
  }
  TrainConfig cfg;
  cfg.epochs = 60;
  cfg.learning_rate = 0.01;
  cfg.shuffle_seed = 4;
  const auto result = train<double>(init_model<double>(standard_layer_dims(2), 9), x, y, cfg);
  CHECK(result.history.accuracy.back() >= 0.99);
  CHECK(result.history.loss.back() < result.history.initial_loss);
  CHECK(result.history.loss.size() == 60);
}

TEST_CASE("zero learning rate leaves parameters untouched") {
  const auto m = init_model<double>(standard_layer_dims(3), 2);
  const MatrixXd x = MatrixXd::Random(40, 3);
  VectorXd y(40);
  for (int i = 0; i < 40; ++i) y[i] = i % 2;
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.learning_rate = 0.0;
  const auto r = train<double>(m, x, y, cfg);
  for (int l = 0; l < kLayerCount; ++l) {
    CHECK(r.model.weights[l] == m.weights[l]);
    CHECK(r.model.biases[l] == m.biases[l]);
  }
}

TEST_CASE("training is deterministic in its seeds") {
  const auto m = init_model<double>(standard_layer_dims(3), 2);
  const MatrixXd x = MatrixXd::Random(70, 3);
  VectorXd y(70);
  for (int i = 0; i < 70; ++i) y[i] = x(i, 0) > 0;
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.shuffle_seed = 12;
  const auto a = train<double>(m, x, y, cfg);
  const auto b = train<double>(m, x, y, cfg);
  CHECK(a.model.weights[0] == b.model.weights[0]);
  CHECK(a.history.loss == b.history.loss);
  cfg.shuffle_seed = 13;
  const auto c = train<double>(m, x, y, cfg);
  CHECK(c.model.weights[0] != a.model.weights[0]);
}

TEST_CASE("classification threshold") {
  CHECK(classify(0.5) == 1);
  CHECK(classify(std::nextafter(0.5, 0.0)) == 0);
  CHECK(classify(0.0) == 0);
  CHECK(classify(1.0) == 1);
}
