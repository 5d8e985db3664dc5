#pragma once

// Dense feed-forward network with three rectified-linear hidden layers and a
// single logistic output, trained with Adam on binary cross-entropy.
//
// Layout conventions: a batch is a (samples x features) matrix, weights[l]
// is (inputs x outputs) and biases[l] has one entry per output, so a layer
// computes act(A * W + 1 * b^T).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "splitchain/error.hpp"
#include "splitchain/rng.hpp"

namespace splitchain::nn {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;

enum class Activation { Relu, Sigmoid };

inline constexpr int kLayerCount = 4;          // weight layers
inline constexpr int kRepresentationLayer = 3;  // index into layer_dims
inline constexpr double kProbabilityClamp = 1e-12;

template <typename Scalar>
struct Ffnn {
  std::vector<int> layer_dims;
  std::vector<Matrix<Scalar>> weights;
  std::vector<Vector<Scalar>> biases;
  Activation hidden_activation = Activation::Relu;
  Activation output_activation = Activation::Sigmoid;
  std::uint64_t rng_seed = 0;

  int input_width() const { return layer_dims.front(); }
  int representation_width() const { return layer_dims[kRepresentationLayer]; }
};

using FfnnModel = Ffnn<double>;

// The N, N, 2N, N, 1 pattern used by every model in the pipeline.
inline std::vector<int> standard_layer_dims(int input_width) {
  return {input_width, input_width, 2 * input_width, input_width, 1};
}

inline void validate_layer_dims(const std::vector<int>& dims) {
  if (dims.size() != kLayerCount + 1)
    fail(ErrorKind::Config, "expected 5 layer dimensions (input, 3 hidden, output), got " +
                                std::to_string(dims.size()));
  const int n = dims[0];
  if (n < 1 || dims[1] != n || dims[2] != 2 * n || dims[3] != n || dims[4] != 1)
    fail(ErrorKind::Config, "layer dimensions must follow N-N-2N-N-1");
}

template <typename Scalar>
void validate_shapes(const Ffnn<Scalar>& model) {
  if (model.layer_dims.size() != kLayerCount + 1 || model.weights.size() != kLayerCount ||
      model.biases.size() != kLayerCount)
    fail(ErrorKind::Shape, "model must have 4 weight layers");
  for (int l = 0; l < kLayerCount; ++l) {
    if (model.weights[l].rows() != model.layer_dims[l] ||
        model.weights[l].cols() != model.layer_dims[l + 1] ||
        model.biases[l].size() != model.layer_dims[l + 1])
      fail(ErrorKind::Shape, "layer " + std::to_string(l) + " parameters disagree with layer_dims");
  }
}

// He-uniform weights, zero biases.
template <typename Scalar = double>
Ffnn<Scalar> init_model(const std::vector<int>& layer_dims, std::uint64_t rng_seed) {
  validate_layer_dims(layer_dims);
  Ffnn<Scalar> model;
  model.layer_dims = layer_dims;
  model.rng_seed = rng_seed;
  Rng rng(rng_seed);
  for (int l = 0; l < kLayerCount; ++l) {
    const int fan_in = layer_dims[l];
    const double limit = std::sqrt(6.0 / fan_in);
    Matrix<Scalar> w(layer_dims[l], layer_dims[l + 1]);
    // Row-major fill order so the draw sequence matches the checkpoint layout.
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = static_cast<Scalar>(rng.uniform(-limit, limit));
    model.weights.push_back(std::move(w));
    model.biases.push_back(Vector<Scalar>::Zero(layer_dims[l + 1]));
  }
  return model;
}

template <typename Scalar>
Scalar sigmoid(Scalar z) {
  // Split by sign so exp never overflows.
  if (z >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-z));
  const Scalar e = std::exp(z);
  return e / (Scalar(1) + e);
}

template <typename Scalar>
struct ForwardPass {
  // activations[0] is the input batch, [1..3] the hidden layers, [4] the
  // output probabilities (samples x 1).
  std::vector<Matrix<Scalar>> activations;

  const Matrix<Scalar>& representation() const { return activations[kRepresentationLayer]; }
  Vector<Scalar> probabilities() const { return activations.back().col(0); }
};

template <typename Scalar>
void check_input(const Ffnn<Scalar>& model, const Eigen::Ref<const Matrix<Scalar>>& x) {
  if (x.cols() != model.input_width())
    fail(ErrorKind::Shape, "input width " + std::to_string(x.cols()) + " does not match model input " +
                               std::to_string(model.input_width()));
  if (!x.allFinite()) fail(ErrorKind::NumericInput, "input contains non-finite values");
}

template <typename Scalar>
ForwardPass<Scalar> forward(const Ffnn<Scalar>& model, const Eigen::Ref<const Matrix<Scalar>>& x) {
  validate_shapes(model);
  check_input(model, x);
  ForwardPass<Scalar> pass;
  pass.activations.reserve(kLayerCount + 1);
  pass.activations.emplace_back(x);
  for (int l = 0; l < kLayerCount; ++l) {
    Matrix<Scalar> z = pass.activations.back() * model.weights[l];
    z.rowwise() += model.biases[l].transpose();
    if (l + 1 < kLayerCount)
      z = z.cwiseMax(Scalar(0));
    else
      z = z.unaryExpr([](Scalar v) { return sigmoid(v); });
    pass.activations.push_back(std::move(z));
  }
  return pass;
}

// Mean binary cross-entropy with probabilities clamped to [eps, 1 - eps].
template <typename Scalar>
Scalar bce_loss(const Eigen::Ref<const Vector<Scalar>>& probs, const Eigen::Ref<const Vector<Scalar>>& y) {
  const Scalar eps = static_cast<Scalar>(kProbabilityClamp);
  Scalar total(0);
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    const Scalar p = std::clamp(probs[i], eps, Scalar(1) - eps);
    total -= y[i] * std::log(p) + (Scalar(1) - y[i]) * std::log(Scalar(1) - p);
  }
  return total / static_cast<Scalar>(probs.size());
}

template <typename Scalar>
struct Gradients {
  std::vector<Matrix<Scalar>> weights;
  std::vector<Vector<Scalar>> biases;
};

template <typename Scalar>
struct LossAndGradients {
  Scalar loss;
  Gradients<Scalar> grads;
};

// Backpropagation of the mean BCE loss over the batch.
template <typename Scalar>
LossAndGradients<Scalar> loss_and_gradients(const Ffnn<Scalar>& model,
                                            const Eigen::Ref<const Matrix<Scalar>>& x,
                                            const Eigen::Ref<const Vector<Scalar>>& y) {
  if (x.rows() == 0) fail(ErrorKind::EmptyInput, "empty batch");
  if (x.rows() != y.size()) fail(ErrorKind::Shape, "batch rows and labels disagree");
  const ForwardPass<Scalar> pass = forward(model, x);
  const Vector<Scalar> probs = pass.probabilities();

  LossAndGradients<Scalar> out;
  out.loss = bce_loss<Scalar>(probs, y);
  out.grads.weights.resize(kLayerCount);
  out.grads.biases.resize(kLayerCount);

  // Sigmoid + BCE collapses to (p - y) at the output pre-activation.
  Matrix<Scalar> delta = (probs - y) / static_cast<Scalar>(x.rows());
  for (int l = kLayerCount - 1; l >= 0; --l) {
    const Matrix<Scalar>& input = pass.activations[l];
    out.grads.weights[l] = input.transpose() * delta;
    out.grads.biases[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      Matrix<Scalar> upstream = delta * model.weights[l].transpose();
      delta = upstream.cwiseProduct(
          input.unaryExpr([](Scalar a) { return a > Scalar(0) ? Scalar(1) : Scalar(0); }));
    }
  }
  return out;
}

struct TrainConfig {
  int epochs = 50;
  int batch_size = 32;
  double learning_rate = 0.001;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t shuffle_seed = 0;

  void validate() const {
    if (epochs < 1) fail(ErrorKind::Config, "epochs must be >= 1");
    if (batch_size < 1) fail(ErrorKind::Config, "batch_size must be >= 1");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
      fail(ErrorKind::Config, "learning_rate must be a non-negative finite value");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
      fail(ErrorKind::Config, "Adam betas must lie in [0, 1)");
    if (!(adam_epsilon > 0.0)) fail(ErrorKind::Config, "Adam epsilon must be positive");
  }
};

struct TrainHistory {
  double initial_loss = 0.0;
  double initial_accuracy = 0.0;
  std::vector<double> loss;      // one entry per epoch, full training set
  std::vector<double> accuracy;  // same
};

template <typename Scalar>
struct TrainResult {
  Ffnn<Scalar> model;
  TrainHistory history;
};

template <typename Scalar>
double batch_accuracy(const Eigen::Ref<const Vector<Scalar>>& probs, const Eigen::Ref<const Vector<Scalar>>& y) {
  Eigen::Index hits = 0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    const Scalar cls = probs[i] >= Scalar(0.5) ? Scalar(1) : Scalar(0);
    hits += cls == y[i];
  }
  return static_cast<double>(hits) / static_cast<double>(probs.size());
}

template <typename Scalar>
void check_labels(const Eigen::Ref<const Vector<Scalar>>& y) {
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y[i] != Scalar(0) && y[i] != Scalar(1))
      fail(ErrorKind::Label, "label at row " + std::to_string(i) + " is not 0 or 1");
}

template <typename Scalar>
TrainResult<Scalar> train(Ffnn<Scalar> model, const Eigen::Ref<const Matrix<Scalar>>& x,
                          const Eigen::Ref<const Vector<Scalar>>& y, const TrainConfig& cfg) {
  cfg.validate();
  validate_shapes(model);
  if (x.rows() == 0) fail(ErrorKind::EmptyInput, "training set is empty");
  if (x.rows() != y.size()) fail(ErrorKind::Shape, "features and labels have different row counts");
  check_input(model, x);
  check_labels<Scalar>(y);

  const Scalar lr = static_cast<Scalar>(cfg.learning_rate);
  const Scalar b1 = static_cast<Scalar>(cfg.adam_beta1);
  const Scalar b2 = static_cast<Scalar>(cfg.adam_beta2);
  const Scalar eps = static_cast<Scalar>(cfg.adam_epsilon);

  Gradients<Scalar> m1, m2;
  for (int l = 0; l < kLayerCount; ++l) {
    m1.weights.push_back(Matrix<Scalar>::Zero(model.weights[l].rows(), model.weights[l].cols()));
    m1.biases.push_back(Vector<Scalar>::Zero(model.biases[l].size()));
  }
  m2 = m1;

  TrainHistory history;
  {
    const Vector<Scalar> p0 = forward(model, x).probabilities();
    history.initial_loss = static_cast<double>(bce_loss<Scalar>(p0, y));
    history.initial_accuracy = batch_accuracy<Scalar>(p0, y);
  }

  Rng rng(cfg.shuffle_seed);
  const Eigen::Index n = x.rows();
  const Eigen::Index batch = std::min<Eigen::Index>(cfg.batch_size, n);
  long step = 0;
  Matrix<Scalar> xb;
  Vector<Scalar> yb;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const std::vector<std::size_t> order = rng.permutation(static_cast<std::size_t>(n));
    for (Eigen::Index start = 0; start < n; start += batch) {
      const Eigen::Index len = std::min(batch, n - start);
      xb.resize(len, x.cols());
      yb.resize(len);
      for (Eigen::Index i = 0; i < len; ++i) {
        const auto src = static_cast<Eigen::Index>(order[static_cast<std::size_t>(start + i)]);
        xb.row(i) = x.row(src);
        yb[i] = y[src];
      }
      const auto lg = loss_and_gradients<Scalar>(model, xb, yb);
      ++step;
      const Scalar c1 = Scalar(1) - std::pow(b1, static_cast<Scalar>(step));
      const Scalar c2 = Scalar(1) - std::pow(b2, static_cast<Scalar>(step));
      auto adam = [&](auto& param, auto& m, auto& v, const auto& g) {
        m = b1 * m + (Scalar(1) - b1) * g;
        v = b2 * v + (Scalar(1) - b2) * g.cwiseProduct(g);
        param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
      };
      for (int l = 0; l < kLayerCount; ++l) {
        adam(model.weights[l], m1.weights[l], m2.weights[l], lg.grads.weights[l]);
        adam(model.biases[l], m1.biases[l], m2.biases[l], lg.grads.biases[l]);
      }
    }
    const Vector<Scalar> p = forward(model, x).probabilities();
    history.loss.push_back(static_cast<double>(bce_loss<Scalar>(p, y)));
    history.accuracy.push_back(batch_accuracy<Scalar>(p, y));
  }
  return {std::move(model), std::move(history)};
}

template <typename Scalar>
struct Prediction {
  Vector<Scalar> probabilities;
  std::vector<int> classes;
};

// A probability of exactly 0.5 rounds up to class 1.
inline int classify(double probability) { return probability >= 0.5 ? 1 : 0; }

template <typename Scalar>
Prediction<Scalar> predict(const Ffnn<Scalar>& model, const Eigen::Ref<const Matrix<Scalar>>& x) {
  Prediction<Scalar> out;
  out.probabilities = forward(model, x).probabilities();
  out.classes.reserve(static_cast<std::size_t>(out.probabilities.size()));
  for (Eigen::Index i = 0; i < out.probabilities.size(); ++i)
    out.classes.push_back(classify(static_cast<double>(out.probabilities[i])));
  return out;
}

}  // namespace splitchain::nn
