#pragma once

// Independent oracles shared by the unit tests and the acceptance runner.

#include <openssl/sha.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <string>
#include <unistd.h>
#include <vector>

#include "splitchain/bytes.hpp"
#include "splitchain/nn.hpp"
#include "splitchain/rng.hpp"

namespace splitchain::testing {

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t") {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("splitchain-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

inline std::array<std::uint8_t, 32> openssl_sha256(ByteView data) {
  std::array<std::uint8_t, 32> out{};
  SHA256(data.data(), data.size(), out.data());
  return out;
}

inline Bytes random_payload(Rng& rng, std::size_t max_len) {
  Bytes b(1 + rng.below(max_len));
  for (auto& v : b) v = static_cast<std::uint8_t>(rng.below(256));
  return b;
}

// Random biases too, so every parameter gets a non-trivial gradient.
inline nn::FfnnModel random_model(int n, std::uint64_t seed) {
  auto m = nn::init_model<double>(nn::standard_layer_dims(n), seed);
  Rng rng(derive_seed(seed, 7));
  for (auto& b : m.biases)
    for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = rng.uniform(-0.5, 0.5);
  return m;
}

template <typename To>
nn::Ffnn<To> cast_model(const nn::FfnnModel& m) {
  nn::Ffnn<To> out;
  out.layer_dims = m.layer_dims;
  out.hidden_activation = m.hidden_activation;
  out.output_activation = m.output_activation;
  out.rng_seed = m.rng_seed;
  for (const auto& w : m.weights) out.weights.push_back(w.cast<To>());
  for (const auto& b : m.biases) out.biases.push_back(b.cast<To>());
  return out;
}

// Central differences in long double, parameter by parameter.
inline nn::Gradients<long double> numeric_gradients(const nn::FfnnModel& model, const nn::MatrixXd& x,
                                                    const nn::VectorXd& y, long double h) {
  using LD = long double;
  nn::Ffnn<LD> m = cast_model<LD>(model);
  const nn::Matrix<LD> xl = x.cast<LD>();
  const nn::Vector<LD> yl = y.cast<LD>();
  auto loss = [&] { return nn::bce_loss<LD>(nn::forward<LD>(m, xl).probabilities(), yl); };
  nn::Gradients<LD> g;
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    nn::Matrix<LD> gw(m.weights[l].rows(), m.weights[l].cols());
    for (Eigen::Index r = 0; r < gw.rows(); ++r)
      for (Eigen::Index c = 0; c < gw.cols(); ++c) {
        LD& p = m.weights[l](r, c);
        const LD orig = p;
        p = orig + h;
        const LD up = loss();
        p = orig - h;
        const LD down = loss();
        p = orig;
        gw(r, c) = (up - down) / (2 * h);
      }
    nn::Vector<LD> gb(m.biases[l].size());
    for (Eigen::Index i = 0; i < gb.size(); ++i) {
      LD& p = m.biases[l][i];
      const LD orig = p;
      p = orig + h;
      const LD up = loss();
      p = orig - h;
      const LD down = loss();
      p = orig;
      gb[i] = (up - down) / (2 * h);
    }
    g.weights.push_back(gw);
    g.biases.push_back(gb);
  }
  return g;
}

inline double relative_error(double a, double b, double floor = 1e-8) {
  const double scale = std::max({std::abs(a), std::abs(b), floor});
  return std::abs(a - b) / scale;
}

inline double max_gradient_error(const nn::Gradients<double>& analytic, const nn::Gradients<long double>& numeric) {
  double worst = 0.0;
  for (std::size_t l = 0; l < analytic.weights.size(); ++l) {
    for (Eigen::Index i = 0; i < analytic.weights[l].size(); ++i)
      worst = std::max(worst, relative_error(analytic.weights[l].data()[i],
                                             static_cast<double>(numeric.weights[l].data()[i])));
    for (Eigen::Index i = 0; i < analytic.biases[l].size(); ++i)
      worst = std::max(worst, relative_error(analytic.biases[l][i], static_cast<double>(numeric.biases[l][i])));
  }
  return worst;
}

inline double gradient_check(int n, int samples, std::uint64_t seed) {
  const nn::FfnnModel model = random_model(n, seed);
  Rng rng(derive_seed(seed, 8));
  nn::MatrixXd x(samples, n);
  nn::VectorXd y(samples);
  for (int i = 0; i < samples; ++i) {
    for (int j = 0; j < n; ++j) x(i, j) = rng.normal();
    y[i] = static_cast<double>(rng.below(2));
  }
  const auto analytic = nn::loss_and_gradients<double>(model, x, y).grads;
  return max_gradient_error(analytic, numeric_gradients(model, x, y, 1e-5L));
}

// Rank-based AUC (Mann-Whitney), ties counted half.
inline double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });
  std::vector<double> rank(scores.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  double pos = 0, sum = 0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == 1) {
      pos += 1;
      sum += rank[i];
    }
  const double neg = static_cast<double>(labels.size()) - pos;
  return (sum - pos * (pos + 1) / 2) / (pos * neg);
}

}  // namespace splitchain::testing
