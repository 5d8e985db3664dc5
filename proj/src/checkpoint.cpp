#include "splitchain/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "splitchain/numeric_text.hpp"

namespace splitchain::nn {

namespace {

constexpr std::string_view kMagic = "splitchain-ffnn";
constexpr int kVersion = 1;

Activation parse_activation(const std::string& tag) {
  if (tag == "relu") return Activation::Relu;
  if (tag == "sigmoid") return Activation::Sigmoid;
  fail(ErrorKind::Parse, "unknown activation tag '" + tag + "'");
}

double next_double(std::istringstream& in) {
  std::string token;
  if (!(in >> token)) fail(ErrorKind::Parse, "checkpoint truncated");
  auto v = parse_double(token);
  if (!v) fail(ErrorKind::Parse, "bad number '" + token + "' in checkpoint");
  return *v;
}

std::string expect_line(std::istringstream& in, std::string_view key) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Parse, "checkpoint truncated before '" + std::string(key) + "'");
  if (line.rfind(key, 0) != 0) fail(ErrorKind::Parse, "expected '" + std::string(key) + "', got '" + line + "'");
  return line.substr(key.size());
}

}  // namespace

std::string_view to_string(Activation activation) {
  return activation == Activation::Relu ? "relu" : "sigmoid";
}

std::string serialize_model(const FfnnModel& model) {
  validate_shapes(model);
  std::ostringstream out;
  out << kMagic << ' ' << kVersion << '\n';
  out << "layer_dims";
  for (int d : model.layer_dims) out << ' ' << d;
  out << '\n';
  out << "hidden_activation " << to_string(model.hidden_activation) << '\n';
  out << "output_activation " << to_string(model.output_activation) << '\n';
  out << "rng_seed " << model.rng_seed << '\n';
  for (int l = 0; l < kLayerCount; ++l) {
    const auto& w = model.weights[l];
    out << "weights " << l << ' ' << w.rows() << ' ' << w.cols();
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) out << ' ' << format_double(w(r, c));
    out << '\n';
    const auto& b = model.biases[l];
    out << "biases " << l << ' ' << b.size();
    for (Eigen::Index i = 0; i < b.size(); ++i) out << ' ' << format_double(b[i]);
    out << '\n';
  }
  return out.str();
}

FfnnModel deserialize_model(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  std::getline(in, header);
  if (header != std::string(kMagic) + " " + std::to_string(kVersion))
    fail(ErrorKind::Parse, "not a version-1 model checkpoint");

  FfnnModel model;
  {
    std::istringstream dims(expect_line(in, "layer_dims"));
    int d = 0;
    while (dims >> d) model.layer_dims.push_back(d);
  }
  validate_layer_dims(model.layer_dims);
  model.hidden_activation = parse_activation(trim(expect_line(in, "hidden_activation")));
  model.output_activation = parse_activation(trim(expect_line(in, "output_activation")));
  {
    auto seed = trim(expect_line(in, "rng_seed"));
    try {
      model.rng_seed = std::stoull(seed);
    } catch (const std::exception&) {
      fail(ErrorKind::Parse, "bad rng_seed '" + seed + "'");
    }
  }
  for (int l = 0; l < kLayerCount; ++l) {
    std::istringstream wl(expect_line(in, "weights"));
    int idx = -1;
    Eigen::Index rows = 0, cols = 0;
    wl >> idx >> rows >> cols;
    if (idx != l || rows != model.layer_dims[l] || cols != model.layer_dims[l + 1])
      fail(ErrorKind::Parse, "weight block " + std::to_string(l) + " has inconsistent header");
    MatrixXd w(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) w(r, c) = next_double(wl);
    model.weights.push_back(std::move(w));

    std::istringstream bl(expect_line(in, "biases"));
    Eigen::Index n = 0;
    bl >> idx >> n;
    if (idx != l || n != model.layer_dims[l + 1])
      fail(ErrorKind::Parse, "bias block " + std::to_string(l) + " has inconsistent header");
    VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) b[i] = next_double(bl);
    model.biases.push_back(std::move(b));
  }
  return model;
}

void save_model(const FfnnModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << serialize_model(model);
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

FfnnModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::State, "model checkpoint missing: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

}  // namespace splitchain::nn
