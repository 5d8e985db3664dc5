#include "splitchain/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "splitchain/numeric_text.hpp"
#include "splitchain/rng.hpp"

namespace splitchain {

std::vector<std::string> PartitionSpec::all_columns() const {
  std::vector<std::string> all = personal_columns;
  all.insert(all.end(), bank_columns.begin(), bank_columns.end());
  return all;
}

void PartitionSpec::validate() const {
  if (personal_columns.empty() || bank_columns.empty()) fail(ErrorKind::Schema, "both partitions need columns");
  std::set<std::string> seen;
  for (const auto& c : all_columns())
    if (!seen.insert(c).second) fail(ErrorKind::Schema, "column '" + c + "' assigned to more than one partition");
}

PartitionSpec PartitionSpec::bank_loan() {
  return {{"Education", "Family", "Income", "CCAvg", "Experience", "Mortgage"},
          {"Securities Account", "CD Account", "CreditCard", kCombinationFeature}};
}

double pearson(const nn::VectorXd& a, const nn::VectorXd& b) {
  if (a.size() != b.size()) fail(ErrorKind::Shape, "correlation of vectors with different lengths");
  if (a.size() < 2) return 0.0;
  const nn::VectorXd da = a.array() - a.mean();
  const nn::VectorXd db = b.array() - b.mean();
  const double va = da.squaredNorm();
  const double vb = db.squaredNorm();
  if (va <= 0.0 || vb <= 0.0) return 0.0;
  return da.dot(db) / std::sqrt(va * vb);
}

FeatureTable engineer_features(const FeatureTable& table, const EngineerConfig& cfg) {
  table.validate();
  if (table.column_index(kCombinationFeature))
    fail(ErrorKind::Schema, "table already contains " + kCombinationFeature + "; features were engineered already");
  if (!table.has_labels()) fail(ErrorKind::Schema, "feature engineering needs the label column");
  if (!table.column_index(cfg.income_column) || !table.column_index(cfg.spending_column))
    fail(ErrorKind::Schema, "missing '" + cfg.income_column + "' or '" + cfg.spending_column + "' column");

  FeatureTable widened = table;
  widened.columns.push_back(kCombinationFeature);
  widened.values.conservativeResize(Eigen::NoChange, widened.values.cols() + 1);
  widened.values.col(widened.values.cols() - 1) =
      table.column(cfg.income_column).cwiseProduct(table.column(cfg.spending_column));

  const nn::VectorXd y = widened.label_vector();
  const std::set<std::string> pinned(cfg.pinned_columns.begin(), cfg.pinned_columns.end());
  std::vector<std::string> kept;
  for (const auto& name : widened.columns) {
    const double r = std::abs(pearson(widened.column(name), y));
    if (pinned.count(name) || r >= cfg.corr_threshold) kept.push_back(name);
  }
  FeatureTable out = widened.select_columns(kept);
  if (cfg.expected_features && out.width() != *cfg.expected_features) {
    std::string names;
    for (const auto& k : kept) names += (names.empty() ? "" : ", ") + k;
    fail(ErrorKind::Schema, "feature elimination kept " + std::to_string(out.width()) + " columns (" + names +
                                "), expected " + std::to_string(*cfg.expected_features));
  }
  return out;
}

TrainTestSplit split_train_test(const FeatureTable& table, double ratio, std::uint64_t seed, bool stratified) {
  if (!(ratio > 0.0 && ratio < 1.0)) fail(ErrorKind::Config, "split ratio must lie strictly between 0 and 1");
  const std::size_t n = table.rows();
  if (n < 2) fail(ErrorKind::InsufficientData, "need at least 2 rows to split, got " + std::to_string(n));
  Rng rng(seed);

  std::vector<std::size_t> train_idx, test_idx;
  auto take = [&](const std::vector<std::size_t>& pool) {
    const auto perm = rng.permutation(pool.size());
    auto k = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(pool.size())));
    for (std::size_t i = 0; i < pool.size(); ++i) (i < k ? train_idx : test_idx).push_back(pool[perm[i]]);
  };
  if (stratified && table.has_labels()) {
    std::vector<std::size_t> neg, pos;
    for (std::size_t i = 0; i < n; ++i) ((*table.labels)[i] ? pos : neg).push_back(i);
    take(neg);
    take(pos);
  } else {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    take(all);
  }
  if (train_idx.empty() || test_idx.empty())
    fail(ErrorKind::InsufficientData, "split leaves an empty side; adjust the ratio");
  return {table.select_rows(train_idx), table.select_rows(test_idx)};
}

std::pair<FeatureTable, FeatureTable> vertical_partition(const FeatureTable& table, const PartitionSpec& spec) {
  spec.validate();
  for (const auto& c : spec.all_columns()) table.require_column(c);
  return {table.select_columns(spec.personal_columns), table.select_columns(spec.bank_columns)};
}

Scaler Scaler::fit(const FeatureTable& train) {
  if (train.rows() == 0) fail(ErrorKind::EmptyInput, "cannot fit a scaler on an empty table");
  Scaler s;
  s.columns = train.columns;
  const double n = static_cast<double>(train.rows());
  for (Eigen::Index c = 0; c < train.values.cols(); ++c) {
    const double mean = train.values.col(c).mean();
    const double var = (train.values.col(c).array() - mean).square().sum() / n;
    const double sd = std::sqrt(var);
    s.mean.push_back(mean);
    s.scale.push_back(sd > 0.0 ? sd : 1.0);
  }
  return s;
}

FeatureTable Scaler::transform(const FeatureTable& table) const {
  if (table.columns != columns) fail(ErrorKind::Schema, "scaler columns do not match table columns");
  FeatureTable out = table;
  for (Eigen::Index c = 0; c < out.values.cols(); ++c)
    out.values.col(c) = (out.values.col(c).array() - mean[c]) / scale[c];
  return out;
}

FeatureTable Scaler::inverse_transform(const FeatureTable& table) const {
  if (table.columns != columns) fail(ErrorKind::Schema, "scaler columns do not match table columns");
  FeatureTable out = table;
  for (Eigen::Index c = 0; c < out.values.cols(); ++c)
    out.values.col(c) = out.values.col(c).array() * scale[c] + mean[c];
  return out;
}

std::string Scaler::serialize() const {
  std::ostringstream out;
  out << "format=splitchain-scaler-1\n";
  out << "columns=" << columns.size() << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out << "name." << i << '=' << columns[i] << '\n';
    out << "mean." << i << '=' << format_double(mean[i]) << '\n';
    out << "scale." << i << '=' << format_double(scale[i]) << '\n';
  }
  return out.str();
}

Scaler Scaler::deserialize(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorKind::Parse, "scaler line without '=': " + line);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  if (kv["format"] != "splitchain-scaler-1") fail(ErrorKind::Parse, "not a scaler parameter file");
  auto count = parse_int(kv["columns"]);
  if (!count || *count < 0) fail(ErrorKind::Parse, "bad column count in scaler file");
  Scaler s;
  for (std::int64_t i = 0; i < *count; ++i) {
    const std::string k = std::to_string(i);
    auto m = parse_double(kv["mean." + k]);
    auto sc = parse_double(kv["scale." + k]);
    if (!kv.count("name." + k) || !m || !sc) fail(ErrorKind::Parse, "incomplete scaler entry " + k);
    s.columns.push_back(kv["name." + k]);
    s.mean.push_back(*m);
    s.scale.push_back(*sc);
  }
  return s;
}

void Scaler::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << serialize();
}

Scaler Scaler::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::State, "scaler file missing: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

FeatureTable synthesize_dataset(std::size_t n, double positive_rate, std::uint64_t seed) {
  if (n < 10) fail(ErrorKind::Config, "synthetic dataset needs at least 10 rows");
  if (!(positive_rate > 0.0 && positive_rate < 1.0))
    fail(ErrorKind::Config, "positive rate must lie strictly between 0 and 1");

  const PartitionSpec spec = PartitionSpec::bank_loan();
  FeatureTable t;
  t.columns = spec.all_columns();
  t.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t.columns.size()));
  Rng rng(seed);

  std::vector<double> logit(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double income = std::clamp(std::round(std::exp(4.05 + 0.55 * rng.normal())), 8.0, 224.0);
    const double ccavg =
        std::clamp(std::round(0.027 * income * std::exp(-0.15 + 0.5 * rng.normal()) * 10.0) / 10.0, 0.0, 10.0);
    const double experience = static_cast<double>(rng.below(44));
    const double family = 1.0 + static_cast<double>(rng.below(4));
    const double u = rng.uniform();
    const double education = u < 0.42 ? 1.0 : (u < 0.70 ? 2.0 : 3.0);
    const double mortgage = rng.bernoulli(0.69) ? 0.0 : std::round(rng.uniform(75.0, 635.0));
    const double securities = rng.bernoulli(0.10) ? 1.0 : 0.0;
    const double cd = rng.bernoulli(0.06) ? 1.0 : 0.0;
    const double credit_card = rng.bernoulli(0.29) ? 1.0 : 0.0;
    const double combination = income * ccavg;

    const double row[] = {education, family, income, ccavg, experience, mortgage,
                          securities, cd, credit_card, combination};
    for (Eigen::Index c = 0; c < 10; ++c) t.values(static_cast<Eigen::Index>(i), c) = row[c];
    t.ids.push_back(static_cast<SampleId>(i + 1));

    // Planted rule: personal columns carry most of the signal, the bank
    // columns add information the personal node cannot see.
    logit[i] = 0.16 * (income - 100.0) + 3.0 * (education - 1.0) + 1.6 * (family - 2.5) + 0.4 * (ccavg - 2.0) +
               0.003 * mortgage + 0.006 * (experience - 20.0) + 6.0 * cd - 4.0 * securities -
               4.0 * credit_card + 0.003 * (combination - 150.0);
  }

  // Intercept chosen so the expected positive rate matches the request.
  auto mean_prob = [&](double b) {
    double s = 0.0;
    for (double z : logit) s += nn::sigmoid(z + b);
    return s / static_cast<double>(n);
  };
  double lo = -60.0, hi = 60.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mean_prob(mid) < positive_rate ? lo : hi) = mid;
  }
  const double intercept = 0.5 * (lo + hi);

  t.labels.emplace();
  for (std::size_t i = 0; i < n; ++i) t.labels->push_back(rng.bernoulli(nn::sigmoid(logit[i] + intercept)) ? 1 : 0);
  t.validate();
  return t;
}

}  // namespace splitchain
