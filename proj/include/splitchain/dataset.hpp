#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "splitchain/feature_table.hpp"

namespace splitchain {

inline const std::string kCombinationFeature = "combination_feature";

// Column ownership for the two data nodes.
struct PartitionSpec {
  std::vector<std::string> personal_columns;
  std::vector<std::string> bank_columns;

  std::vector<std::string> all_columns() const;
  void validate() const;

  // Personal details and bank-specific details of the bank-loan schema.
  static PartitionSpec bank_loan();
};

struct EngineerConfig {
  double corr_threshold = 0.01;
  std::string income_column = "Income";
  std::string spending_column = "CCAvg";
  // Never eliminated, whatever their correlation.
  std::vector<std::string> pinned_columns = PartitionSpec::bank_loan().all_columns();
  std::optional<std::size_t> expected_features = 10;
};

// Pearson correlation; 0 when either side has zero variance.
double pearson(const nn::VectorXd& a, const nn::VectorXd& b);

// Adds combination_feature = income * average card spending, then drops
// columns whose |corr| with the label falls below the threshold.
FeatureTable engineer_features(const FeatureTable& table, const EngineerConfig& cfg = {});

struct TrainTestSplit {
  FeatureTable train;
  FeatureTable test;
};

TrainTestSplit split_train_test(const FeatureTable& table, double ratio, std::uint64_t seed,
                                bool stratified = false);

std::pair<FeatureTable, FeatureTable> vertical_partition(const FeatureTable& table, const PartitionSpec& spec);

// Per-column z-score parameters fitted on training data.
struct Scaler {
  std::vector<std::string> columns;
  std::vector<double> mean;
  std::vector<double> scale;  // std, or 1 for constant columns

  static Scaler fit(const FeatureTable& train);
  FeatureTable transform(const FeatureTable& table) const;
  FeatureTable inverse_transform(const FeatureTable& table) const;

  std::string serialize() const;
  static Scaler deserialize(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static Scaler load(const std::filesystem::path& path);
};

// Ten-feature table with the bank-loan column layout and labels drawn from a
// noisy logistic rule over all ten features.
FeatureTable synthesize_dataset(std::size_t n, double positive_rate, std::uint64_t seed);

}  // namespace splitchain
