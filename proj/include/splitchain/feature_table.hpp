#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "splitchain/nn.hpp"

namespace splitchain {

using SampleId = std::int64_t;

// ID-indexed matrix of named numeric columns with optional binary labels.
struct FeatureTable {
  std::vector<SampleId> ids;
  std::vector<std::string> columns;
  nn::MatrixXd values;  // ids.size() x columns.size()
  std::optional<std::vector<int>> labels;

  std::size_t rows() const { return ids.size(); }
  std::size_t width() const { return columns.size(); }
  bool has_labels() const { return labels.has_value(); }

  std::optional<std::size_t> column_index(const std::string& name) const;
  std::size_t require_column(const std::string& name) const;
  nn::VectorXd column(const std::string& name) const;
  nn::VectorXd label_vector() const;

  FeatureTable select_rows(const std::vector<std::size_t>& indices) const;
  FeatureTable select_columns(const std::vector<std::string>& names) const;
  FeatureTable without_labels() const;

  // Throws on unequal lengths, duplicate IDs or non-binary labels.
  void validate() const;
};

struct CsvOptions {
  // Case-insensitive header names recognised as the ID column.
  std::vector<std::string> id_columns{"id"};
  // Header names recognised as the binary label column, first match wins.
  std::vector<std::string> label_columns{"label", "Personal Loan"};
};

FeatureTable parse_table_csv(const std::string& text, const CsvOptions& options = {});
FeatureTable load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

// Header `id,<columns...>[,label]`, shortest round-trip decimals.
std::string table_to_csv(const FeatureTable& table);
void save_csv(const FeatureTable& table, const std::filesystem::path& path);

}  // namespace splitchain
