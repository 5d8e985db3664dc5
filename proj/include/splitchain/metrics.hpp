#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "splitchain/nn.hpp"

namespace splitchain {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  // Set when a denominator was zero and the value was reported as 0.
  bool precision_undefined = false;
  bool recall_undefined = false;
};

struct AverageMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct ClassificationReport {
  std::array<ClassMetrics, 2> per_class;
  double accuracy = 0.0;
  std::size_t total = 0;
  AverageMetrics macro;
  AverageMetrics weighted;

  // Aligned table, rates to two decimals.
  std::string to_text() const;
  // key=value lines at full precision.
  std::string to_key_values(const std::string& prefix = "") const;
};

double accuracy(std::span<const int> y_true, std::span<const int> y_pred);
ClassificationReport classification_report(std::span<const int> y_true, std::span<const int> y_pred);

// First epoch (1-based) whose training accuracy reaches fraction * final
// accuracy.
int convergence_epoch(const nn::TrainHistory& history, double fraction = 0.98);

struct NamedHistory {
  std::string name;
  nn::TrainHistory history;
};

// Writes <dir>/<name>_curve.csv (epoch,loss,accuracy) per history and,
// when render_plot is set, a matching SVG chart. Returns the written paths.
std::vector<std::filesystem::path> emit_curves(const std::vector<NamedHistory>& histories,
                                               const std::filesystem::path& dir, bool render_plot = false);

std::string curve_csv(const nn::TrainHistory& history);

}  // namespace splitchain
