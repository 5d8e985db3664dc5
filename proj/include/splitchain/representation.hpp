#pragma once

#include <string>
#include <vector>

#include "splitchain/bytes.hpp"
#include "splitchain/feature_table.hpp"
#include "splitchain/nn.hpp"

namespace splitchain {

// Last-hidden-layer activations keyed by sample ID. IDs are unique and kept
// in ascending order; every entry is non-negative.
struct RepresentationFile {
  std::string source;
  std::vector<SampleId> ids;
  nn::MatrixXd rows;

  int width() const { return static_cast<int>(rows.cols()); }
  std::size_t size() const { return ids.size(); }

  void validate() const;

  // Payload format: header `id,f1,...,fN`, one row per ID, shortest
  // round-trip decimals.
  std::string to_csv() const;
  static RepresentationFile parse_csv(std::string_view text, std::string source);
};

enum class PayloadKind { Representation, FeatureTable, Unknown };

// Classifies an exchanged payload from its header line.
PayloadKind classify_payload(ByteView payload);

// Rows of `table` pushed through the model up to the third hidden layer.
RepresentationFile extract_representation(const nn::FfnnModel& model, const FeatureTable& table,
                                          std::string source = {});

// Inner join on ID; node-1 block first. Input order does not matter.
RepresentationFile concatenate_representations(const RepresentationFile& first, const RepresentationFile& second,
                                               std::string source = "host");

// Representation rows as a feature table, columns f1..fN.
FeatureTable to_feature_table(const RepresentationFile& repr);

}  // namespace splitchain
