#pragma once

// Participants and the aggregation protocol. Every cross-participant byte
// travels seal -> content store -> ledger registration and back; the only
// shared objects are the store and the ledger, as in a real deployment.
//
// Training:  node_i trains on (T_i, O), sends F_i (train-repr) to the host,
//            host joins F_1 ++ F_2 on ID and trains on (F, O).
// Inference: host splits T_test and sends each part to its node
//            (test-split); each node answers with its representations
//            (test-repr); host joins and predicts.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "splitchain/content_store.hpp"
#include "splitchain/dataset.hpp"
#include "splitchain/envelope.hpp"
#include "splitchain/ledger.hpp"
#include "splitchain/nn.hpp"
#include "splitchain/representation.hpp"

namespace splitchain {

inline const std::string kNode1 = "node1";
inline const std::string kNode2 = "node2";
inline const std::string kHost = "host";

enum class Phase { TrainRepr, TestSplit, TestRepr };

std::string_view to_string(Phase phase);

// Ledger tag "<run-id>/<phase>"; one run is one ledger namespace.
struct TransferTag {
  std::string run_id;
  Phase phase;

  std::string str() const;
  static TransferTag parse(std::string_view tag);
};

struct ReceivedArtifact {
  std::string sender;
  std::string tag;
  Bytes payload;
};

// One party on the fabric: own key pair, its own view of everyone's public
// keys, and handles to the shared store and ledger.
class Participant {
 public:
  Participant(std::string id, KeyPair keys, KeyDirectory directory, ContentStore& store, Ledger& ledger);

  const std::string& id() const { return id_; }
  const Bytes& public_key() const { return keys_.public_key; }

  // seal to recipient -> put -> register; returns the ledger seq.
  std::uint64_t send_artifact(const std::string& recipient, ByteView payload, const TransferTag& tag);
  // fetch latest hash -> get -> open; the plaintext exactly as sent.
  Bytes receive_artifact(const std::string& sender, const TransferTag& tag);

  // Every payload this participant has decrypted, in order.
  const std::vector<ReceivedArtifact>& received() const { return received_; }

 private:
  std::string id_;
  KeyPair keys_;
  KeyDirectory directory_;
  ContentStore* store_;
  Ledger* ledger_;
  std::vector<ReceivedArtifact> received_;
};

// A data node holding one vertical partition. Scaler and model never leave it.
class DataNode {
 public:
  DataNode(Participant participant, std::vector<std::string> columns);

  const std::string& id() const { return participant_.id(); }
  const std::vector<std::string>& columns() const { return columns_; }
  Participant& participant() { return participant_; }

  // Fits the local scaler and trains the local model against the shared labels.
  nn::TrainHistory train_local(const FeatureTable& partition, const nn::TrainConfig& cfg, std::uint64_t model_seed);

  RepresentationFile representations(const FeatureTable& raw_rows) const;
  nn::Prediction<double> predict_local(const FeatureTable& raw_rows) const;

  std::uint64_t send_train_representations(const FeatureTable& partition, const std::string& host,
                                           const std::string& run_id);
  // Receives the host's test split, answers with test representations.
  std::uint64_t serve_test_split(const std::string& host, const std::string& run_id);

  const nn::FfnnModel& model() const;
  const Scaler& scaler() const;
  void restore(nn::FfnnModel model, Scaler scaler);

 private:
  FeatureTable select_own(const FeatureTable& raw) const;

  Participant participant_;
  std::vector<std::string> columns_;
  std::optional<nn::FfnnModel> model_;
  std::optional<Scaler> scaler_;
};

struct Predictions {
  std::vector<SampleId> ids;
  std::vector<double> probabilities;
  std::vector<int> classes;
};

// Aggregating party: holds labels and its own model, never raw features of
// the training set.
class HostNode {
 public:
  HostNode(Participant participant, std::vector<std::string> node_ids);

  const std::string& id() const { return participant_.id(); }
  Participant& participant() { return participant_; }
  const std::vector<std::string>& node_ids() const { return node_ids_; }

  // Receives every node's train-repr and joins them on ID.
  RepresentationFile collect_training_inputs(const std::string& run_id);
  nn::TrainHistory train(const RepresentationFile& inputs, const std::map<SampleId, int>& labels,
                         const nn::TrainConfig& cfg, std::uint64_t model_seed);

  // test_table carries the raw columns of all nodes; each node's share is
  // sent under `partitions[i]`.
  std::vector<std::uint64_t> dispatch_test_split(const FeatureTable& test_table,
                                                 const std::vector<std::vector<std::string>>& partitions,
                                                 const std::string& run_id);
  Predictions collect_predictions(const std::string& run_id);
  Predictions predict(const RepresentationFile& inputs) const;

  const nn::FfnnModel& model() const;
  const std::vector<int>& node_widths() const { return node_widths_; }
  void restore(nn::FfnnModel model, std::vector<int> node_widths);

 private:
  RepresentationFile receive_joined(const std::string& run_id, Phase phase);

  Participant participant_;
  std::vector<std::string> node_ids_;
  std::vector<int> node_widths_;
  std::optional<nn::FfnnModel> model_;
};

struct ProtocolConfig {
  std::string run_id = "run";
  nn::TrainConfig node1_train;
  nn::TrainConfig node2_train;
  nn::TrainConfig host_train;
  std::uint64_t node1_model_seed = 1;
  std::uint64_t node2_model_seed = 2;
  std::uint64_t host_model_seed = 3;
  bool concurrent_nodes = true;
};

struct TrainingOutcome {
  nn::TrainHistory node1_history;
  nn::TrainHistory node2_history;
  nn::TrainHistory host_history;
  RepresentationFile host_inputs;
  std::vector<std::uint64_t> ledger_seqs;
};

// Label lookup shared with every participant.
std::map<SampleId, int> label_map(const FeatureTable& table);

// Local training on both nodes, representation exchange, host training.
TrainingOutcome run_training_phase(DataNode& node1, DataNode& node2, HostNode& host, const FeatureTable& t1,
                                   const FeatureTable& t2, const std::map<SampleId, int>& labels,
                                   const ProtocolConfig& cfg);

struct InferenceOutcome {
  Predictions predictions;
  std::vector<std::uint64_t> ledger_seqs;
};

InferenceOutcome run_inference_phase(HostNode& host, DataNode& node1, DataNode& node2, const FeatureTable& test_table,
                                     const std::string& run_id);

// The same computation without encryption, store or ledger: representations
// handed over in memory. Used as the oracle for the fabric.
RepresentationFile in_process_host_inputs(const DataNode& node1, const DataNode& node2, const FeatureTable& t1,
                                          const FeatureTable& t2);

}  // namespace splitchain
