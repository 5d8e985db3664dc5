#pragma once

// End-to-end experiment runs shared by the CLI and the acceptance suite:
// local-only nodes, the decentralized protocol and the centralized baseline,
// all evaluated on the same held-out split.

#include <cstdint>
#include <memory>
#include <string>

#include "splitchain/metrics.hpp"
#include "splitchain/protocol.hpp"

namespace splitchain {

// Every random stream in a run, derived from one master seed.
struct SeedPlan {
  std::uint64_t split = 0;
  std::uint64_t node1_model = 0, node1_shuffle = 0;
  std::uint64_t node2_model = 0, node2_shuffle = 0;
  std::uint64_t host_model = 0, host_shuffle = 0;
  std::uint64_t central_model = 0, central_shuffle = 0;
  std::uint64_t keys = 0;

  static SeedPlan from_master(std::uint64_t master);
};

// Three participants wired to one store and ledger, each holding the other
// parties' public keys.
struct Cluster {
  DataNode node1;
  DataNode node2;
  HostNode host;
};

std::unique_ptr<Cluster> make_cluster(ContentStore& store, Ledger& ledger, std::uint64_t key_seed,
                                      const PartitionSpec& spec);
KeyDirectory public_directory(std::uint64_t key_seed);

struct Evaluation {
  std::string name;
  ClassificationReport report;
  nn::TrainHistory history;
};

std::vector<int> labels_in_order(const FeatureTable& table, const std::vector<SampleId>& ids);

nn::TrainConfig default_train_config(int epochs, std::uint64_t shuffle_seed);

struct DecentralizedResult {
  std::unique_ptr<Cluster> cluster;
  Evaluation node1;
  Evaluation node2;
  Evaluation host;
  Predictions predictions;
  TrainingOutcome training;
  std::vector<std::uint64_t> inference_seqs;
};

// Algorithm-level run: train both nodes and the host over the fabric, then
// push the test split through the inference round trip.
// t1 and t2 are the node partitions (labels replicated on both); the host
// only ever sees the test table and the shared labels.
DecentralizedResult run_decentralized(const FeatureTable& t1, const FeatureTable& t2, const FeatureTable& test,
                                      const PartitionSpec& spec, const SeedPlan& seeds, int epochs,
                                      ContentStore& store, Ledger& ledger, const std::string& run_id);

struct CentralizedResult {
  nn::FfnnModel model;
  Scaler scaler;
  Evaluation evaluation;
};

// 10-10-20-10-1 trained directly on all joined raw features.
CentralizedResult run_centralized(const FeatureTable& train, const FeatureTable& test, const PartitionSpec& spec,
                                  const SeedPlan& seeds, int epochs);

struct LocalResult {
  nn::FfnnModel model;
  Scaler scaler;
  Evaluation evaluation;
};

// A single node trained and evaluated on its own columns only (node_index 1 or 2).
LocalResult run_local(int node_index, const FeatureTable& train, const FeatureTable& test, const PartitionSpec& spec,
                      const SeedPlan& seeds, int epochs);

}  // namespace splitchain
