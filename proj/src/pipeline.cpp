#include "splitchain/pipeline.hpp"

#include <map>

namespace splitchain {

SeedPlan SeedPlan::from_master(std::uint64_t master) {
  SeedPlan s;
  s.split = derive_seed(master, 1);
  s.node1_model = derive_seed(master, 10);
  s.node1_shuffle = derive_seed(master, 11);
  s.node2_model = derive_seed(master, 20);
  s.node2_shuffle = derive_seed(master, 21);
  s.host_model = derive_seed(master, 30);
  s.host_shuffle = derive_seed(master, 31);
  s.central_model = derive_seed(master, 40);
  s.central_shuffle = derive_seed(master, 41);
  s.keys = derive_seed(master, 100);
  return s;
}

KeyDirectory public_directory(std::uint64_t key_seed) {
  KeyDirectory dir;
  for (const auto& id : {kNode1, kNode2, kHost}) dir.add(id, keygen(id, key_seed).public_key);
  return dir;
}

std::unique_ptr<Cluster> make_cluster(ContentStore& store, Ledger& ledger, std::uint64_t key_seed,
                                      const PartitionSpec& spec) {
  const KeyDirectory dir = public_directory(key_seed);
  return std::make_unique<Cluster>(Cluster{
      DataNode(Participant(kNode1, keygen(kNode1, key_seed), dir, store, ledger), spec.personal_columns),
      DataNode(Participant(kNode2, keygen(kNode2, key_seed), dir, store, ledger), spec.bank_columns),
      HostNode(Participant(kHost, keygen(kHost, key_seed), dir, store, ledger), {kNode1, kNode2})});
}

std::vector<int> labels_in_order(const FeatureTable& table, const std::vector<SampleId>& ids) {
  const auto labels = label_map(table);
  std::vector<int> out;
  out.reserve(ids.size());
  for (SampleId id : ids) {
    auto it = labels.find(id);
    if (it == labels.end()) fail(ErrorKind::Join, "no label for ID " + std::to_string(id));
    out.push_back(it->second);
  }
  return out;
}

nn::TrainConfig default_train_config(int epochs, std::uint64_t shuffle_seed) {
  nn::TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.shuffle_seed = shuffle_seed;
  return cfg;
}

namespace {

Evaluation evaluate(std::string name, const std::vector<int>& truth, const std::vector<int>& predicted,
                    nn::TrainHistory history) {
  return {std::move(name), classification_report(truth, predicted), std::move(history)};
}

}  // namespace

DecentralizedResult run_decentralized(const FeatureTable& t1, const FeatureTable& t2, const FeatureTable& test,
                                      const PartitionSpec& spec, const SeedPlan& seeds, int epochs,
                                      ContentStore& store, Ledger& ledger, const std::string& run_id) {
  DecentralizedResult out;
  out.cluster = make_cluster(store, ledger, seeds.keys, spec);
  auto& [node1, node2, host] = *out.cluster;
  ProtocolConfig cfg;
  cfg.run_id = run_id;
  cfg.node1_train = default_train_config(epochs, seeds.node1_shuffle);
  cfg.node2_train = default_train_config(epochs, seeds.node2_shuffle);
  cfg.host_train = default_train_config(epochs, seeds.host_shuffle);
  cfg.node1_model_seed = seeds.node1_model;
  cfg.node2_model_seed = seeds.node2_model;
  cfg.host_model_seed = seeds.host_model;
  out.training = run_training_phase(node1, node2, host, t1, t2, label_map(t1), cfg);

  auto inference = run_inference_phase(host, node1, node2, test.select_columns(spec.all_columns()), run_id);
  out.predictions = std::move(inference.predictions);
  out.inference_seqs = std::move(inference.ledger_seqs);

  const std::vector<int> test_truth = *test.labels;
  out.node1 = evaluate("node1", test_truth, node1.predict_local(test).classes, out.training.node1_history);
  out.node2 = evaluate("node2", test_truth, node2.predict_local(test).classes, out.training.node2_history);
  out.host = evaluate("host", labels_in_order(test, out.predictions.ids), out.predictions.classes,
                      out.training.host_history);
  return out;
}

CentralizedResult run_centralized(const FeatureTable& train, const FeatureTable& test, const PartitionSpec& spec,
                                  const SeedPlan& seeds, int epochs) {
  const FeatureTable joined = train.select_columns(spec.all_columns());
  Scaler scaler = Scaler::fit(joined);
  auto model = nn::init_model(nn::standard_layer_dims(static_cast<int>(joined.width())), seeds.central_model);
  auto result = nn::train<double>(std::move(model), scaler.transform(joined).values, joined.label_vector(),
                                  default_train_config(epochs, seeds.central_shuffle));
  const auto pred = nn::predict<double>(result.model, scaler.transform(test.select_columns(spec.all_columns())).values);
  CentralizedResult out{std::move(result.model), std::move(scaler), {}};
  out.evaluation = evaluate("centralized", *test.labels, pred.classes, std::move(result.history));
  return out;
}

LocalResult run_local(int node_index, const FeatureTable& train, const FeatureTable& test, const PartitionSpec& spec,
                      const SeedPlan& seeds, int epochs) {
  if (node_index != 1 && node_index != 2) fail(ErrorKind::Config, "local mode needs node 1 or 2");
  const auto& columns = node_index == 1 ? spec.personal_columns : spec.bank_columns;
  const FeatureTable own = train.select_columns(columns);
  Scaler scaler = Scaler::fit(own);
  auto model = nn::init_model(nn::standard_layer_dims(static_cast<int>(own.width())),
                              node_index == 1 ? seeds.node1_model : seeds.node2_model);
  auto result = nn::train<double>(std::move(model), scaler.transform(own).values, own.label_vector(),
                                  default_train_config(epochs, node_index == 1 ? seeds.node1_shuffle
                                                                               : seeds.node2_shuffle));
  const auto pred = nn::predict<double>(result.model, scaler.transform(test.select_columns(columns)).values);
  LocalResult out{std::move(result.model), std::move(scaler), {}};
  out.evaluation = evaluate(node_index == 1 ? "node1" : "node2", *test.labels, pred.classes, std::move(result.history));
  return out;
}

}  // namespace splitchain
