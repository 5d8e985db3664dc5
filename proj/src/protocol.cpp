#include "splitchain/protocol.hpp"

#include <future>

namespace splitchain {

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::TrainRepr: return "train-repr";
    case Phase::TestSplit: return "test-split";
    case Phase::TestRepr: return "test-repr";
  }
  return "unknown";
}

std::string TransferTag::str() const { return run_id + "/" + std::string(to_string(phase)); }

TransferTag TransferTag::parse(std::string_view tag) {
  const auto slash = tag.rfind('/');
  if (slash == std::string_view::npos || slash == 0) fail(ErrorKind::Parse, "transfer tag needs '<run-id>/<phase>'");
  const std::string_view phase = tag.substr(slash + 1);
  for (Phase p : {Phase::TrainRepr, Phase::TestSplit, Phase::TestRepr})
    if (phase == to_string(p)) return {std::string(tag.substr(0, slash)), p};
  fail(ErrorKind::Parse, "unknown transfer phase '" + std::string(phase) + "'");
}

Participant::Participant(std::string id, KeyPair keys, KeyDirectory directory, ContentStore& store, Ledger& ledger)
    : id_(std::move(id)), keys_(std::move(keys)), directory_(std::move(directory)), store_(&store), ledger_(&ledger) {
  ledger_->register_participant(id_);
}

std::uint64_t Participant::send_artifact(const std::string& recipient, ByteView payload, const TransferTag& tag) {
  if (payload.empty()) fail(ErrorKind::EmptyInput, "refusing to send an empty payload");
  const SealedEnvelope envelope = seal(payload, directory_.public_key(recipient));
  const ContentHash hash = store_->put(envelope.serialize());
  return ledger_->register_hash(id_, recipient, tag.str(), hash);
}

Bytes Participant::receive_artifact(const std::string& sender, const TransferTag& tag) {
  const ContentHash hash = ledger_->fetch_hash(id_, sender, tag.str());
  const Bytes blob = store_->get(hash);
  Bytes plaintext = open(SealedEnvelope::parse(blob), keys_.private_key);
  received_.push_back({sender, tag.str(), plaintext});
  return plaintext;
}

DataNode::DataNode(Participant participant, std::vector<std::string> columns)
    : participant_(std::move(participant)), columns_(std::move(columns)) {}

FeatureTable DataNode::select_own(const FeatureTable& raw) const { return raw.select_columns(columns_); }

nn::TrainHistory DataNode::train_local(const FeatureTable& partition, const nn::TrainConfig& cfg,
                                       std::uint64_t model_seed) {
  const FeatureTable own = select_own(partition);
  if (own.rows() == 0) fail(ErrorKind::EmptyInput, id() + " has no training rows");
  Scaler scaler = Scaler::fit(own);
  const FeatureTable scaled = scaler.transform(own);
  auto model = nn::init_model(nn::standard_layer_dims(static_cast<int>(own.width())), model_seed);
  auto result = nn::train<double>(std::move(model), scaled.values, own.label_vector(), cfg);
  model_ = std::move(result.model);
  scaler_ = std::move(scaler);
  return result.history;
}

const nn::FfnnModel& DataNode::model() const {
  if (!model_) fail(ErrorKind::State, id() + " has no trained model");
  return *model_;
}

const Scaler& DataNode::scaler() const {
  if (!scaler_) fail(ErrorKind::State, id() + " has no fitted scaler");
  return *scaler_;
}

void DataNode::restore(nn::FfnnModel model, Scaler scaler) {
  if (scaler.columns != columns_) fail(ErrorKind::Schema, "scaler columns do not match " + id() + "'s partition");
  if (model.input_width() != static_cast<int>(columns_.size()))
    fail(ErrorKind::Shape, "model input width does not match " + id() + "'s partition");
  model_ = std::move(model);
  scaler_ = std::move(scaler);
}

RepresentationFile DataNode::representations(const FeatureTable& raw_rows) const {
  return extract_representation(model(), scaler().transform(select_own(raw_rows)), id());
}

nn::Prediction<double> DataNode::predict_local(const FeatureTable& raw_rows) const {
  return nn::predict<double>(model(), scaler().transform(select_own(raw_rows)).values);
}

std::uint64_t DataNode::send_train_representations(const FeatureTable& partition, const std::string& host,
                                                   const std::string& run_id) {
  const std::string csv = representations(partition).to_csv();
  return participant_.send_artifact(host, to_bytes(csv), {run_id, Phase::TrainRepr});
}

std::uint64_t DataNode::serve_test_split(const std::string& host, const std::string& run_id) {
  const Bytes payload = participant_.receive_artifact(host, {run_id, Phase::TestSplit});
  const FeatureTable split = parse_table_csv(to_text(payload), CsvOptions{{"id"}, {}});
  const std::string csv = representations(split).to_csv();
  return participant_.send_artifact(host, to_bytes(csv), {run_id, Phase::TestRepr});
}

HostNode::HostNode(Participant participant, std::vector<std::string> node_ids)
    : participant_(std::move(participant)), node_ids_(std::move(node_ids)) {
  if (node_ids_.size() != 2) fail(ErrorKind::Config, "the host aggregates exactly two nodes");
}

RepresentationFile HostNode::receive_joined(const std::string& run_id, Phase phase) {
  std::vector<RepresentationFile> parts;
  for (std::size_t i = 0; i < node_ids_.size(); ++i) {
    const Bytes payload = participant_.receive_artifact(node_ids_[i], {run_id, phase});
    parts.push_back(RepresentationFile::parse_csv(to_text(payload), node_ids_[i]));
    if (!node_widths_.empty() && parts.back().width() != node_widths_[i])
      fail(ErrorKind::Shape, node_ids_[i] + " returned width " + std::to_string(parts.back().width()) +
                                 ", expected " + std::to_string(node_widths_[i]));
  }
  if (node_widths_.empty())
    for (const auto& p : parts) node_widths_.push_back(p.width());
  return concatenate_representations(parts[0], parts[1], id());
}

RepresentationFile HostNode::collect_training_inputs(const std::string& run_id) {
  node_widths_.clear();
  return receive_joined(run_id, Phase::TrainRepr);
}

nn::TrainHistory HostNode::train(const RepresentationFile& inputs, const std::map<SampleId, int>& labels,
                                 const nn::TrainConfig& cfg, std::uint64_t model_seed) {
  nn::VectorXd y(static_cast<Eigen::Index>(inputs.size()));
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    auto it = labels.find(inputs.ids[i]);
    if (it == labels.end()) fail(ErrorKind::Join, "no label for ID " + std::to_string(inputs.ids[i]));
    y[static_cast<Eigen::Index>(i)] = it->second;
  }
  auto model = nn::init_model(nn::standard_layer_dims(inputs.width()), model_seed);
  auto result = nn::train<double>(std::move(model), inputs.rows, y, cfg);
  model_ = std::move(result.model);
  return result.history;
}

std::vector<std::uint64_t> HostNode::dispatch_test_split(const FeatureTable& test_table,
                                                         const std::vector<std::vector<std::string>>& partitions,
                                                         const std::string& run_id) {
  if (partitions.size() != node_ids_.size()) fail(ErrorKind::Config, "one column set per node required");
  std::vector<std::uint64_t> seqs;
  const FeatureTable unlabeled = test_table.without_labels();
  for (std::size_t i = 0; i < node_ids_.size(); ++i) {
    const std::string csv = table_to_csv(unlabeled.select_columns(partitions[i]));
    seqs.push_back(participant_.send_artifact(node_ids_[i], to_bytes(csv), {run_id, Phase::TestSplit}));
  }
  return seqs;
}

Predictions HostNode::predict(const RepresentationFile& inputs) const {
  const auto p = nn::predict<double>(model(), inputs.rows);
  Predictions out;
  out.ids = inputs.ids;
  out.probabilities.assign(p.probabilities.data(), p.probabilities.data() + p.probabilities.size());
  out.classes = p.classes;
  return out;
}

Predictions HostNode::collect_predictions(const std::string& run_id) {
  if (node_widths_.empty()) fail(ErrorKind::State, "host has not been trained or restored");
  return predict(receive_joined(run_id, Phase::TestRepr));
}

const nn::FfnnModel& HostNode::model() const {
  if (!model_) fail(ErrorKind::State, "host has no trained model");
  return *model_;
}

void HostNode::restore(nn::FfnnModel model, std::vector<int> node_widths) {
  int total = 0;
  for (int w : node_widths) total += w;
  if (node_widths.size() != node_ids_.size() || total != model.input_width())
    fail(ErrorKind::Shape, "node widths do not add up to the host model input");
  model_ = std::move(model);
  node_widths_ = std::move(node_widths);
}

std::map<SampleId, int> label_map(const FeatureTable& table) {
  if (!table.labels) fail(ErrorKind::Label, "table has no labels");
  std::map<SampleId, int> out;
  for (std::size_t i = 0; i < table.rows(); ++i) out[table.ids[i]] = (*table.labels)[i];
  return out;
}

TrainingOutcome run_training_phase(DataNode& node1, DataNode& node2, HostNode& host, const FeatureTable& t1,
                                   const FeatureTable& t2, const std::map<SampleId, int>& labels,
                                   const ProtocolConfig& cfg) {
  if (t1.ids != t2.ids) fail(ErrorKind::Join, "node partitions are not ID-aligned");
  TrainingOutcome out;

  auto node_job = [&cfg](DataNode& node, const FeatureTable& part, const nn::TrainConfig& tc, std::uint64_t seed,
                         const std::string& host_id) {
    nn::TrainHistory h = node.train_local(part, tc, seed);
    const std::uint64_t seq = node.send_train_representations(part, host_id, cfg.run_id);
    return std::pair{std::move(h), seq};
  };
  std::pair<nn::TrainHistory, std::uint64_t> r1, r2;
  if (cfg.concurrent_nodes) {
    auto f1 = std::async(std::launch::async, node_job, std::ref(node1), std::cref(t1), std::cref(cfg.node1_train),
                         cfg.node1_model_seed, host.id());
    auto f2 = std::async(std::launch::async, node_job, std::ref(node2), std::cref(t2), std::cref(cfg.node2_train),
                         cfg.node2_model_seed, host.id());
    r1 = f1.get();
    r2 = f2.get();
  } else {
    r1 = node_job(node1, t1, cfg.node1_train, cfg.node1_model_seed, host.id());
    r2 = node_job(node2, t2, cfg.node2_train, cfg.node2_model_seed, host.id());
  }
  out.node1_history = std::move(r1.first);
  out.node2_history = std::move(r2.first);
  // Ledger order of the two concurrent sends is not fixed; report in node order.
  out.ledger_seqs = {r1.second, r2.second};

  out.host_inputs = host.collect_training_inputs(cfg.run_id);
  out.host_history = host.train(out.host_inputs, labels, cfg.host_train, cfg.host_model_seed);
  return out;
}

InferenceOutcome run_inference_phase(HostNode& host, DataNode& node1, DataNode& node2, const FeatureTable& test_table,
                                     const std::string& run_id) {
  InferenceOutcome out;
  out.ledger_seqs = host.dispatch_test_split(test_table, {node1.columns(), node2.columns()}, run_id);
  out.ledger_seqs.push_back(node1.serve_test_split(host.id(), run_id));
  out.ledger_seqs.push_back(node2.serve_test_split(host.id(), run_id));
  out.predictions = host.collect_predictions(run_id);
  return out;
}

RepresentationFile in_process_host_inputs(const DataNode& node1, const DataNode& node2, const FeatureTable& t1,
                                          const FeatureTable& t2) {
  return concatenate_representations(node1.representations(t1), node2.representations(t2));
}

}  // namespace splitchain
