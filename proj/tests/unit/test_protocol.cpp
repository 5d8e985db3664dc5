#include <doctest.h>

#include <algorithm>

#include "support.hpp"
#include "splitchain/error.hpp"
#include "splitchain/pipeline.hpp"

using namespace splitchain;

namespace {

struct Fixture {
  PartitionSpec spec = PartitionSpec::bank_loan();
  FeatureTable data = synthesize_dataset(300, 0.15, 5);
  TrainTestSplit split = split_train_test(data, 0.7, 1);
  MemoryContentStore store;
  Ledger ledger;
};

bool contains(const Bytes& hay, const std::string& needle) {
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

}  // namespace

TEST_CASE("transfer tags") {
  const TransferTag t{"exp-1/a", Phase::TestRepr};
  CHECK(t.str() == "exp-1/a/test-repr");
  const auto back = TransferTag::parse(t.str());
  CHECK(back.run_id == "exp-1/a");
  CHECK(back.phase == Phase::TestRepr);
  CHECK_THROWS_AS(TransferTag::parse("nophase"), Error);
  CHECK_THROWS_AS(TransferTag::parse("run/other"), Error);
}

TEST_CASE("participants exchange sealed artifacts through store and ledger") {
  MemoryContentStore store;
  Ledger ledger;
  auto cluster = make_cluster(store, ledger, 11, PartitionSpec::bank_loan());
  auto& n1 = cluster->node1.participant();
  auto& host = cluster->host.participant();
  const Bytes payload = to_bytes("id,f1\n1,0.5\n");
  const TransferTag tag{"r", Phase::TrainRepr};
  n1.send_artifact(kHost, payload, tag);
  CHECK(host.receive_artifact(kNode1, tag) == payload);
  CHECK(host.received().size() == 1);
  const auto blob = store.get(ledger.fetch_hash(kHost, kNode1, tag.str()));
  CHECK_FALSE(contains(blob, "id,f1"));

  // Not addressed to node2.
  try {
    cluster->node2.participant().receive_artifact(kNode1, tag);
    FAIL("node2 fetched the host's artifact");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotFound);
  }
  CHECK_THROWS_AS(n1.send_artifact(kHost, Bytes{}, tag), Error);
  CHECK_THROWS_AS(n1.send_artifact("stranger", payload, tag), Error);
}

TEST_CASE("full round trip: fabric equals the in-process oracle, six registrations") {
  Fixture f;
  const auto [t1, t2] = vertical_partition(f.split.train, f.spec);
  const auto seeds = SeedPlan::from_master(3);
  auto r = run_decentralized(t1, t2, f.split.test, f.spec, seeds, 4, f.store, f.ledger, "unit");
  auto& c = *r.cluster;

  const auto oracle = in_process_host_inputs(c.node1, c.node2, t1, t2);
  CHECK(r.training.host_inputs.ids == oracle.ids);
  CHECK(r.training.host_inputs.rows == oracle.rows);
  CHECK(r.training.host_inputs.width() == 10);

  const auto entries = f.ledger.history();
  REQUIRE(entries.size() == 6);
  int train_repr = 0, test_split = 0, test_repr = 0;
  for (const auto& e : entries) {
    const auto tag = TransferTag::parse(e.tag);
    CHECK(tag.run_id == "unit");
    train_repr += tag.phase == Phase::TrainRepr;
    test_split += tag.phase == Phase::TestSplit;
    test_repr += tag.phase == Phase::TestRepr;
    if (tag.phase == Phase::TestSplit) CHECK(e.sender == kHost);
    else CHECK(e.recipient == kHost);
  }
  CHECK(train_repr == 2);
  CHECK(test_split == 2);
  CHECK(test_repr == 2);
  CHECK(f.store.size() == 6);

  // The host only ever decrypted representations; nodes never saw labels
  // or each other's columns.
  for (const auto& a : c.host.participant().received())
    CHECK(classify_payload(a.payload) == PayloadKind::Representation);
  for (DataNode* node : {&c.node1, &c.node2}) {
    REQUIRE(node->participant().received().size() == 1);
    const auto split = parse_table_csv(to_text(node->participant().received()[0].payload), CsvOptions{{"id"}, {}});
    CHECK(split.columns == node->columns());
  }

  CHECK(r.predictions.ids.size() == f.split.test.rows());
  CHECK(r.host.report.total == f.split.test.rows());
  CHECK(std::is_sorted(r.predictions.ids.begin(), r.predictions.ids.end()));
}

TEST_CASE("runs are deterministic and sequential/concurrent agree") {
  Fixture a, b;
  const auto [t1, t2] = vertical_partition(a.split.train, a.spec);
  const auto seeds = SeedPlan::from_master(9);
  auto ra = run_decentralized(t1, t2, a.split.test, a.spec, seeds, 3, a.store, a.ledger, "d");
  auto rb = run_decentralized(t1, t2, b.split.test, b.spec, seeds, 3, b.store, b.ledger, "d");
  CHECK(ra.predictions.probabilities == rb.predictions.probabilities);

  MemoryContentStore store;
  Ledger ledger;
  auto cluster = make_cluster(store, ledger, seeds.keys, a.spec);
  ProtocolConfig cfg;
  cfg.run_id = "seq";
  cfg.concurrent_nodes = false;
  cfg.node1_train = default_train_config(3, seeds.node1_shuffle);
  cfg.node2_train = default_train_config(3, seeds.node2_shuffle);
  cfg.host_train = default_train_config(3, seeds.host_shuffle);
  cfg.node1_model_seed = seeds.node1_model;
  cfg.node2_model_seed = seeds.node2_model;
  cfg.host_model_seed = seeds.host_model;
  const auto seq = run_training_phase(cluster->node1, cluster->node2, cluster->host, t1, t2, label_map(t1), cfg);
  CHECK(seq.host_inputs.rows == ra.training.host_inputs.rows);
}

TEST_CASE("protocol state and shape errors") {
  Fixture f;
  auto cluster = make_cluster(f.store, f.ledger, 1, f.spec);
  auto kind = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Config;
  };
  CHECK(kind([&] { cluster->node1.model(); }) == ErrorKind::State);
  CHECK(kind([&] { cluster->host.collect_predictions("x"); }) == ErrorKind::State);
  CHECK(kind([&] { cluster->host.restore(nn::init_model<double>(nn::standard_layer_dims(12), 1), {6, 5}); }) ==
        ErrorKind::Shape);
  const auto [t1, t2] = vertical_partition(f.split.train, f.spec);
  CHECK(kind([&] {
          run_training_phase(cluster->node1, cluster->node2, cluster->host, t1, t2.select_rows({0, 1}), label_map(t1),
                             ProtocolConfig{});
        }) == ErrorKind::Join);
}
