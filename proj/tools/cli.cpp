#include "cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "splitchain/checkpoint.hpp"
#include "splitchain/numeric_text.hpp"
#include "splitchain/pipeline.hpp"

namespace splitchain::cli {

namespace fs = std::filesystem;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::State:
    case ErrorKind::NotFound:
      return kExitState;
    case ErrorKind::Integrity:
    case ErrorKind::Authentication:
    case ErrorKind::Authorization:
    case ErrorKind::Key:
    case ErrorKind::Join:
      return kExitInternal;
    default:
      return kExitInput;
  }
}

namespace {

constexpr const char* kFeaturesFile = "features.csv";
constexpr const char* kTrainFile = "train.csv";
constexpr const char* kTestFile = "test.csv";
constexpr const char* kNode1File = "node1_train.csv";
constexpr const char* kNode2File = "node2_train.csv";
constexpr const char* kPrepareManifest = "prepare_manifest.txt";
constexpr const char* kRunManifest = "run_manifest.txt";
constexpr const char* kMetricsFile = "metrics.kv";
constexpr const char* kReportFile = "report.txt";

using KeyValues = std::map<std::string, std::string>;

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

KeyValues read_kv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::State, "missing " + path.string());
  KeyValues kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

std::string render_kv(const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + '=' + v + '\n';
  return out;
}

const std::string& require_key(const KeyValues& kv, const std::string& key, const fs::path& from) {
  auto it = kv.find(key);
  if (it == kv.end()) fail(ErrorKind::State, "'" + key + "' missing from " + from.string());
  return it->second;
}

double kv_double(const KeyValues& kv, const std::string& key, const fs::path& from) {
  auto v = parse_double(require_key(kv, key, from));
  if (!v) fail(ErrorKind::State, "'" + key + "' in " + from.string() + " is not a number");
  return *v;
}

std::uint64_t kv_u64(const KeyValues& kv, const std::string& key, const fs::path& from) {
  const std::string& text = require_key(kv, key, from);
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size() || text.empty())
    fail(ErrorKind::State, "'" + key + "' in " + from.string() + " is not a count");
  return v;
}

struct SyntheticParams {
  std::size_t n = 5000;
  double rate = 0.096;
};

SyntheticParams parse_synthetic(const std::string& spec) {
  SyntheticParams p;
  std::istringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) fail(ErrorKind::Config, "--synthetic expects key=value pairs, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key == "n") {
      auto v = parse_int(value);
      if (!v || *v <= 0) fail(ErrorKind::Config, "bad synthetic n '" + value + "'");
      p.n = static_cast<std::size_t>(*v);
    } else if (key == "rate") {
      auto v = parse_double(value);
      if (!v) fail(ErrorKind::Config, "bad synthetic rate '" + value + "'");
      p.rate = *v;
    } else {
      fail(ErrorKind::Config, "unknown synthetic parameter '" + key + "'");
    }
  }
  return p;
}

std::string predictions_csv(const Predictions& p) {
  std::string out = "id,probability,class\n";
  for (std::size_t i = 0; i < p.ids.size(); ++i)
    out += std::to_string(p.ids[i]) + ',' + format_double(p.probabilities[i]) + ',' + std::to_string(p.classes[i]) + '\n';
  return out;
}

// Shared options of the train/infer commands.
struct FabricPaths {
  std::string out = "splitchain-out";
  std::string store_root;
  std::string ledger;

  fs::path store() const { return store_root.empty() ? fs::path(out) / "store" : fs::path(store_root); }
  fs::path journal() const { return ledger.empty() ? fs::path(out) / "ledger.journal" : fs::path(ledger); }
};

void add_fabric_options(CLI::App* cmd, FabricPaths& paths) {
  cmd->add_option("--store-root", paths.store_root, "Content store directory (default <out>/store)")
      ->envname("SPLITCHAIN_STORE_ROOT");
  cmd->add_option("--ledger", paths.ledger, "Ledger journal path (default <out>/ledger.journal)")
      ->envname("SPLITCHAIN_LEDGER");
}

// ---------------------------------------------------------------- prepare

struct PrepareArgs {
  std::string csv;
  std::string synthetic;
  std::uint64_t seed = 7;
  std::string out = "splitchain-out";
  double ratio = 0.7;
  bool stratified = false;
  double corr_threshold = EngineerConfig{}.corr_threshold;
};

int cmd_prepare(const PrepareArgs& a) {
  if (a.csv.empty() == a.synthetic.empty()) fail(ErrorKind::Config, "give exactly one of --csv or --synthetic");
  const SeedPlan seeds = SeedPlan::from_master(a.seed);

  FeatureTable features;
  KeyValues manifest;
  if (!a.csv.empty()) {
    if (!fs::exists(a.csv)) fail(ErrorKind::Io, "input file not found: " + a.csv);
    EngineerConfig ec;
    ec.corr_threshold = a.corr_threshold;
    features = engineer_features(load_csv(a.csv), ec);
    manifest["source"] = "csv:" + a.csv;
    manifest["corr_threshold"] = format_double(a.corr_threshold);
  } else {
    const auto p = parse_synthetic(a.synthetic);
    features = synthesize_dataset(p.n, p.rate, derive_seed(a.seed, 2));
    manifest["source"] = "synthetic:n=" + std::to_string(p.n) + ",rate=" + format_double(p.rate);
  }
  const PartitionSpec spec = PartitionSpec::bank_loan();
  features = features.select_columns(spec.all_columns());
  const auto split = split_train_test(features, a.ratio, seeds.split, a.stratified);
  const auto [t1, t2] = vertical_partition(split.train, spec);

  const fs::path out(a.out);
  fs::create_directories(out);
  save_csv(features, out / kFeaturesFile);
  save_csv(split.train, out / kTrainFile);
  save_csv(split.test, out / kTestFile);
  save_csv(t1, out / kNode1File);
  save_csv(t2, out / kNode2File);

  std::size_t positives = 0;
  for (int l : *features.labels) positives += static_cast<std::size_t>(l);
  manifest["seed"] = std::to_string(a.seed);
  manifest["ratio"] = format_double(a.ratio);
  manifest["stratified"] = a.stratified ? "1" : "0";
  manifest["rows"] = std::to_string(features.rows());
  manifest["positives"] = std::to_string(positives);
  manifest["train_rows"] = std::to_string(split.train.rows());
  manifest["test_rows"] = std::to_string(split.test.rows());
  manifest["features"] = std::to_string(features.width());
  manifest["artifacts"] = std::string(kFeaturesFile) + ";" + kTrainFile + ";" + kTestFile + ";" + kNode1File + ";" +
                          kNode2File;
  write_text(out / kPrepareManifest, render_kv(manifest));
  std::cout << "prepared " << features.rows() << " rows (" << positives << " positive): " << split.train.rows()
            << " train / " << split.test.rows() << " test in " << out.string() << '\n';
  return kExitOk;
}

// ------------------------------------------------------------------ train

struct TrainArgs {
  std::string mode;
  std::optional<std::uint64_t> seed;
  int epochs = 50;
  std::string run_id;
  bool plot = false;
  FabricPaths paths;
};

void add_evaluation(KeyValues& metrics, std::string& report, const Evaluation& e) {
  std::istringstream kv(e.report.to_key_values(e.name + "."));
  std::string line;
  while (std::getline(kv, line)) {
    const auto eq = line.find('=');
    metrics[line.substr(0, eq)] = line.substr(eq + 1);
  }
  metrics[e.name + ".convergence_epoch"] = std::to_string(convergence_epoch(e.history));
  metrics[e.name + ".final_train_loss"] = format_double(e.history.loss.back());
  metrics[e.name + ".final_train_accuracy"] = format_double(e.history.accuracy.back());
  report += "== " + e.name + " ==\n" + e.report.to_text() + '\n';
}

void write_run_outputs(const fs::path& dir, const std::vector<const Evaluation*>& evals, bool plot) {
  KeyValues metrics;
  std::string report;
  std::vector<NamedHistory> curves;
  for (const Evaluation* e : evals) {
    add_evaluation(metrics, report, *e);
    curves.push_back({e->name, e->history});
  }
  write_text(dir / kMetricsFile, render_kv(metrics));
  write_text(dir / kReportFile, report);
  emit_curves(curves, dir / "curves", plot);
  std::cout << report;
}

void add_train_config(KeyValues& manifest, const std::string& prefix, const nn::TrainConfig& cfg) {
  manifest[prefix + ".epochs"] = std::to_string(cfg.epochs);
  manifest[prefix + ".batch_size"] = std::to_string(cfg.batch_size);
  manifest[prefix + ".learning_rate"] = format_double(cfg.learning_rate);
  manifest[prefix + ".adam_beta1"] = format_double(cfg.adam_beta1);
  manifest[prefix + ".adam_beta2"] = format_double(cfg.adam_beta2);
  manifest[prefix + ".adam_epsilon"] = format_double(cfg.adam_epsilon);
  manifest[prefix + ".shuffle_seed"] = std::to_string(cfg.shuffle_seed);
}

int cmd_train(const TrainArgs& a) {
  const fs::path root(a.paths.out);
  const KeyValues prep = read_kv(root / kPrepareManifest);
  const std::uint64_t seed = a.seed ? *a.seed : kv_u64(prep, "seed", root / kPrepareManifest);
  const SeedPlan seeds = SeedPlan::from_master(seed);
  const PartitionSpec spec = PartitionSpec::bank_loan();
  if (a.epochs < 1) fail(ErrorKind::Config, "--epochs must be >= 1");

  const fs::path dir = root / a.mode;
  fs::create_directories(dir);
  KeyValues manifest;
  manifest["mode"] = a.mode;
  manifest["seed"] = std::to_string(seed);
  manifest["epochs"] = std::to_string(a.epochs);

  auto load_prepared = [&](const char* name) {
    const fs::path p = root / name;
    if (!fs::exists(p)) fail(ErrorKind::State, "prepared artifact missing: " + p.string() + " (run prepare first)");
    return load_csv(p);
  };
  const FeatureTable test = load_prepared(kTestFile);

  if (a.mode == "decentralized") {
    const std::string run_id = a.run_id.empty() ? "train-s" + std::to_string(seed) : a.run_id;
    DirectoryContentStore store(a.paths.store());
    Ledger ledger(a.paths.journal());
    const FeatureTable t1 = load_prepared(kNode1File);
    const FeatureTable t2 = load_prepared(kNode2File);
    auto result = run_decentralized(t1, t2, test, spec, seeds, a.epochs, store, ledger, run_id);
    auto& cluster = *result.cluster;
    for (const std::string& who : {kNode1, kNode2, kHost}) fs::create_directories(dir / who);

    nn::save_model(cluster.node1.model(), dir / kNode1 / "model.ckpt");
    cluster.node1.scaler().save(dir / kNode1 / "scaler.kv");
    nn::save_model(cluster.node2.model(), dir / kNode2 / "model.ckpt");
    cluster.node2.scaler().save(dir / kNode2 / "scaler.kv");
    nn::save_model(cluster.host.model(), dir / kHost / "model.ckpt");
    write_text(dir / kHost / "node_widths.txt", std::to_string(cluster.host.node_widths()[0]) + " " +
                                                    std::to_string(cluster.host.node_widths()[1]) + "\n");
    public_directory(seeds.keys).save(dir / "public_keys.txt");
    write_text(dir / "predictions.csv", predictions_csv(result.predictions));
    write_run_outputs(dir, {&result.node1, &result.node2, &result.host}, a.plot);

    manifest["run_id"] = run_id;
    manifest["key_seed"] = std::to_string(seeds.keys);
    manifest["store_root"] = a.paths.store().string();
    manifest["ledger"] = a.paths.journal().string();
    manifest["seq.train-repr.node1"] = std::to_string(result.training.ledger_seqs[0]);
    manifest["seq.train-repr.node2"] = std::to_string(result.training.ledger_seqs[1]);
    manifest["seq.test-split.node1"] = std::to_string(result.inference_seqs[0]);
    manifest["seq.test-split.node2"] = std::to_string(result.inference_seqs[1]);
    manifest["seq.test-repr.node1"] = std::to_string(result.inference_seqs[2]);
    manifest["seq.test-repr.node2"] = std::to_string(result.inference_seqs[3]);
    add_train_config(manifest, "node1", default_train_config(a.epochs, seeds.node1_shuffle));
    add_train_config(manifest, "node2", default_train_config(a.epochs, seeds.node2_shuffle));
    add_train_config(manifest, "host", default_train_config(a.epochs, seeds.host_shuffle));
    manifest["node1.model_seed"] = std::to_string(seeds.node1_model);
    manifest["node2.model_seed"] = std::to_string(seeds.node2_model);
    manifest["host.model_seed"] = std::to_string(seeds.host_model);
  } else if (a.mode == "centralized") {
    auto result = run_centralized(load_prepared(kTrainFile), test, spec, seeds, a.epochs);
    nn::save_model(result.model, dir / "model.ckpt");
    result.scaler.save(dir / "scaler.kv");
    write_run_outputs(dir, {&result.evaluation}, a.plot);
    add_train_config(manifest, "centralized", default_train_config(a.epochs, seeds.central_shuffle));
    manifest["centralized.model_seed"] = std::to_string(seeds.central_model);
  } else if (a.mode == "local-node1" || a.mode == "local-node2") {
    const int idx = a.mode == "local-node1" ? 1 : 2;
    const FeatureTable own = load_prepared(idx == 1 ? kNode1File : kNode2File);
    auto result = run_local(idx, own, test, spec, seeds, a.epochs);
    nn::save_model(result.model, dir / "model.ckpt");
    result.scaler.save(dir / "scaler.kv");
    write_run_outputs(dir, {&result.evaluation}, a.plot);
    const std::string name = idx == 1 ? kNode1 : kNode2;
    add_train_config(manifest, name, default_train_config(a.epochs, idx == 1 ? seeds.node1_shuffle : seeds.node2_shuffle));
    manifest[name + ".model_seed"] = std::to_string(idx == 1 ? seeds.node1_model : seeds.node2_model);
  } else {
    fail(ErrorKind::Config, "unknown mode '" + a.mode + "'");
  }
  write_text(dir / kRunManifest, render_kv(manifest));
  return kExitOk;
}

// ------------------------------------------------------------------ infer

struct InferArgs {
  std::string csv;
  std::string run_id;
  std::string predictions;
  FabricPaths paths;
};

int cmd_infer(const InferArgs& a) {
  const fs::path dir = fs::path(a.paths.out) / "decentralized";
  const fs::path manifest_path = dir / kRunManifest;
  if (!fs::exists(manifest_path)) fail(ErrorKind::State, "no trained decentralized run in " + dir.string());
  const KeyValues manifest = read_kv(manifest_path);
  if (a.csv.empty()) fail(ErrorKind::Config, "--csv with the rows to predict is required");
  if (!fs::exists(a.csv)) fail(ErrorKind::Io, "input file not found: " + a.csv);

  FabricPaths paths = a.paths;
  if (paths.store_root.empty()) paths.store_root = require_key(manifest, "store_root", manifest_path);
  if (paths.ledger.empty()) paths.ledger = require_key(manifest, "ledger", manifest_path);
  DirectoryContentStore store(paths.store());
  Ledger ledger(paths.journal());

  const PartitionSpec spec = PartitionSpec::bank_loan();
  auto cluster = make_cluster(store, ledger, kv_u64(manifest, "key_seed", manifest_path), spec);
  auto load_node = [&](DataNode& node) {
    const fs::path nd = dir / node.id();
    if (!fs::exists(nd / "model.ckpt") || !fs::exists(nd / "scaler.kv"))
      fail(ErrorKind::State, "missing model for " + node.id() + " in " + nd.string());
    node.restore(nn::load_model(nd / "model.ckpt"), Scaler::load(nd / "scaler.kv"));
  };
  load_node(cluster->node1);
  load_node(cluster->node2);
  if (!fs::exists(dir / kHost / "model.ckpt")) fail(ErrorKind::State, "missing host model in " + dir.string());
  std::vector<int> widths;
  {
    std::ifstream in(dir / kHost / "node_widths.txt");
    int w = 0;
    while (in >> w) widths.push_back(w);
  }
  cluster->host.restore(nn::load_model(dir / kHost / "model.ckpt"), widths);

  std::string run_id = a.run_id;
  if (run_id.empty()) {
    const std::string base = require_key(manifest, "run_id", manifest_path) + "-infer-";
    LedgerFilter f;
    f.tag_prefix = base;
    f.recipient = kNode1;
    run_id = base + std::to_string(ledger.history(f).size() + 1);
  }
  LedgerFilter existing;
  existing.tag_prefix = run_id + "/";
  if (!ledger.history(existing).empty()) fail(ErrorKind::Config, "run id '" + run_id + "' already used in the ledger");

  const FeatureTable rows = load_csv(a.csv).select_columns(spec.all_columns());
  auto outcome = run_inference_phase(cluster->host, cluster->node1, cluster->node2, rows, run_id);
  const fs::path out = a.predictions.empty() ? dir / ("predictions_" + run_id + ".csv") : fs::path(a.predictions);
  write_text(out, predictions_csv(outcome.predictions));
  std::cout << "run " << run_id << ": " << outcome.predictions.ids.size() << " predictions -> " << out.string() << '\n';
  if (rows.has_labels()) {
    const auto truth = labels_in_order(rows, outcome.predictions.ids);
    std::cout << "accuracy " << format_double(accuracy(truth, outcome.predictions.classes)) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- compare

struct CompareArgs {
  std::string out = "splitchain-out";
  std::string reference;
};

struct CompareRow {
  std::string label;
  std::string key;
  double accuracy, precision, recall, f1;
  int convergence;
};

std::vector<CompareRow> load_rows(const fs::path& root) {
  const fs::path dec = root / "decentralized" / kMetricsFile;
  const fs::path cen = root / "centralized" / kMetricsFile;
  if (!fs::exists(dec) || !fs::exists(cen))
    fail(ErrorKind::State, "compare needs both decentralized and centralized runs under " + root.string());
  KeyValues kv = read_kv(dec);
  for (auto& [k, v] : read_kv(cen)) kv[k] = v;
  std::vector<CompareRow> rows;
  const std::pair<const char*, const char*> models[] = {
      {"N1: personal details", "node1"}, {"N2: bank details", "node2"}, {"H: aggregate", "host"},
      {"centralized", "centralized"}};
  for (const auto& [label, key] : models) {
    const std::string k = key;
    rows.push_back({label, k, kv_double(kv, k + ".accuracy", root), kv_double(kv, k + ".macro.precision", root),
                    kv_double(kv, k + ".macro.recall", root), kv_double(kv, k + ".macro.f1", root),
                    static_cast<int>(kv_u64(kv, k + ".convergence_epoch", root))});
  }
  return rows;
}

int cmd_compare(const CompareArgs& a) {
  const fs::path root(a.out);
  const auto rows = load_rows(root);
  const auto ref = a.reference.empty() ? rows : load_rows(a.reference);

  char line[256];
  std::string text;
  std::snprintf(line, sizeof line, "%-22s %9s %7s %7s %7s %6s %10s\n", "model", "accuracy", "prec", "recall", "f1",
                "conv", "d-acc-ref");
  text += line;
  KeyValues kv;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const double delta = r.accuracy - ref[i].accuracy;
    std::snprintf(line, sizeof line, "%-22s %9.4f %7.2f %7.2f %7.2f %6d %+10.4f\n", r.label.c_str(), r.accuracy,
                  r.precision, r.recall, r.f1, r.convergence, delta);
    text += line;
    kv[r.key + ".accuracy"] = format_double(r.accuracy);
    kv[r.key + ".macro.f1"] = format_double(r.f1);
    kv[r.key + ".convergence_epoch"] = std::to_string(r.convergence);
    kv[r.key + ".accuracy_delta_vs_reference"] = format_double(delta);
  }
  const double gap = rows[2].accuracy - rows[3].accuracy;
  std::snprintf(line, sizeof line, "\naccuracy(H) - accuracy(centralized) = %+.4f (%+.2f points)\n", gap, 100.0 * gap);
  text += line;
  std::snprintf(line, sizeof line, "convergence epoch: H %d, centralized %d\n", rows[2].convergence,
                rows[3].convergence);
  text += line;
  kv["host_minus_centralized.accuracy"] = format_double(gap);
  write_text(root / "comparison.txt", text);
  write_text(root / "comparison.kv", render_kv(kv));
  std::cout << text;
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Vertical split learning over an encrypted, content-addressed, ledger-registered fabric", "splitchain"};
  app.require_subcommand(1);

  PrepareArgs prep;
  auto* prepare = app.add_subcommand("prepare", "Ingest or synthesize data, engineer features, split and partition");
  prepare->add_option("--csv", prep.csv, "Bank-loan CSV with the raw schema")->envname("SPLITCHAIN_CSV");
  prepare->add_option("--synthetic", prep.synthetic, "Synthetic data, e.g. n=5000,rate=0.096")
      ->envname("SPLITCHAIN_SYNTHETIC");
  prepare->add_option("--seed", prep.seed, "Master seed")->envname("SPLITCHAIN_SEED");
  prepare->add_option("--out", prep.out, "Output directory")->envname("SPLITCHAIN_OUT");
  prepare->add_option("--ratio", prep.ratio, "Training fraction");
  prepare->add_flag("--stratified", prep.stratified, "Stratify the split by label");
  prepare->add_option("--corr-threshold", prep.corr_threshold, "Minimum |corr| with the label to keep a column");

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "Train in one of the four modes and write reports");
  train->add_option("--mode", tr.mode, "local-node1 | local-node2 | decentralized | centralized")
      ->required()
      ->envname("SPLITCHAIN_MODE")
      ->check(CLI::IsMember({"local-node1", "local-node2", "decentralized", "centralized"}));
  train->add_option("--seed", tr.seed, "Master seed (default: the prepare seed)")->envname("SPLITCHAIN_SEED");
  train->add_option("--epochs", tr.epochs, "Training epochs")->envname("SPLITCHAIN_EPOCHS");
  train->add_option("--out", tr.paths.out, "Prepared directory; results go to <out>/<mode>")->envname("SPLITCHAIN_OUT");
  train->add_option("--run-id", tr.run_id, "Ledger namespace for this run")->envname("SPLITCHAIN_RUN_ID");
  train->add_flag("--plot", tr.plot, "Also render SVG training curves");
  add_fabric_options(train, tr.paths);

  InferArgs inf;
  auto* infer = app.add_subcommand("infer", "Predict new rows through the node/host round trip");
  infer->add_option("--csv", inf.csv, "Rows to predict (id + the ten feature columns)")->envname("SPLITCHAIN_CSV");
  infer->add_option("--out", inf.paths.out, "Directory holding the trained decentralized run")
      ->envname("SPLITCHAIN_OUT");
  infer->add_option("--run-id", inf.run_id, "Ledger namespace (default: fresh)")->envname("SPLITCHAIN_RUN_ID");
  infer->add_option("--predictions", inf.predictions, "Output CSV path");
  add_fabric_options(infer, inf.paths);

  CompareArgs cmp;
  auto* compare = app.add_subcommand("compare", "Side-by-side report of N1, N2, H and the centralized baseline");
  compare->add_option("--out", cmp.out, "Directory with decentralized and centralized runs")->envname("SPLITCHAIN_OUT");
  compare->add_option("--reference", cmp.reference, "Another output directory to diff against");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*prepare) return cmd_prepare(prep);
    if (*train) return cmd_train(tr);
    if (*infer) return cmd_infer(inf);
    if (*compare) return cmd_compare(cmp);
  } catch (const Error& e) {
    std::cerr << "splitchain: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "splitchain: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "splitchain: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace splitchain::cli
