//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

// Batch front door. Every subcommand resolves its options into one JSON
// object, records it in a manifest next to the primary output and then runs
// from that object alone, so `replay` can re-run any manifest.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cliffkit/attribution.h"
#include "cliffkit/checkpoint.h"
#include "cliffkit/evaluation.h"
#include "cliffkit/io.h"
#include "cliffkit/pairs.h"
#include "cliffkit/render.h"
#include "cliffkit/synthetic.h"
#include "cliffkit/training.h"
#include "cliffkit/version.h"

namespace fs = std::filesystem;
using namespace cliffkit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitCompat = 4;
constexpr std::string_view kManifestSchema = "cliffkit-manifest/1";

// Raised when inputs do not fit together (checkpoint vs pairs, manifest
// hashes); maps to exit code 4.
class CompatibilityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string dump(const ojson &j) { return j.dump(2) + "\n"; }

struct Run {
  std::string subcommand;
  ojson args;
  std::vector<std::string> inputs;  // keys of args holding input paths
  std::vector<std::string> outputs; // keys of args holding output paths
  std::string manifest_path;
};

// Manifest text; outputs embed its hash.
std::string manifest_text(const Run &run) {
  ojson m;
  m["schema"] = kManifestSchema;
  m["tool_version"] = kToolVersion;
  m["subcommand"] = run.subcommand;
  m["args"] = run.args;
  ojson inputs = ojson::array();
  for (const std::string &key : run.inputs) {
    const ojson &v = run.args.at(key);
    const std::vector<std::string> paths =
        v.is_array() ? v.get<std::vector<std::string>>() : std::vector<std::string>{v.get<std::string>()};
    for (const std::string &p : paths)
      inputs.push_back({{"path", p}, {"sha256", file_sha256(p)}});
  }
  m["inputs"] = inputs;
  ojson outputs = ojson::array();
  for (const std::string &key : run.outputs)
    outputs.push_back(run.args.at(key));
  m["outputs"] = outputs;
  return dump(m);
}

std::vector<double> parse_number_list(const std::string &text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception &) {
      throw InputError("not a number: '" + item + "'");
    }
    if (used != item.size())
      throw InputError("not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty())
    throw InputError("empty number list");
  return out;
}

std::vector<AttributionMethod> parse_methods(const std::vector<std::string> &names) {
  std::vector<AttributionMethod> out;
  for (const std::string &n : names) {
    try {
      out.push_back(parse_method(n));
    } catch (const std::invalid_argument &e) {
      throw InputError(e.what());
    }
  }
  return out;
}

std::vector<std::string> method_names(const std::vector<AttributionMethod> &methods) {
  std::vector<std::string> out;
  for (AttributionMethod m : methods)
    out.push_back(method_name(m));
  return out;
}

// ---- synth ---------------------------------------------------------------

int run_synth(const ojson &a, const std::string &manifest_sha) {
  (void)manifest_sha;
  SyntheticConfig c;
  c.scaffold_count = a.at("scaffolds").get<std::size_t>();
  c.decoration_count = a.at("decorations").get<std::size_t>();
  c.noise_sd = a.at("noise").get<double>();
  c.seed = a.at("seed").get<std::uint64_t>();
  c.target_id = a.at("target").get<std::string>();
  SyntheticDataset data;
  try {
    data = generate_synthetic_dataset(c);
  } catch (const std::invalid_argument &e) {
    throw InputError(e.what());
  }
  std::vector<CompoundRow> rows;
  for (std::size_t k = 0; k < data.compounds.size(); ++k)
    rows.push_back({data.compounds[k].id, data.compounds[k].target_id, data.smiles[k],
                    data.compounds[k].pic50});
  write_file(a.at("out").get<std::string>(), format_compounds_csv(rows));
  return kExitOk;
}

// ---- pairs ---------------------------------------------------------------

int run_pairs(const ojson &a, const std::string &manifest_sha) {
  const CompoundTable table =
      read_compounds_csv(a.at("compounds").get<std::string>(), a.at("strict").get<bool>());
  for (const std::string &w : table.warnings)
    std::cerr << "warning: " << w << "\n";
  PairGenConfig c;
  c.min_mcs_fraction = a.at("min_fraction").get<double>();
  c.min_delta = a.at("min_delta").get<double>();
  c.min_pairs_per_target = a.at("min_pairs").get<std::size_t>();
  c.mcs_node_budget = a.at("mcs_budget").get<std::uint64_t>();
  try {
    c.validate();
  } catch (const std::invalid_argument &e) {
    throw InputError(e.what());
  }
  PairGenSummary summary;
  const std::vector<CliffPair> pairs = generate_cliff_pairs(table.compounds, c, &summary);
  write_file(a.at("out").get<std::string>(), format_pairs_jsonl(pairs));
  ojson s = pair_summary_json(summary, c);
  s["skipped_rows"] = table.skipped;
  s["manifest_sha256"] = manifest_sha;
  write_file(a.at("summary").get<std::string>(), dump(s));
  std::cerr << pairs.size() << " pairs written\n";
  return kExitOk;
}

// ---- train ---------------------------------------------------------------

SplitMode parse_split_mode(const std::string &s) {
  if (s == "pair")
    return SplitMode::Pair;
  if (s == "compound")
    return SplitMode::CompoundDisjoint;
  throw InputError("unknown split mode '" + s + "' (expected pair or compound)");
}

int run_train(const ojson &a, const std::string &manifest_sha) {
  const std::string pairs_path = a.at("pairs").get<std::string>();
  const std::vector<CliffPair> pairs = read_pairs_jsonl(pairs_path);
  LossConfig loss;
  TrainConfig train_config;
  ModelConfig model_config;
  try {
    loss.variant = parse_variant(a.at("variant").get<std::string>());
    loss.lambda = a.at("lambda").get<double>();
    loss.alpha = a.at("alpha").get<double>();
    loss.node_loss_weight = a.at("node_weight").get<double>();
    loss.validate();
    train_config.learning_rate = a.at("lr").get<double>();
    train_config.max_epochs = a.at("epochs").get<std::size_t>();
    train_config.patience = a.at("patience").get<std::size_t>();
    train_config.seed = a.at("seed").get<std::uint64_t>();
    train_config.batchnorm_scope = parse_batchnorm_scope(a.at("batchnorm_scope").get<std::string>());
    train_config.validate();
    model_config.hidden_dim = a.at("hidden").get<std::size_t>();
    model_config.validate();
  } catch (const std::invalid_argument &e) {
    throw InputError(e.what());
  }
  const std::string mode_name = a.at("split_mode").get<std::string>();
  const DatasetSplit split =
      split_pairs(pairs, {}, train_config.seed, parse_split_mode(mode_name));
  if (split.train.empty() || split.validation.empty())
    throw InputError("pairs file too small for a train/validation split");

  const MpnnModel initial = init_parameters(model_config, train_config.seed);
  const TrainResult result = train(initial, split, loss, train_config, [](const EpochRecord &e) {
    std::fprintf(stderr, "epoch %zu mse %.6f node %.6f val_rmse %.6f\n", e.epoch, e.mse,
                 e.node, e.validation_rmse);
  });

  ojson meta;
  meta["loss"] = loss_config_json(loss);
  meta["train"] = train_config_json(train_config);
  meta["split"] = {{"seed", train_config.seed},
                   {"mode", mode_name},
                   {"ratios", {0.7, 0.1, 0.2}},
                   {"sizes", {split.train.size(), split.validation.size(), split.test.size()}}};
  meta["pairs_sha256"] = file_sha256(pairs_path);
  meta["manifest_sha256"] = manifest_sha;
  const std::string out = a.at("out").get<std::string>();
  save_checkpoint(result.model, out, meta);

  ojson report;
  report["schema"] = kTrainReportSchema;
  report["manifest_sha256"] = manifest_sha;
  report["checkpoint_sha256"] = file_sha256(out);
  report["loss"] = meta["loss"];
  report["train"] = meta["train"];
  report["split"] = meta["split"];
  const SplitEvaluation test = evaluate_split(result.model, split.test.empty() ? split.validation : split.test);
  report["test"] = {{"rmse", test.rmse},
                    {"pcc", test.pcc_defined ? ojson(test.pcc) : ojson(nullptr)},
                    {"predictions", test.predictions.size()}};
  report["report"] = train_report_json(result.report, a.at("wall_time").get<bool>());
  write_file(a.at("report").get<std::string>(), dump(report));
  std::cerr << "best epoch " << result.report.best_epoch << ", test rmse " << test.rmse << "\n";
  return kExitOk;
}

// ---- shared checkpoint helpers ------------------------------------------

struct LoadedModel {
  Checkpoint checkpoint;
  std::string sha256;
  std::string label;
};

LoadedModel load_model(const std::string &path) {
  LoadedModel m;
  m.checkpoint = load_checkpoint(path);
  m.sha256 = file_sha256(path);
  const ModelConfig &c = m.checkpoint.model.config;
  if (c.atom_feature_width != kAtomFeatureWidth || c.bond_feature_width != kBondFeatureWidth)
    throw CompatibilityError("checkpoint " + path + " expects feature widths " +
                             std::to_string(c.atom_feature_width) + "/" +
                             std::to_string(c.bond_feature_width) + ", pairs featurize to " +
                             std::to_string(kAtomFeatureWidth) + "/" +
                             std::to_string(kBondFeatureWidth));
  const nlohmann::json &meta = m.checkpoint.metadata;
  m.label = meta.contains("loss") ? meta["loss"].value("variant", "model") : "model";
  return m;
}

// Pairs of the requested subset. "test" and "validation" replay the split
// recorded in the checkpoint and require the same pairs file.
std::vector<CliffPair> select_pairs(const std::vector<CliffPair> &pairs,
                                    const std::string &pairs_sha, const LoadedModel &m,
                                    const std::string &subset) {
  if (subset == "all")
    return pairs;
  if (subset != "test" && subset != "validation" && subset != "train")
    throw InputError("unknown subset '" + subset + "' (expected all, train, validation or test)");
  const nlohmann::json &meta = m.checkpoint.metadata;
  if (!meta.contains("split") || !meta.contains("pairs_sha256"))
    throw CompatibilityError("checkpoint carries no split record; use --subset all");
  if (meta["pairs_sha256"].get<std::string>() != pairs_sha)
    throw CompatibilityError("checkpoint was trained on a different pairs file");
  const DatasetSplit split =
      split_pairs(pairs, {}, meta["split"]["seed"].get<std::uint64_t>(),
                  parse_split_mode(meta["split"]["mode"].get<std::string>()));
  if (subset == "train")
    return split.train;
  return subset == "validation" ? split.validation : split.test;
}

// ---- eval ----------------------------------------------------------------

int run_eval(const ojson &a, const std::string &manifest_sha) {
  const std::string pairs_path = a.at("pairs").get<std::string>();
  const std::vector<CliffPair> all_pairs = read_pairs_jsonl(pairs_path);
  const std::string pairs_sha = file_sha256(pairs_path);
  const auto checkpoint_paths = a.at("checkpoints").get<std::vector<std::string>>();
  if (checkpoint_paths.empty() || checkpoint_paths.size() > 2)
    throw InputError("eval takes one or two checkpoints");
  std::vector<LoadedModel> models;
  for (const std::string &p : checkpoint_paths)
    models.push_back(load_model(p));
  const auto labels = a.at("labels").get<std::vector<std::string>>();
  if (!labels.empty()) {
    if (labels.size() != models.size())
      throw InputError("one label per checkpoint is required");
    for (std::size_t k = 0; k < models.size(); ++k)
      models[k].label = labels[k];
  } else if (models.size() == 2 && models[0].label == models[1].label) {
    models[0].label += "_a";
    models[1].label += "_b";
  }

  const std::string subset = a.at("subset").get<std::string>();
  const std::vector<CliffPair> pairs = select_pairs(all_pairs, pairs_sha, models[0], subset);
  if (models.size() == 2 &&
      select_pairs(all_pairs, pairs_sha, models[1], subset).size() != pairs.size())
    throw CompatibilityError("the two checkpoints select different pair subsets");
  if (pairs.size() < 1)
    throw InputError("no pairs in the selected subset");

  ojson report;
  report["schema"] = kEvalReportSchema;
  report["manifest_sha256"] = manifest_sha;
  report["pairs_sha256"] = pairs_sha;
  report["subset"] = subset;
  report["n_pairs"] = pairs.size();
  ojson metrics = ojson::array();
  for (const LoadedModel &m : models) {
    ojson entry;
    entry["label"] = m.label;
    entry["checkpoint_sha256"] = m.sha256;
    entry["metrics"] = metric_report_json(evaluate_targets(m.checkpoint.model, pairs));
    metrics.push_back(entry);
  }
  report["models"] = metrics;

  const std::string csv_path = a.at("csv").get<std::string>();
  if (models.size() == 2) {
    const auto methods = parse_methods(a.at("methods").get<std::vector<std::string>>());
    const std::vector<double> thresholds = a.at("thresholds").get<std::vector<double>>();
    AttributionConfig ac;
    ac.ig_steps = a.at("ig_steps").get<std::size_t>();
    const AttributionCache ca = attribute_compounds(models[0].checkpoint.model, pairs, methods, ac);
    const AttributionCache cb = attribute_compounds(models[1].checkpoint.model, pairs, methods, ac);
    const SweepResult sweep =
        threshold_sweep(pairs, ca, models[0].label, &cb, models[1].label, methods, thresholds);
    report["direction"] = sweep_json(sweep);
    write_file(csv_path, sweep_csv(sweep));
  } else {
    write_file(csv_path, "threshold,method,model,mean_g_dir,n_pairs\n");
  }
  write_file(a.at("out").get<std::string>(), dump(report));
  return kExitOk;
}

// ---- attribute -----------------------------------------------------------

int run_attribute(const ojson &a, const std::string &manifest_sha) {
  (void)manifest_sha;
  const std::string pairs_path = a.at("pairs").get<std::string>();
  const std::vector<CliffPair> all_pairs = read_pairs_jsonl(pairs_path);
  const LoadedModel m = load_model(a.at("checkpoint").get<std::string>());
  const std::vector<CliffPair> pairs =
      select_pairs(all_pairs, file_sha256(pairs_path), m, a.at("subset").get<std::string>());
  const auto methods = parse_methods(a.at("methods").get<std::vector<std::string>>());
  AttributionConfig ac;
  ac.ig_steps = a.at("ig_steps").get<std::size_t>();
  if (ac.ig_steps < 1)
    throw InputError("ig_steps must be at least 1");
  const AttributionCache cache = attribute_compounds(m.checkpoint.model, pairs, methods, ac);
  std::vector<AttributionRecord> records;
  for (const auto &[id, per_method] : cache)
    for (AttributionMethod method : methods)
      records.push_back({id, method, per_method.at(method), m.sha256});
  write_file(a.at("out").get<std::string>(), format_attributions_jsonl(records));
  return kExitOk;
}

// ---- render --------------------------------------------------------------

int run_render(const ojson &a, const std::string &manifest_sha) {
  const std::vector<CliffPair> pairs = read_pairs_jsonl(a.at("pairs").get<std::string>());
  const std::string pair_id = a.at("pair_id").get<std::string>();
  const CliffPair *pair = nullptr;
  for (const CliffPair &p : pairs)
    if (p.pair_id == pair_id)
      pair = &p;
  if (pair == nullptr)
    throw InputError("pair '" + pair_id + "' not found");
  const auto records =
      parse_attributions_jsonl(read_file(a.at("attributions").get<std::string>()));
  std::map<std::string, std::map<AttributionMethod, std::vector<double>>> by_compound;
  for (const AttributionRecord &r : records)
    by_compound[r.compound_id][r.method] = r.node_values;

  const auto [truth_i, truth_j] = ground_truth(*pair);
  RenderConfig rc;
  rc.seed = a.at("layout_seed").get<std::uint64_t>();
  const fs::path dir = a.at("out_dir").get<std::string>();
  const struct {
    const std::string &id;
    const MolecularGraph &graph;
    double y;
    const std::vector<int> &truth;
  } sides[2] = {{pair->compound_i, pair->graph_i, pair->y_i, truth_i},
                {pair->compound_j, pair->graph_j, pair->y_j, truth_j}};
  for (const auto &side : sides) {
    const auto it = by_compound.find(side.id);
    if (it == by_compound.end())
      throw InputError("compound '" + side.id + "' has no attribution records");
    std::vector<RenderPanel> panels;
    panels.push_back({"ground truth", std::vector<double>(side.truth.begin(), side.truth.end())});
    for (AttributionMethod method : all_methods()) {
      const auto found = it->second.find(method);
      if (found == it->second.end())
        continue;
      if (found->second.size() != side.graph.num_atoms())
        throw CompatibilityError("attribution for '" + side.id + "' has the wrong atom count");
      panels.push_back({method_name(method), found->second});
    }
    std::string svg = render_compound_svg(
        side.graph, pair_id + " " + side.id + " pIC50 " + format_fixed(side.y, 2), panels, rc);
    const std::size_t first_line = svg.find('\n') + 1;
    svg.insert(first_line, "<!-- manifest_sha256: " + manifest_sha + " -->\n");
    write_file(dir / (pair_id + "_" + side.id + ".svg"), svg);
  }
  return kExitOk;
}

// ---- dispatch ------------------------------------------------------------

Run describe(const std::string &subcommand, const ojson &args) {
  Run r{subcommand, args, {}, {}, {}};
  auto primary = [&](const std::string &key) {
    r.manifest_path = args.at(key).get<std::string>() + ".manifest.json";
  };
  if (subcommand == "synth") {
    r.outputs = {"out"};
    primary("out");
  } else if (subcommand == "pairs") {
    r.inputs = {"compounds"};
    r.outputs = {"out", "summary"};
    primary("out");
  } else if (subcommand == "train") {
    r.inputs = {"pairs"};
    r.outputs = {"out", "report"};
    primary("out");
  } else if (subcommand == "eval") {
    r.inputs = {"pairs", "checkpoints"};
    r.outputs = {"out", "csv"};
    primary("out");
  } else if (subcommand == "attribute") {
    r.inputs = {"pairs", "checkpoint"};
    r.outputs = {"out"};
    primary("out");
  } else if (subcommand == "render") {
    r.inputs = {"pairs", "attributions"};
    r.outputs = {"out_dir"};
    r.manifest_path = (fs::path(args.at("out_dir").get<std::string>()) /
                       (args.at("pair_id").get<std::string>() + ".manifest.json"))
                          .string();
  } else {
    throw InputError("unknown subcommand '" + subcommand + "'");
  }
  return r;
}

int dispatch(const std::string &subcommand, const ojson &args, const std::string &manifest_sha) {
  if (subcommand == "synth")
    return run_synth(args, manifest_sha);
  if (subcommand == "pairs")
    return run_pairs(args, manifest_sha);
  if (subcommand == "train")
    return run_train(args, manifest_sha);
  if (subcommand == "eval")
    return run_eval(args, manifest_sha);
  if (subcommand == "attribute")
    return run_attribute(args, manifest_sha);
  return run_render(args, manifest_sha);
}

// The manifest is written only once every output is in place.
int execute(const std::string &subcommand, const ojson &args) {
  const Run run = describe(subcommand, args);
  const std::string text = manifest_text(run);
  const int status = dispatch(subcommand, args, sha256_hex(text));
  if (status == 0)
    write_file(run.manifest_path, text);
  return status;
}

int replay(const std::string &manifest_path) {
  const ojson m = ojson::parse(read_file(manifest_path), nullptr, false);
  if (m.is_discarded() || !m.is_object())
    throw InputError("manifest is not valid JSON");
  if (m.value("schema", "") != kManifestSchema)
    throw CompatibilityError("unsupported manifest schema");
  if (m.value("tool_version", "") != kToolVersion)
    throw CompatibilityError("manifest written by tool version " +
                             m.value("tool_version", "?") + ", this is " +
                             std::string(kToolVersion));
  for (const auto &input : m.at("inputs")) {
    const std::string path = input.at("path").get<std::string>();
    if (!fs::exists(path))
      throw InputError("manifest input missing: " + path);
    if (file_sha256(path) != input.at("sha256").get<std::string>())
      throw CompatibilityError("manifest input changed since the run: " + path);
  }
  return execute(m.at("subcommand").get<std::string>(), m.at("args"));
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"CliffKit: activity-cliff MPNN training and attribution"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  // synth
  auto *synth = app.add_subcommand("synth", "Generate a planted-effect compound set");
  std::size_t scaffolds = 3, decorations = 25;
  double noise = 0.0;
  std::uint64_t synth_seed = 0;
  std::string target = "SYN1", synth_out;
  synth->add_option("--scaffolds", scaffolds, "Scaffold count")->capture_default_str();
  synth->add_option("--decorations", decorations, "Decoration count")->capture_default_str();
  synth->add_option("--noise", noise, "Gaussian noise sd on pIC50")->capture_default_str();
  synth->add_option("--seed", synth_seed, "Random seed")->capture_default_str();
  synth->add_option("--target", target, "Target id")->capture_default_str();
  synth->add_option("--out", synth_out, "Compounds CSV")->required();

  // pairs
  auto *pairs = app.add_subcommand("pairs", "Build activity-cliff pairs");
  std::string compounds, pairs_out, pairs_summary;
  double min_fraction = 0.5, min_delta = 1.0;
  std::size_t min_pairs = 50;
  std::uint64_t mcs_budget = kDefaultMcsBudget;
  bool strict = false;
  pairs->add_option("--compounds", compounds, "Compounds CSV")->required();
  pairs->add_option("--min-fraction", min_fraction, "Minimum MCS fraction")->capture_default_str();
  pairs->add_option("--min-delta", min_delta, "Minimum pIC50 difference")->capture_default_str();
  pairs->add_option("--min-pairs", min_pairs, "Minimum pairs per target")->capture_default_str();
  pairs->add_option("--mcs-budget", mcs_budget, "MCS search step budget")->capture_default_str();
  pairs->add_flag("--strict", strict, "Reject unparseable SMILES");
  pairs->add_option("--out", pairs_out, "Pairs JSONL")->required();
  pairs->add_option("--summary", pairs_summary, "Summary JSON (default <out>.summary.json)");

  // train
  auto *trn = app.add_subcommand("train", "Train one loss variant");
  std::string train_pairs, variant = "n", train_out, train_report;
  std::string bn_scope = "pair", split_mode = "pair";
  LossConfig loss_defaults;
  TrainConfig train_defaults;
  double lambda = loss_defaults.lambda, alpha = loss_defaults.alpha;
  double node_weight = loss_defaults.node_loss_weight, lr = train_defaults.learning_rate;
  std::size_t epochs = train_defaults.max_epochs, patience = train_defaults.patience;
  std::size_t hidden = ModelConfig{}.hidden_dim;
  std::uint64_t train_seed = 0;
  bool wall_time = false;
  trn->add_option("--pairs", train_pairs, "Pairs JSONL")->required();
  trn->add_option("--variant", variant, "ucn, n, n-gl or n-sgl")->capture_default_str();
  trn->add_option("--lambda", lambda, "Penalty strength")->capture_default_str();
  trn->add_option("--alpha", alpha, "Sparse group lasso mix")->capture_default_str();
  trn->add_option("--node-weight", node_weight, "Node loss weight")->capture_default_str();
  trn->add_option("--lr", lr, "Learning rate")->capture_default_str();
  trn->add_option("--epochs", epochs, "Maximum epochs")->capture_default_str();
  trn->add_option("--patience", patience, "Early stopping patience")->capture_default_str();
  trn->add_option("--hidden", hidden, "Hidden width")->capture_default_str();
  trn->add_option("--seed", train_seed, "Seed for split, init and order")->capture_default_str();
  trn->add_option("--batchnorm-scope", bn_scope, "pair or compound")->capture_default_str();
  trn->add_option("--split-mode", split_mode, "pair or compound")->capture_default_str();
  trn->add_flag("--wall-time", wall_time, "Record wall time in the report");
  trn->add_option("--out", train_out, "Checkpoint path")->required();
  trn->add_option("--report", train_report, "Report JSON (default <out>.report.json)");

  // eval
  auto *evl = app.add_subcommand("eval", "Metrics and global-direction sweep");
  std::string eval_pairs, eval_out, eval_csv, eval_subset = "test", thresholds_text;
  std::vector<std::string> checkpoints, labels;
  std::vector<std::string> methods = method_names({all_methods().begin(), all_methods().end()});
  std::size_t ig_steps = AttributionConfig{}.ig_steps;
  evl->add_option("--pairs", eval_pairs, "Pairs JSONL")->required();
  evl->add_option("--checkpoint", checkpoints, "One or two checkpoints")->required();
  evl->add_option("--labels", labels, "Model labels");
  evl->add_option("--methods", methods, "Attribution methods")->capture_default_str();
  evl->add_option("--thresholds", thresholds_text, "Comma-separated MCS thresholds");
  evl->add_option("--subset", eval_subset, "all, train, validation or test")->capture_default_str();
  evl->add_option("--ig-steps", ig_steps, "Integrated gradients steps")->capture_default_str();
  evl->add_option("--out", eval_out, "Report JSON")->required();
  evl->add_option("--csv", eval_csv, "Sweep CSV (default <out>.csv)");

  // attribute
  auto *att = app.add_subcommand("attribute", "Per-atom attributions");
  std::string att_pairs, att_checkpoint, att_out, att_subset = "test";
  std::vector<std::string> att_methods = methods;
  std::size_t att_steps = ig_steps;
  att->add_option("--pairs", att_pairs, "Pairs JSONL")->required();
  att->add_option("--checkpoint", att_checkpoint, "Checkpoint")->required();
  att->add_option("--methods", att_methods, "Attribution methods")->capture_default_str();
  att->add_option("--subset", att_subset, "all, train, validation or test")->capture_default_str();
  att->add_option("--ig-steps", att_steps, "Integrated gradients steps")->capture_default_str();
  att->add_option("--out", att_out, "Attribution JSONL")->required();

  // render
  auto *rnd = app.add_subcommand("render", "SVG colorings of one pair");
  std::string rnd_pairs, rnd_attr, rnd_pair, rnd_dir;
  std::uint64_t layout_seed = 0;
  rnd->add_option("--pairs", rnd_pairs, "Pairs JSONL")->required();
  rnd->add_option("--attributions", rnd_attr, "Attribution JSONL")->required();
  rnd->add_option("--pair-id", rnd_pair, "Pair to render")->required();
  rnd->add_option("--layout-seed", layout_seed, "Layout seed")->capture_default_str();
  rnd->add_option("--out-dir", rnd_dir, "Output directory")->required();

  // replay
  auto *rep = app.add_subcommand("replay", "Re-run a subcommand from its manifest");
  std::string manifest;
  rep->add_option("manifest", manifest, "Manifest JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*rep)
      return replay(manifest);
    ojson args;
    std::string subcommand;
    if (*synth) {
      subcommand = "synth";
      args = {{"scaffolds", scaffolds}, {"decorations", decorations}, {"noise", noise},
              {"seed", synth_seed},     {"target", target},           {"out", synth_out}};
    } else if (*pairs) {
      subcommand = "pairs";
      args = {{"compounds", compounds},
              {"min_fraction", min_fraction},
              {"min_delta", min_delta},
              {"min_pairs", min_pairs},
              {"mcs_budget", mcs_budget},
              {"strict", strict},
              {"out", pairs_out},
              {"summary", pairs_summary.empty() ? pairs_out + ".summary.json"
                                                : pairs_summary}};
    } else if (*trn) {
      subcommand = "train";
      args = {{"pairs", train_pairs},
              {"variant", variant},
              {"lambda", lambda},
              {"alpha", alpha},
              {"node_weight", node_weight},
              {"lr", lr},
              {"epochs", epochs},
              {"patience", patience},
              {"hidden", hidden},
              {"seed", train_seed},
              {"batchnorm_scope", bn_scope},
              {"split_mode", split_mode},
              {"wall_time", wall_time},
              {"out", train_out},
              {"report", train_report.empty() ? train_out + ".report.json"
                                              : train_report}};
    } else if (*evl) {
      subcommand = "eval";
      args = {{"pairs", eval_pairs},
              {"checkpoints", checkpoints},
              {"labels", labels},
              {"methods", methods},
              {"thresholds", thresholds_text.empty() ? default_thresholds()
                                                     : parse_number_list(thresholds_text)},
              {"subset", eval_subset},
              {"ig_steps", ig_steps},
              {"out", eval_out},
              {"csv", eval_csv.empty() ? eval_out + ".csv" : eval_csv}};
      parse_methods(methods);
    } else if (*att) {
      subcommand = "attribute";
      args = {{"pairs", att_pairs},       {"checkpoint", att_checkpoint},
              {"methods", att_methods},   {"subset", att_subset},
              {"ig_steps", att_steps},    {"out", att_out}};
      parse_methods(att_methods);
    } else {
      subcommand = "render";
      args = {{"pairs", rnd_pairs},   {"attributions", rnd_attr},  {"pair_id", rnd_pair},
              {"layout_seed", layout_seed}, {"out_dir", rnd_dir}};
    }
    return execute(subcommand, args);
  } catch (const InputError &e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const DivergenceError &e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const CheckpointError &e) {
    std::cerr << "checkpoint error: " << e.what() << "\n";
    return kExitCompat;
  } catch (const CompatibilityError &e) {
    std::cerr << "compatibility error: " << e.what() << "\n";
    return kExitCompat;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}
