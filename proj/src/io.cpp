//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cliffkit/io.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

#include "cliffkit/checkpoint.h"

namespace cliffkit {

double pic50_from_ic50_nm(double ic50_nm) {
  if (!(ic50_nm > 0.0) || !std::isfinite(ic50_nm))
    throw std::invalid_argument("IC50 must be a positive finite concentration");
  return 9.0 - std::log10(ic50_nm);
}

double ic50_nm_from_pic50(double pic50) { return std::pow(10.0, 9.0 - pic50); }

std::string format_fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  std::string s = buf;
  // Avoid "-0.00" so equal pictures stay byte-identical.
  bool all_zero = true;
  for (char c : s)
    if (c != '-' && c != '0' && c != '.')
      all_zero = false;
  if (all_zero && !s.empty() && s[0] == '-')
    s.erase(0, 1);
  return s;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_number(std::string_view text, std::size_t line, const char *what) {
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty())
    throw InputError(std::string("cannot parse ") + what + " '" + std::string(text) + "'",
                     line);
  return value;
}

std::vector<int> mask_json(const std::vector<bool> &mask) {
  return std::vector<int>(mask.begin(), mask.end());
}

std::vector<bool> mask_from_json(const nlohmann::json &j, std::size_t atoms,
                                 const char *what, std::size_t line) {
  std::vector<bool> mask;
  for (const auto &v : j) {
    const int x = v.get<int>();
    if (x != 0 && x != 1)
      throw InputError(std::string(what) + " holds a value other than 0/1", line);
    mask.push_back(x == 1);
  }
  if (mask.size() != atoms)
    throw InputError(std::string(what) + " length does not match the atom count", line);
  return mask;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos)
      nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r')
      line.remove_suffix(1);
    lines.push_back(line);
    start = nl + 1;
  }
  return lines;
}

} // namespace

CompoundTable parse_compounds_csv(std::string_view text, bool strict) {
  const std::vector<std::string_view> lines = lines_of(text);
  if (lines.empty() || lines[0] != kCompoundsHeader)
    throw InputError("expected header '" + std::string(kCompoundsHeader) + "'", 1);
  CompoundTable table;
  std::set<std::string> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line = i + 1;
    if (lines[i].empty())
      continue;
    const auto fields = split_fields(lines[i]);
    if (fields.size() != 4)
      throw InputError("expected 4 fields, found " + std::to_string(fields.size()), line);
    Compound c;
    c.id = std::string(fields[0]);
    c.target_id = std::string(fields[1]);
    if (c.id.empty() || c.target_id.empty())
      throw InputError("empty compound_id or target_id", line);
    if (c.id.find('~') != std::string::npos)
      throw InputError("compound_id may not contain '~'", line);
    const double ic50 = parse_number(fields[3], line, "ic50_nm");
    if (!(ic50 > 0.0) || !std::isfinite(ic50))
      throw InputError("ic50_nm must be positive", line);
    c.pic50 = pic50_from_ic50_nm(ic50);
    if (!seen.insert(c.id).second)
      throw InputError("duplicate compound_id '" + c.id + "'", line);
    try {
      std::vector<std::string> notes;
      c.graph = parse_smiles(fields[2], &notes);
      for (const std::string &n : notes)
        table.warnings.push_back("line " + std::to_string(line) + ": " + n);
    } catch (const SmilesError &e) {
      if (strict)
        throw InputError("unparseable SMILES: " + std::string(e.what()), line);
      table.warnings.push_back("line " + std::to_string(line) +
                               ": skipped, unparseable SMILES: " + e.what());
      ++table.skipped;
      continue;
    }
    table.compounds.push_back(std::move(c));
  }
  return table;
}

CompoundTable read_compounds_csv(const std::filesystem::path &path, bool strict) {
  return parse_compounds_csv(read_file(path), strict);
}

std::string format_compounds_csv(const std::vector<CompoundRow> &rows) {
  std::string out(kCompoundsHeader);
  out += '\n';
  char buf[64];
  for (const CompoundRow &r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g", ic50_nm_from_pic50(r.pic50));
    out += r.compound_id + "," + r.target_id + "," + r.smiles + "," + buf + "\n";
  }
  return out;
}

ojson pair_to_json(const CliffPair &p) {
  ojson j;
  j["schema"] = kPairSchema;
  j["pair_id"] = p.pair_id;
  j["target_id"] = p.target_id;
  j["compound_i"] = p.compound_i;
  j["compound_j"] = p.compound_j;
  j["smiles_i"] = p.graph_i.source_smiles;
  j["smiles_j"] = p.graph_j.source_smiles;
  j["y_i"] = p.y_i;
  j["y_j"] = p.y_j;
  j["common_mask_i"] = mask_json(p.common_mask_i);
  j["common_mask_j"] = mask_json(p.common_mask_j);
  j["uncommon_mask_i"] = mask_json(p.uncommon_mask_i);
  j["uncommon_mask_j"] = mask_json(p.uncommon_mask_j);
  ojson mapping = ojson::array();
  for (const auto &[a, b] : p.mapping)
    mapping.push_back({a, b});
  j["mapping"] = mapping;
  j["mcs_fraction"] = p.mcs_fraction;
  j["mcs_truncated"] = p.mcs_truncated;
  return j;
}

CliffPair pair_from_json(const nlohmann::json &j, std::size_t line) {
  try {
    const std::string schema = j.at("schema").get<std::string>();
    if (schema != kPairSchema)
      throw InputError("unsupported pair schema '" + schema + "'", line);
    CliffPair p;
    p.pair_id = j.at("pair_id").get<std::string>();
    p.target_id = j.at("target_id").get<std::string>();
    p.compound_i = j.at("compound_i").get<std::string>();
    p.compound_j = j.at("compound_j").get<std::string>();
    p.graph_i = parse_smiles(j.at("smiles_i").get<std::string>());
    p.graph_j = parse_smiles(j.at("smiles_j").get<std::string>());
    p.y_i = j.at("y_i").get<double>();
    p.y_j = j.at("y_j").get<double>();
    const std::size_t ni = p.graph_i.num_atoms(), nj = p.graph_j.num_atoms();
    p.common_mask_i = mask_from_json(j.at("common_mask_i"), ni, "common_mask_i", line);
    p.common_mask_j = mask_from_json(j.at("common_mask_j"), nj, "common_mask_j", line);
    p.uncommon_mask_i = mask_from_json(j.at("uncommon_mask_i"), ni, "uncommon_mask_i", line);
    p.uncommon_mask_j = mask_from_json(j.at("uncommon_mask_j"), nj, "uncommon_mask_j", line);
    for (std::size_t v = 0; v < ni; ++v)
      if (p.common_mask_i[v] == p.uncommon_mask_i[v])
        throw InputError("masks of compound i are not complementary", line);
    for (std::size_t v = 0; v < nj; ++v)
      if (p.common_mask_j[v] == p.uncommon_mask_j[v])
        throw InputError("masks of compound j are not complementary", line);
    for (const auto &entry : j.at("mapping")) {
      const std::size_t a = entry.at(0).get<std::size_t>();
      const std::size_t b = entry.at(1).get<std::size_t>();
      if (a >= ni || b >= nj)
        throw InputError("mapping index out of range", line);
      p.mapping.emplace_back(a, b);
    }
    p.mcs_fraction = j.at("mcs_fraction").get<double>();
    p.mcs_truncated = j.at("mcs_truncated").get<bool>();
    return p;
  } catch (const nlohmann::json::exception &e) {
    throw InputError(std::string("malformed pair record: ") + e.what(), line);
  } catch (const SmilesError &e) {
    throw InputError(std::string("bad SMILES in pair record: ") + e.what(), line);
  }
}

std::string format_pairs_jsonl(const std::vector<CliffPair> &pairs) {
  std::string out;
  for (const CliffPair &p : pairs)
    out += pair_to_json(p).dump() + "\n";
  return out;
}

std::vector<CliffPair> parse_pairs_jsonl(std::string_view text) {
  std::vector<CliffPair> pairs;
  const auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty())
      continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(lines[i]);
    } catch (const nlohmann::json::exception &e) {
      throw InputError(std::string("invalid JSON: ") + e.what(), i + 1);
    }
    pairs.push_back(pair_from_json(j, i + 1));
  }
  return pairs;
}

std::vector<CliffPair> read_pairs_jsonl(const std::filesystem::path &path) {
  return parse_pairs_jsonl(read_file(path));
}

ojson pair_summary_json(const PairGenSummary &summary, const PairGenConfig &config) {
  ojson j;
  j["schema"] = kPairSummarySchema;
  j["config"] = {{"min_mcs_fraction", config.min_mcs_fraction},
                 {"min_delta", config.min_delta},
                 {"min_pairs_per_target", config.min_pairs_per_target},
                 {"mcs_node_budget", config.mcs_node_budget}};
  ojson targets = ojson::object();
  for (const auto &[id, t] : summary.targets)
    targets[id] = {{"compounds", t.compounds},
                   {"candidate_pairs", t.candidate_pairs},
                   {"rejected_delta", t.rejected_delta},
                   {"rejected_similarity", t.rejected_similarity},
                   {"kept_pairs", t.kept_pairs},
                   {"dropped", t.dropped}};
  j["targets"] = targets;
  j["truncated_mcs"] = summary.truncated_mcs;
  j["total_pairs"] = summary.total_pairs;
  return j;
}

ojson loss_config_json(const LossConfig &c) {
  return {{"variant", variant_name(c.variant)},
          {"lambda", c.lambda},
          {"alpha", c.alpha},
          {"node_loss_weight", c.node_loss_weight}};
}

LossConfig loss_config_from_json(const nlohmann::json &j) {
  LossConfig c;
  c.variant = parse_variant(j.at("variant").get<std::string>());
  c.lambda = j.at("lambda").get<double>();
  c.alpha = j.at("alpha").get<double>();
  c.node_loss_weight = j.at("node_loss_weight").get<double>();
  return c;
}

ojson train_config_json(const TrainConfig &c) {
  return {{"learning_rate", c.learning_rate}, {"max_epochs", c.max_epochs},
          {"patience", c.patience},           {"seed", c.seed},
          {"beta1", c.beta1},                 {"beta2", c.beta2},
          {"epsilon", c.epsilon},
          {"batchnorm_scope", batchnorm_scope_name(c.batchnorm_scope)}};
}

TrainConfig train_config_from_json(const nlohmann::json &j) {
  TrainConfig c;
  c.learning_rate = j.at("learning_rate").get<double>();
  c.max_epochs = j.at("max_epochs").get<std::size_t>();
  c.patience = j.at("patience").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.beta1 = j.at("beta1").get<double>();
  c.beta2 = j.at("beta2").get<double>();
  c.epsilon = j.at("epsilon").get<double>();
  if (j.contains("batchnorm_scope"))
    c.batchnorm_scope = parse_batchnorm_scope(j.at("batchnorm_scope").get<std::string>());
  return c;
}

ojson train_report_json(const TrainReport &report, bool include_wall_time) {
  ojson epochs = ojson::array();
  for (const EpochRecord &e : report.epochs)
    epochs.push_back({{"epoch", e.epoch},
                      {"mse", e.mse},
                      {"node", e.node},
                      {"penalty", e.penalty},
                      {"validation_rmse", e.validation_rmse}});
  ojson j;
  j["epochs"] = epochs;
  j["stopped_epoch"] = report.stopped_epoch;
  j["best_epoch"] = report.best_epoch;
  j["best_validation_rmse"] = report.best_validation_rmse;
  if (include_wall_time)
    j["wall_seconds"] = report.wall_seconds;
  return j;
}

ojson metric_report_json(const MetricReport &r) {
  ojson targets = ojson::array();
  for (const TargetMetrics &t : r.targets)
    targets.push_back({{"target_id", t.target_id},
                       {"rmse", t.rmse},
                       {"pcc", t.pcc},
                       {"pair_count", t.pair_count}});
  return {{"targets", targets},
          {"averaged_rmse", r.averaged_rmse},
          {"averaged_pcc", r.averaged_pcc},
          {"weighted_rmse", r.weighted_rmse},
          {"weighted_pcc", r.weighted_pcc}};
}

ojson wilcoxon_json(const WilcoxonResult &r) {
  return {{"statistic", r.statistic},
          {"p_value", r.p_value},
          {"n_effective", r.n_effective},
          {"exact", r.exact}};
}

ojson sweep_json(const SweepResult &s) {
  ojson points = ojson::array();
  for (const SweepPoint &p : s.points)
    points.push_back({{"threshold", p.threshold},
                      {"method", method_name(p.method)},
                      {"model", p.model},
                      {"mean_g_dir", p.mean_g_dir},
                      {"n_pairs", p.n_pairs}});
  ojson comparisons = ojson::array();
  for (const MethodComparison &c : s.comparisons) {
    ojson j;
    j["method"] = method_name(c.method);
    j["sweep_mean_a"] = c.sweep_mean_a;
    j["sweep_mean_b"] = c.sweep_mean_b;
    j["percent_change"] = c.percent_change ? ojson(*c.percent_change) : ojson(nullptr);
    j["wilcoxon"] = c.wilcoxon ? wilcoxon_json(*c.wilcoxon) : ojson(nullptr);
    if (!c.wilcoxon_error.empty())
      j["wilcoxon_error"] = c.wilcoxon_error;
    comparisons.push_back(j);
  }
  return {{"thresholds", s.thresholds},
          {"skipped_thresholds", s.skipped_thresholds},
          {"points", points},
          {"comparisons", comparisons}};
}

std::string sweep_csv(const SweepResult &s) {
  std::string out = "threshold,method,model,mean_g_dir,n_pairs\n";
  for (const SweepPoint &p : s.points)
    out += format_fixed(p.threshold, 2) + "," + method_name(p.method) + "," + p.model +
           "," + format_fixed(p.mean_g_dir, 6) + "," + std::to_string(p.n_pairs) + "\n";
  return out;
}

ojson attribution_to_json(const AttributionRecord &r) {
  ojson j;
  j["schema"] = kAttributionSchema;
  j["compound_id"] = r.compound_id;
  j["method"] = method_name(r.method);
  j["node_values"] = r.node_values;
  j["checkpoint_hash"] = r.checkpoint_hash;
  return j;
}

std::string format_attributions_jsonl(const std::vector<AttributionRecord> &records) {
  std::string out;
  for (const AttributionRecord &r : records)
    out += attribution_to_json(r).dump() + "\n";
  return out;
}

std::vector<AttributionRecord> parse_attributions_jsonl(std::string_view text) {
  std::vector<AttributionRecord> records;
  const auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty())
      continue;
    try {
      const nlohmann::json j = nlohmann::json::parse(lines[i]);
      if (j.at("schema").get<std::string>() != kAttributionSchema)
        throw InputError("unsupported attribution schema", i + 1);
      AttributionRecord r;
      r.compound_id = j.at("compound_id").get<std::string>();
      r.method = parse_method(j.at("method").get<std::string>());
      r.node_values = j.at("node_values").get<std::vector<double>>();
      r.checkpoint_hash = j.at("checkpoint_hash").get<std::string>();
      records.push_back(std::move(r));
    } catch (const nlohmann::json::exception &e) {
      throw InputError(std::string("malformed attribution record: ") + e.what(), i + 1);
    } catch (const std::invalid_argument &e) {
      throw InputError(e.what(), i + 1);
    }
  }
  return records;
}

} // namespace cliffkit
