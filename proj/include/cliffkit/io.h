//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CLIFFKIT_IO_H_
#define CLIFFKIT_IO_H_

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cliffkit/attribution.h"
#include "cliffkit/evaluation.h"
#include "cliffkit/losses.h"
#include "cliffkit/pairs.h"
#include "cliffkit/training.h"

namespace cliffkit {

using ojson = nlohmann::ordered_json;

inline constexpr std::string_view kCompoundsHeader = "compound_id,target_id,smiles,ic50_nm";
inline constexpr std::string_view kPairSchema = "cliffpair/1";
inline constexpr std::string_view kAttributionSchema = "cliffattr/1";
inline constexpr std::string_view kTrainReportSchema = "cliffkit-train-report/1";
inline constexpr std::string_view kEvalReportSchema = "cliffkit-eval-report/1";
inline constexpr std::string_view kPairSummarySchema = "cliffkit-pair-summary/1";

/// Malformed user input; `line` is 1-based (0 when not tied to a line).
class InputError : public std::runtime_error {
public:
  InputError(const std::string &msg, std::size_t line = 0)
      : std::runtime_error(line == 0 ? msg : "line " + std::to_string(line) + ": " + msg),
        line_(line) {}

  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

// pIC50 = 9 - log10(IC50 in nM).
double pic50_from_ic50_nm(double ic50_nm);
double ic50_nm_from_pic50(double pic50);

struct CompoundTable {
  std::vector<Compound> compounds;
  std::vector<std::string> warnings;
  std::size_t skipped = 0;
};

/// Reads the compounds CSV. Rows with unparseable SMILES are skipped with a
/// warning, or rejected when `strict`; structural problems always throw
/// InputError with the row's line number.
CompoundTable parse_compounds_csv(std::string_view text, bool strict);
CompoundTable read_compounds_csv(const std::filesystem::path &path, bool strict);

struct CompoundRow {
  std::string compound_id;
  std::string target_id;
  std::string smiles;
  double pic50 = 0.0;
};
std::string format_compounds_csv(const std::vector<CompoundRow> &rows);

ojson pair_to_json(const CliffPair &pair);
CliffPair pair_from_json(const nlohmann::json &j, std::size_t line = 0);
std::string format_pairs_jsonl(const std::vector<CliffPair> &pairs);
std::vector<CliffPair> parse_pairs_jsonl(std::string_view text);
std::vector<CliffPair> read_pairs_jsonl(const std::filesystem::path &path);

ojson pair_summary_json(const PairGenSummary &summary, const PairGenConfig &config);

ojson loss_config_json(const LossConfig &config);
LossConfig loss_config_from_json(const nlohmann::json &j);
ojson train_config_json(const TrainConfig &config);
TrainConfig train_config_from_json(const nlohmann::json &j);

/// Wall time is included only on request so reruns stay byte-identical.
ojson train_report_json(const TrainReport &report, bool include_wall_time);

ojson metric_report_json(const MetricReport &report);
ojson wilcoxon_json(const WilcoxonResult &result);
ojson sweep_json(const SweepResult &sweep);
// threshold,method,model,mean_g_dir,n_pairs
std::string sweep_csv(const SweepResult &sweep);

struct AttributionRecord {
  std::string compound_id;
  AttributionMethod method = AttributionMethod::CAM;
  std::vector<double> node_values;
  std::string checkpoint_hash;
};
ojson attribution_to_json(const AttributionRecord &record);
std::string format_attributions_jsonl(const std::vector<AttributionRecord> &records);
std::vector<AttributionRecord> parse_attributions_jsonl(std::string_view text);

// Fixed-notation number with `digits` decimals (no locale, no exponent).
std::string format_fixed(double value, int digits);

} // namespace cliffkit

#endif // CLIFFKIT_IO_H_
