//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CLIFFKIT_EVALUATION_H_
#define CLIFFKIT_EVALUATION_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cliffkit/attribution.h"
#include "cliffkit/model.h"
#include "cliffkit/pairs.h"

namespace cliffkit {

class UndefinedCorrelationError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Both require equal lengths >= 2.
double rmse(std::span<const double> pred, std::span<const double> truth);
// Throws UndefinedCorrelationError when either series is constant.
double pcc(std::span<const double> pred, std::span<const double> truth);

struct TargetMetrics {
  std::string target_id;
  double rmse = 0.0;
  double pcc = 0.0;
  std::size_t pair_count = 0;
};

struct MetricReport {
  std::vector<TargetMetrics> targets;
  double averaged_rmse = 0.0;
  double averaged_pcc = 0.0;
  double weighted_rmse = 0.0;
  double weighted_pcc = 0.0;
};

// Equal-weight and pair-count-weighted means over targets.
MetricReport aggregate(const std::vector<TargetMetrics> &targets);

/// Per-target RMSE/PCC of pair-masked predictions on `pairs`, aggregated.
MetricReport evaluate_targets(const MpnnModel &model,
                              const std::vector<CliffPair> &pairs);

/// 1 iff sign(s_i - s_j) == sign(y_i - y_j), where s_k is the mean node value
/// over the uncommon atoms of compound k (0 when there are none). A zero
/// sign never matches.
int global_direction(const CliffPair &pair, std::span<const double> nodes_i,
                     std::span<const double> nodes_j);
int global_direction(const CliffPair &pair, const AttributionMap &map_i,
                     const AttributionMap &map_j);

/// Fraction of atoms with a nonzero label whose attribution sign equals the
/// label (zero attribution counts as a miss); nullopt without labels.
std::optional<double> atom_accuracy(std::span<const double> node_values,
                                    std::span<const int> labels);

struct WilcoxonResult {
  double statistic = 0.0; // min(W+, W-)
  double p_value = 1.0;   // two-sided
  std::size_t n_effective = 0;
  bool exact = false;
};

inline constexpr std::size_t kWilcoxonExactLimit = 25;

/// Signed-rank test on x - y: zero differences dropped, tied magnitudes get
/// mid-ranks. Exact null distribution for n_effective <= 25, otherwise the
/// tie-corrected normal approximation with continuity correction. Throws
/// std::invalid_argument if every difference is zero.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> x,
                                    std::span<const double> y);

/// Thresholds 0.50, 0.55, ..., 0.95.
std::vector<double> default_thresholds();

struct SweepPoint {
  double threshold = 0.0;
  AttributionMethod method = AttributionMethod::CAM;
  std::string model; // label of the model
  double mean_g_dir = 0.0;
  std::size_t n_pairs = 0;
};

struct MethodComparison {
  AttributionMethod method = AttributionMethod::CAM;
  double sweep_mean_a = 0.0;
  double sweep_mean_b = 0.0;
  // 100 * (b - a) / a; nullopt when a is zero.
  std::optional<double> percent_change;
  std::optional<WilcoxonResult> wilcoxon;
  // Set when the test could not run (e.g. every difference was zero).
  std::string wilcoxon_error;
};

struct SweepResult {
  std::vector<double> thresholds;         // thresholds with surviving pairs
  std::vector<double> skipped_thresholds; // thresholds with none
  std::vector<SweepPoint> points;
  std::vector<MethodComparison> comparisons; // empty without a second model
};

/// Per-compound attribution maps for every method, keyed by compound id.
using AttributionCache =
    std::map<std::string, std::map<AttributionMethod, std::vector<double>>>;

AttributionCache attribute_compounds(const MpnnModel &model,
                                     const std::vector<CliffPair> &pairs,
                                     const std::vector<AttributionMethod> &methods,
                                     const AttributionConfig &config = {});

/// Mean g_dir per (threshold, method) for model a and, if given, model b;
/// with two models each method gets a Wilcoxon test over the per-threshold
/// means (b versus a) and the percent change of the sweep means.
SweepResult threshold_sweep(const std::vector<CliffPair> &pairs,
                            const AttributionCache &model_a,
                            const std::string &label_a,
                            const AttributionCache *model_b,
                            const std::string &label_b,
                            const std::vector<AttributionMethod> &methods,
                            const std::vector<double> &thresholds);

} // namespace cliffkit

#endif // CLIFFKIT_EVALUATION_H_
