//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cliffkit/evaluation.h"

#include <cmath>
#include <set>

#include "cliffkit/parallel.h"
#include "cliffkit/training.h"

namespace cliffkit {

namespace {

void check_series(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("series lengths differ (" + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()) + ")");
  if (a.size() < 2)
    throw std::invalid_argument("at least two points are required");
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v)
    s += x;
  return s / static_cast<double>(v.size());
}

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

double uncommon_mean(std::span<const double> nodes, const std::vector<bool> &uncommon) {
  if (nodes.size() != uncommon.size())
    throw std::invalid_argument("attribution map does not cover the compound");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t v = 0; v < nodes.size(); ++v)
    if (uncommon[v]) {
      sum += nodes[v];
      ++count;
    }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

} // namespace

double rmse(std::span<const double> pred, std::span<const double> truth) {
  check_series(pred, truth);
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    s += (pred[i] - truth[i]) * (pred[i] - truth[i]);
  return std::sqrt(s / static_cast<double>(pred.size()));
}

double pcc(std::span<const double> pred, std::span<const double> truth) {
  check_series(pred, truth);
  const double mp = mean_of(pred);
  const double mt = mean_of(truth);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double dp = pred[i] - mp;
    const double dt = truth[i] - mt;
    sxy += dp * dt;
    sxx += dp * dp;
    syy += dt * dt;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw UndefinedCorrelationError("correlation is undefined for a constant series");
  return sxy / std::sqrt(sxx * syy);
}

MetricReport aggregate(const std::vector<TargetMetrics> &targets) {
  if (targets.empty())
    throw std::invalid_argument("aggregate needs at least one target");
  MetricReport r;
  r.targets = targets;
  double total = 0.0;
  for (const TargetMetrics &t : targets) {
    r.averaged_rmse += t.rmse;
    r.averaged_pcc += t.pcc;
    r.weighted_rmse += static_cast<double>(t.pair_count) * t.rmse;
    r.weighted_pcc += static_cast<double>(t.pair_count) * t.pcc;
    total += static_cast<double>(t.pair_count);
  }
  const double n = static_cast<double>(targets.size());
  r.averaged_rmse /= n;
  r.averaged_pcc /= n;
  if (total == 0.0)
    throw std::invalid_argument("aggregate needs a positive total pair count");
  r.weighted_rmse /= total;
  r.weighted_pcc /= total;
  return r;
}

MetricReport evaluate_targets(const MpnnModel &model,
                              const std::vector<CliffPair> &pairs) {
  std::map<std::string, std::vector<CliffPair>> by_target;
  for (const CliffPair &p : pairs)
    by_target[p.target_id].push_back(p);
  std::vector<TargetMetrics> metrics;
  for (const auto &[target, members] : by_target) {
    const SplitEvaluation ev = evaluate_split(model, members);
    TargetMetrics t;
    t.target_id = target;
    t.rmse = ev.rmse;
    t.pcc = pcc(ev.predictions, ev.targets);
    t.pair_count = members.size();
    metrics.push_back(t);
  }
  return aggregate(metrics);
}

int global_direction(const CliffPair &pair, std::span<const double> nodes_i,
                     std::span<const double> nodes_j) {
  const double s_i = uncommon_mean(nodes_i, pair.uncommon_mask_i);
  const double s_j = uncommon_mean(nodes_j, pair.uncommon_mask_j);
  const int predicted = sign_of(s_i - s_j);
  return predicted != 0 && predicted == sign_of(pair.y_i - pair.y_j) ? 1 : 0;
}

int global_direction(const CliffPair &pair, const AttributionMap &map_i,
                     const AttributionMap &map_j) {
  if (!map_i.edge_values.empty() || !map_j.edge_values.empty())
    throw std::invalid_argument("redistribute edge values before scoring");
  return global_direction(pair, map_i.node_values, map_j.node_values);
}

std::optional<double> atom_accuracy(std::span<const double> node_values,
                                    std::span<const int> labels) {
  if (node_values.size() != labels.size())
    throw std::invalid_argument("attribution and label lengths differ");
  std::size_t labelled = 0, hits = 0;
  for (std::size_t v = 0; v < labels.size(); ++v) {
    if (labels[v] == 0)
      continue;
    ++labelled;
    if (sign_of(node_values[v]) == labels[v])
      ++hits;
  }
  if (labelled == 0)
    return std::nullopt;
  return static_cast<double>(hits) / static_cast<double>(labelled);
}

std::vector<double> default_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i)
    t.push_back((50.0 + 5.0 * i) / 100.0);
  return t;
}

AttributionCache attribute_compounds(const MpnnModel &model,
                                     const std::vector<CliffPair> &pairs,
                                     const std::vector<AttributionMethod> &methods,
                                     const AttributionConfig &config) {
  std::map<std::string, const MolecularGraph *> compounds;
  for (const CliffPair &p : pairs) {
    compounds.emplace(p.compound_i, &p.graph_i);
    compounds.emplace(p.compound_j, &p.graph_j);
  }
  std::vector<std::pair<std::string, const MolecularGraph *>> work(compounds.begin(),
                                                                   compounds.end());
  std::vector<std::map<AttributionMethod, std::vector<double>>> maps(work.size());
  parallel_for(work.size(), [&](std::size_t k) {
    const GraphInputs inputs = make_inputs(*work[k].second);
    for (AttributionMethod m : methods)
      maps[k][m] = attribute(model, inputs, m, config).node_values;
  });
  AttributionCache cache;
  for (std::size_t k = 0; k < work.size(); ++k)
    cache[work[k].first] = std::move(maps[k]);
  return cache;
}

namespace {

double mean_direction(const std::vector<const CliffPair *> &pairs,
                      const AttributionCache &cache, AttributionMethod method) {
  double sum = 0.0;
  for (const CliffPair *p : pairs) {
    const auto &ni = cache.at(p->compound_i).at(method);
    const auto &nj = cache.at(p->compound_j).at(method);
    sum += global_direction(*p, ni, nj);
  }
  return sum / static_cast<double>(pairs.size());
}

} // namespace

SweepResult threshold_sweep(const std::vector<CliffPair> &pairs,
                            const AttributionCache &model_a,
                            const std::string &label_a,
                            const AttributionCache *model_b,
                            const std::string &label_b,
                            const std::vector<AttributionMethod> &methods,
                            const std::vector<double> &thresholds) {
  if (thresholds.empty())
    throw std::invalid_argument("threshold list is empty");
  if (methods.empty())
    throw std::invalid_argument("method list is empty");
  SweepResult result;
  std::map<AttributionMethod, std::vector<double>> series_a, series_b;
  for (double threshold : thresholds) {
    std::vector<const CliffPair *> kept;
    for (const CliffPair &p : pairs)
      if (p.mcs_fraction >= threshold - 1e-12)
        kept.push_back(&p);
    if (kept.empty()) {
      result.skipped_thresholds.push_back(threshold);
      continue;
    }
    result.thresholds.push_back(threshold);
    for (AttributionMethod m : methods) {
      const double a = mean_direction(kept, model_a, m);
      series_a[m].push_back(a);
      result.points.push_back({threshold, m, label_a, a, kept.size()});
      if (model_b != nullptr) {
        const double b = mean_direction(kept, *model_b, m);
        series_b[m].push_back(b);
        result.points.push_back({threshold, m, label_b, b, kept.size()});
      }
    }
  }
  if (model_b == nullptr || result.thresholds.empty())
    return result;
  for (AttributionMethod m : methods) {
    MethodComparison c;
    c.method = m;
    c.sweep_mean_a = mean_of(series_a[m]);
    c.sweep_mean_b = mean_of(series_b[m]);
    if (c.sweep_mean_a != 0.0)
      c.percent_change = 100.0 * (c.sweep_mean_b - c.sweep_mean_a) / c.sweep_mean_a;
    try {
      c.wilcoxon = wilcoxon_signed_rank(series_b[m], series_a[m]);
    } catch (const std::invalid_argument &e) {
      c.wilcoxon_error = e.what();
    }
    result.comparisons.push_back(c);
  }
  return result;
}

} // namespace cliffkit
