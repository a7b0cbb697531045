//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cliffkit/pairs.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "cliffkit/parallel.h"

namespace cliffkit {

void PairGenConfig::validate() const {
  if (!(min_mcs_fraction >= 0.0 && min_mcs_fraction <= 1.0))
    throw std::invalid_argument("min_mcs_fraction must lie in [0, 1]");
  if (!(min_delta >= 0.0))
    throw std::invalid_argument("min_delta must be non-negative");
  if (mcs_node_budget == 0)
    throw std::invalid_argument("mcs_node_budget must be positive");
}

CliffPair make_cliff_pair(const Compound &ci, const Compound &cj,
                          const McsResult &mcs) {
  CliffPair p;
  p.pair_id = ci.id + "~" + cj.id;
  p.target_id = ci.target_id;
  p.compound_i = ci.id;
  p.compound_j = cj.id;
  p.graph_i = ci.graph;
  p.graph_j = cj.graph;
  p.y_i = ci.pic50;
  p.y_j = cj.pic50;
  p.common_mask_i.assign(ci.graph.num_atoms(), false);
  p.common_mask_j.assign(cj.graph.num_atoms(), false);
  for (auto [a, b] : mcs.mapping) {
    p.common_mask_i[a] = true;
    p.common_mask_j[b] = true;
  }
  p.uncommon_mask_i.resize(p.common_mask_i.size());
  p.uncommon_mask_j.resize(p.common_mask_j.size());
  for (std::size_t v = 0; v < p.common_mask_i.size(); ++v)
    p.uncommon_mask_i[v] = !p.common_mask_i[v];
  for (std::size_t v = 0; v < p.common_mask_j.size(); ++v)
    p.uncommon_mask_j[v] = !p.common_mask_j[v];
  p.mapping = mcs.mapping;
  p.mcs_fraction = std::min(mcs.fraction_1, mcs.fraction_2);
  p.mcs_truncated = mcs.truncated;
  return p;
}

namespace {

std::map<std::string, std::vector<std::size_t>>
group_by_target(const std::vector<Compound> &compounds) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < compounds.size(); ++i)
    groups[compounds[i].target_id].push_back(i);
  return groups;
}

} // namespace

std::size_t count_candidate_pairs(const std::vector<Compound> &compounds) {
  std::size_t total = 0;
  for (const auto &[target, members] : group_by_target(compounds))
    total += members.size() * (members.size() - 1) / 2;
  return total;
}

std::vector<CliffPair> generate_cliff_pairs(const std::vector<Compound> &compounds,
                                            const PairGenConfig &config,
                                            PairGenSummary *summary) {
  config.validate();
  PairGenSummary local;
  std::vector<CliffPair> output;

  for (const auto &[target, members] : group_by_target(compounds)) {
    TargetSummary &ts = local.targets[target];
    ts.compounds = members.size();

    // Activity filter first: it is cheap and skips most MCS work.
    std::vector<std::pair<std::size_t, std::size_t>> candidates;
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        ++ts.candidate_pairs;
        const Compound &ci = compounds[members[a]];
        const Compound &cj = compounds[members[b]];
        if (std::abs(ci.pic50 - cj.pic50) < config.min_delta) {
          ++ts.rejected_delta;
          continue;
        }
        candidates.emplace_back(members[a], members[b]);
      }

    std::vector<McsResult> results(candidates.size());
    parallel_for(candidates.size(), [&](std::size_t k) {
      results[k] = max_common_substructure(compounds[candidates[k].first].graph,
                                           compounds[candidates[k].second].graph,
                                           config.mcs_node_budget);
    });

    std::vector<CliffPair> kept;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      const McsResult &mcs = results[k];
      if (mcs.truncated)
        ++local.truncated_mcs;
      if (std::min(mcs.fraction_1, mcs.fraction_2) < config.min_mcs_fraction) {
        ++ts.rejected_similarity;
        continue;
      }
      kept.push_back(make_cliff_pair(compounds[candidates[k].first],
                                     compounds[candidates[k].second], mcs));
    }

    ts.kept_pairs = kept.size();
    if (kept.size() < config.min_pairs_per_target) {
      ts.dropped = true;
      continue;
    }
    for (auto &p : kept)
      output.push_back(std::move(p));
  }

  std::sort(output.begin(), output.end(),
            [](const CliffPair &a, const CliffPair &b) {
              return std::tie(a.target_id, a.pair_id) <
                     std::tie(b.target_id, b.pair_id);
            });
  local.total_pairs = output.size();
  if (summary != nullptr)
    *summary = std::move(local);
  return output;
}

std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitRatios &ratios) {
  constexpr double kSlack = 1e-9;
  const double total = static_cast<double>(n);
  std::size_t train_end = static_cast<std::size_t>(
      std::floor(total * ratios.train + kSlack));
  std::size_t val_end = static_cast<std::size_t>(
      std::floor(total * (ratios.train + ratios.validation) + kSlack));
  train_end = std::min(train_end, n);
  val_end = std::clamp(val_end, train_end, n);
  return {train_end, val_end - train_end, n - val_end};
}

DatasetSplit split_pairs(const std::vector<CliffPair> &pairs,
                         const SplitRatios &ratios, std::uint64_t seed,
                         SplitMode mode) {
  if (ratios.train < 0 || ratios.validation < 0 || ratios.test < 0 ||
      std::abs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9)
    throw std::invalid_argument("split ratios must be non-negative and sum to 1");
  if (pairs.size() < 10)
    throw std::invalid_argument("at least 10 pairs are required to split");

  std::map<std::string, std::vector<std::size_t>> by_target;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    by_target[pairs[i].target_id].push_back(i);

  DatasetSplit split;
  split.seed = seed;
  std::mt19937_64 rng(seed);

  for (auto &[target, members] : by_target) {
    if (members.size() < 3)
      throw std::invalid_argument("target " + target +
                                  " has fewer than 3 pairs");

    if (mode == SplitMode::Pair) {
      std::shuffle(members.begin(), members.end(), rng);
      const auto sizes = split_sizes(members.size(), ratios);
      for (std::size_t k = 0; k < members.size(); ++k) {
        const CliffPair &p = pairs[members[k]];
        if (k < sizes[0])
          split.train.push_back(p);
        else if (k < sizes[0] + sizes[1])
          split.validation.push_back(p);
        else
          split.test.push_back(p);
      }
      continue;
    }

    std::vector<std::string> ids;
    std::set<std::string> seen;
    for (std::size_t idx : members)
      for (const std::string *id : {&pairs[idx].compound_i, &pairs[idx].compound_j})
        if (seen.insert(*id).second)
          ids.push_back(*id);
    std::shuffle(ids.begin(), ids.end(), rng);
    const auto sizes = split_sizes(ids.size(), ratios);
    std::map<std::string, int> part;
    for (std::size_t k = 0; k < ids.size(); ++k)
      part[ids[k]] = k < sizes[0] ? 0 : (k < sizes[0] + sizes[1] ? 1 : 2);
    for (std::size_t idx : members) {
      const CliffPair &p = pairs[idx];
      const int a = part.at(p.compound_i);
      if (a != part.at(p.compound_j))
        continue;
      (a == 0 ? split.train : a == 1 ? split.validation : split.test).push_back(p);
    }
  }
  return split;
}

std::vector<CliffPair> filter_by_threshold(const std::vector<CliffPair> &pairs,
                                           double threshold) {
  // Thresholds such as 0.55 are not exactly representable; the slack keeps
  // a fraction like 11/20 on the inclusive side.
  constexpr double kSlack = 1e-12;
  std::vector<CliffPair> out;
  for (const CliffPair &p : pairs)
    if (p.mcs_fraction >= threshold - kSlack)
      out.push_back(p);
  return out;
}

} // namespace cliffkit
