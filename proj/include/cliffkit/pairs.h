//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CLIFFKIT_PAIRS_H_
#define CLIFFKIT_PAIRS_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cliffkit/mcs.h"
#include "cliffkit/molgraph.h"

namespace cliffkit {

/// One measured compound. `pic50` is -log10 of the molar IC50.
struct Compound {
  std::string id;
  std::string target_id;
  MolecularGraph graph;
  double pic50 = 0.0;
};

struct PairGenConfig {
  double min_mcs_fraction = 0.5;
  double min_delta = 1.0;
  std::size_t min_pairs_per_target = 50;
  std::uint64_t mcs_node_budget = kDefaultMcsBudget;

  void validate() const;
};

struct CliffPair {
  std::string pair_id;
  std::string target_id;
  std::string compound_i;
  std::string compound_j;
  MolecularGraph graph_i;
  MolecularGraph graph_j;
  double y_i = 0.0;
  double y_j = 0.0;
  std::vector<bool> common_mask_i;
  std::vector<bool> common_mask_j;
  std::vector<bool> uncommon_mask_i;
  std::vector<bool> uncommon_mask_j;
  std::vector<std::pair<std::size_t, std::size_t>> mapping;
  double mcs_fraction = 0.0;
  bool mcs_truncated = false;
};

// Builds the pair record from an MCS mapping (masks follow the mapping).
CliffPair make_cliff_pair(const Compound &ci, const Compound &cj,
                          const McsResult &mcs);

struct TargetSummary {
  std::size_t compounds = 0;
  std::size_t candidate_pairs = 0;
  std::size_t rejected_similarity = 0;
  std::size_t rejected_delta = 0;
  std::size_t kept_pairs = 0;
  bool dropped = false;
};

struct PairGenSummary {
  std::map<std::string, TargetSummary> targets;
  std::size_t truncated_mcs = 0;
  std::size_t total_pairs = 0;
};

/// All same-target compound pairs whose MCS covers at least
/// min_mcs_fraction of both molecules and whose pIC50 values differ by at
/// least min_delta. Targets with fewer than min_pairs_per_target survivors
/// are dropped. Output is sorted by (target_id, pair_id).
std::vector<CliffPair> generate_cliff_pairs(const std::vector<Compound> &compounds,
                                            const PairGenConfig &config,
                                            PairGenSummary *summary = nullptr);

// Unordered same-target compound pairs before any filtering.
std::size_t count_candidate_pairs(const std::vector<Compound> &compounds);

struct SplitRatios {
  double train = 0.7;
  double validation = 0.1;
  double test = 0.2;
};

enum class SplitMode { Pair, CompoundDisjoint };

struct DatasetSplit {
  std::vector<CliffPair> train;
  std::vector<CliffPair> validation;
  std::vector<CliffPair> test;
  std::uint64_t seed = 0;
};

// Slice sizes for n items: boundaries are floor(n * cumulative ratio), the
// test slice takes what is left.
std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitRatios &ratios);

/// Per target: seeded shuffle, then contiguous slicing by split_sizes; the
/// per-target slices are concatenated in target order. In compound-disjoint
/// mode the compounds are sliced instead and pairs that straddle two slices
/// are discarded.
DatasetSplit split_pairs(const std::vector<CliffPair> &pairs,
                         const SplitRatios &ratios, std::uint64_t seed,
                         SplitMode mode = SplitMode::Pair);

std::vector<CliffPair> filter_by_threshold(const std::vector<CliffPair> &pairs,
                                           double threshold);

} // namespace cliffkit

#endif // CLIFFKIT_PAIRS_H_
