//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CLIFFKIT_MCS_H_
#define CLIFFKIT_MCS_H_

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "cliffkit/molgraph.h"

namespace cliffkit {

struct McsResult {
  // (atom in g1, atom in g2), sorted by the g1 index.
  std::vector<std::pair<std::size_t, std::size_t>> mapping;
  std::size_t size = 0;
  double fraction_1 = 0.0;
  double fraction_2 = 0.0;
  // Search stopped on the step budget; the mapping is the best found so far
  // and the canonical tie-break is not guaranteed.
  bool truncated = false;
};

inline constexpr std::uint64_t kDefaultMcsBudget = 5'000'000;

/// Maximum connected common induced substructure. Atoms match on (element,
/// aromatic flag), bonds on order, and non-bonded pairs must stay non-bonded.
/// Among optimal mappings the lexicographically smallest (g1, g2) index
/// sequence is returned, computed in a canonical orientation of the pair so
/// that swapping the arguments transposes the answer.
McsResult max_common_substructure(const MolecularGraph &g1,
                                  const MolecularGraph &g2,
                                  std::uint64_t step_budget = kDefaultMcsBudget);

// Checks the McsResult invariants against the two graphs: injective,
// label-compatible, edge-consistent, and connected.
bool is_valid_common_substructure(
    const MolecularGraph &g1, const MolecularGraph &g2,
    const std::vector<std::pair<std::size_t, std::size_t>> &mapping);

} // namespace cliffkit

#endif // CLIFFKIT_MCS_H_
