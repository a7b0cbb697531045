//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CLIFFKIT_SYNTHETIC_H_
#define CLIFFKIT_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cliffkit/pairs.h"

namespace cliffkit {

struct SyntheticConfig {
  std::size_t scaffold_count = 3;
  std::size_t decoration_count = 25;
  double noise_sd = 0.0;
  std::uint64_t seed = 0;
  std::string target_id = "SYN1";
};

// Ground truth for one generated compound.
struct PlantedRecord {
  std::string compound_id;
  std::size_t scaffold = 0;
  std::size_t decoration = 0;
  double base = 0.0;
  double effect = 0.0;
  double noise = 0.0;
};

struct SyntheticDataset {
  std::vector<Compound> compounds;
  std::vector<std::string> smiles;
  std::vector<PlantedRecord> planted;
  std::vector<double> scaffold_base;
  std::vector<double> decoration_effect;
};

// Built-in fragment libraries. A scaffold template holds one '*' marking the
// decoration site; a decoration is a SMILES branch body.
const std::vector<std::string> &scaffold_templates();
const std::vector<std::string> &decoration_library();

// Additive per-atom contribution used to plant decoration effects.
double planted_atom_contribution(const Atom &atom);

/// Every scaffold combined with every decoration at the marked site;
/// pIC50 = base(scaffold) + effect(decoration) + N(0, noise_sd).
/// Deterministic for a fixed seed.
SyntheticDataset generate_synthetic_dataset(const SyntheticConfig &config);

} // namespace cliffkit

#endif // CLIFFKIT_SYNTHETIC_H_
