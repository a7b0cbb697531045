//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cliffkit/synthetic.h"

#include <random>
#include <stdexcept>

namespace cliffkit {

const std::vector<std::string> &scaffold_templates() {
  static const std::vector<std::string> kScaffolds = {
      "Nc1ncnc2c1c(-c1ccc(*)cc1)nn2C1CCCC1",
      "COc1cc2ncnc(Nc3cccc(*)c3)c2cc1OC",
      "CC(C)(C)c1cc(NC(=O)Nc2ccc(*)cc2)no1",
      "O=C(Nc1ccc(*)cc1)c1cc2ccccc2o1",
      "c1ccc2c(c1)[nH]c(n2)C(=O)NCc1ccc(*)cc1",
      "Cc1ccc(NC(=O)c2ccc(CN3CCN(C)CC3)cc2)cc1*",
  };
  return kScaffolds;
}

const std::vector<std::string> &decoration_library() {
  static const std::vector<std::string> kDecorations = {
      "F",        "Cl",         "Br",        "I",         "C",
      "O",        "N",          "CC",        "OC",        "NC",
      "C#N",      "C(F)(F)F",   "OC(F)(F)F", "S(C)(=O)=O", "C(=O)O",
      "C(=O)N",   "NC(C)=O",    "OCC",       "N(C)C",     "CO",
      "CN",       "SC",         "OCCO",      "CCN",       "C(C)C",
      "OC(C)C",   "c%91ccccc%91", "N%91CCOCC%91", "N%91CCCC%91",  "CCCl",
      "CBr",      "OCCN",       "NCCO",      "C(=O)OC",   "SCC",
  };
  return kDecorations;
}

double planted_atom_contribution(const Atom &atom) {
  switch (atom.element) {
  case Element::N: return 1.1;
  case Element::O: return 0.7;
  case Element::S: return 0.4;
  case Element::C: return atom.aromatic ? 0.05 : -0.15;
  case Element::F: return -0.5;
  case Element::Cl: return -0.9;
  case Element::Br: return -1.2;
  case Element::I: return -1.4;
  default: return 0.0;
  }
}

SyntheticDataset generate_synthetic_dataset(const SyntheticConfig &config) {
  const auto &scaffolds = scaffold_templates();
  const auto &decorations = decoration_library();
  if (config.scaffold_count < 1 || config.scaffold_count > scaffolds.size())
    throw std::invalid_argument("scaffold_count must be in [1, " +
                                std::to_string(scaffolds.size()) + "]");
  if (config.decoration_count < 1 || config.decoration_count > decorations.size())
    throw std::invalid_argument("decoration_count must be in [1, " +
                                std::to_string(decorations.size()) + "]");
  if (!(config.noise_sd >= 0.0))
    throw std::invalid_argument("noise_sd must be non-negative");

  SyntheticDataset data;
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> base_dist(5.5, 7.0);
  for (std::size_t s = 0; s < config.scaffold_count; ++s)
    data.scaffold_base.push_back(base_dist(rng));
  for (std::size_t d = 0; d < config.decoration_count; ++d) {
    const MolecularGraph fragment = parse_smiles(decorations[d]);
    double effect = 0.0;
    for (const Atom &a : fragment.atoms)
      effect += planted_atom_contribution(a);
    data.decoration_effect.push_back(effect);
  }

  std::normal_distribution<double> noise_dist(0.0, 1.0);
  for (std::size_t s = 0; s < config.scaffold_count; ++s) {
    const std::string &tmpl = scaffolds[s];
    const std::size_t site = tmpl.find('*');
    for (std::size_t d = 0; d < config.decoration_count; ++d) {
      // A site outside parentheses receives the fragment as a branch.
      std::string smiles = tmpl.substr(0, site);
      const bool in_branch = site > 0 && tmpl[site - 1] == '(';
      smiles += in_branch ? decorations[d] : "(" + decorations[d] + ")";
      smiles += tmpl.substr(site + 1);

      // The noise draw happens even at sd = 0 so the stream is identical.
      const double z = noise_dist(rng);
      PlantedRecord rec;
      rec.compound_id = "s" + std::to_string(s) + "d" + std::to_string(d);
      rec.scaffold = s;
      rec.decoration = d;
      rec.base = data.scaffold_base[s];
      rec.effect = data.decoration_effect[d];
      rec.noise = config.noise_sd * z;

      Compound c;
      c.id = rec.compound_id;
      c.target_id = config.target_id;
      c.graph = parse_smiles(smiles);
      c.pic50 = rec.base + rec.effect + rec.noise;
      data.compounds.push_back(std::move(c));
      data.smiles.push_back(std::move(smiles));
      data.planted.push_back(rec);
    }
  }
  return data;
}

} // namespace cliffkit
