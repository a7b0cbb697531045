//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cliffkit/molgraph.h"

#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace cliffkit {
namespace {

TEST(SmilesTest, Ethanol) {
  const MolecularGraph g = parse_smiles("CCO");
  ASSERT_EQ(g.num_atoms(), 3);
  ASSERT_EQ(g.num_bonds(), 2);
  EXPECT_EQ(g.atoms[0].element, Element::C);
  EXPECT_EQ(g.atoms[1].element, Element::C);
  EXPECT_EQ(g.atoms[2].element, Element::O);
  for (const Bond &b : g.bonds) {
    EXPECT_EQ(b.order, BondOrder::Single);
    EXPECT_FALSE(b.in_ring);
  }
  EXPECT_EQ(g.source_smiles, "CCO");
}

TEST(SmilesTest, Benzene) {
  const MolecularGraph g = parse_smiles("c1ccccc1");
  ASSERT_EQ(g.num_atoms(), 6);
  ASSERT_EQ(g.num_bonds(), 6);
  for (const Atom &a : g.atoms) {
    EXPECT_TRUE(a.aromatic);
    EXPECT_EQ(a.element, Element::C);
  }
  for (const Bond &b : g.bonds) {
    EXPECT_EQ(b.order, BondOrder::Aromatic);
    EXPECT_TRUE(b.in_ring);
  }
}

TEST(SmilesTest, AceticAcid) {
  const MolecularGraph g = parse_smiles("CC(=O)O");
  ASSERT_EQ(g.num_atoms(), 4);
  ASSERT_EQ(g.num_bonds(), 3);
  EXPECT_EQ(g.bonds[g.find_bond(0, 1)].order, BondOrder::Single);
  EXPECT_EQ(g.bonds[g.find_bond(1, 2)].order, BondOrder::Double);
  EXPECT_EQ(g.bonds[g.find_bond(1, 3)].order, BondOrder::Single);
  EXPECT_LT(g.find_bond(2, 3), 0);
}

TEST(SmilesTest, BracketAtoms) {
  const MolecularGraph g = parse_smiles("[NH3+]C");
  ASSERT_EQ(g.num_atoms(), 2);
  EXPECT_EQ(g.atoms[0].element, Element::N);
  EXPECT_EQ(g.atoms[0].formal_charge, 1);
  EXPECT_EQ(g.atoms[0].explicit_h, 3);
  const MolecularGraph o = parse_smiles("C[O-]");
  EXPECT_EQ(o.atoms[1].formal_charge, -1);
  const MolecularGraph cl = parse_smiles("ClC(Br)I");
  EXPECT_EQ(cl.atoms[0].element, Element::Cl);
  EXPECT_EQ(cl.atoms[2].element, Element::Br);
  EXPECT_EQ(cl.atoms[3].element, Element::I);
}

TEST(SmilesTest, RingClosuresAndPercentLabels) {
  const MolecularGraph g = parse_smiles("C%12CC%12");
  EXPECT_EQ(g.num_atoms(), 3);
  EXPECT_EQ(g.num_bonds(), 3);
  const MolecularGraph fused = parse_smiles("c1ccc2ccccc2c1");
  EXPECT_EQ(fused.num_atoms(), 10);
  EXPECT_EQ(fused.num_bonds(), 11);
  for (const Bond &b : fused.bonds)
    EXPECT_TRUE(b.in_ring);
  // A ring closure may carry its own bond symbol.
  const MolecularGraph closure = parse_smiles("C=1CCC1");
  EXPECT_EQ(closure.bonds[closure.find_bond(0, 3)].order, BondOrder::Double);
}

TEST(SmilesTest, RingFlagsOnlyOnCycles) {
  const MolecularGraph g = parse_smiles("CC1CCCC1C");
  EXPECT_FALSE(g.bonds[g.find_bond(0, 1)].in_ring);
  EXPECT_FALSE(g.bonds[g.find_bond(5, 6)].in_ring);
  EXPECT_TRUE(g.bonds[g.find_bond(1, 2)].in_ring);
  EXPECT_TRUE(g.bonds[g.find_bond(1, 5)].in_ring);
}

TEST(SmilesTest, StereoIsDroppedWithWarning) {
  std::vector<std::string> warnings;
  const MolecularGraph g = parse_smiles("F/C=C/F", &warnings);
  EXPECT_EQ(g.num_atoms(), 4);
  EXPECT_FALSE(warnings.empty());
  std::vector<std::string> w2;
  EXPECT_EQ(parse_smiles("N[C@@H](C)C(=O)O", &w2).num_atoms(), 6);
  EXPECT_FALSE(w2.empty());
}

TEST(SmilesTest, Errors) {
  EXPECT_THROW(parse_smiles(""), SmilesError);
  EXPECT_THROW(parse_smiles("CC.O"), SmilesError);
  EXPECT_THROW(parse_smiles("C1CC"), SmilesError);
  EXPECT_THROW(parse_smiles("C(C"), SmilesError);
  EXPECT_THROW(parse_smiles("CC)"), SmilesError);
  EXPECT_THROW(parse_smiles("[Xe]"), SmilesError);
  EXPECT_THROW(parse_smiles("C$C"), SmilesError);
  try {
    parse_smiles("CC$");
    FAIL();
  } catch (const SmilesError &e) {
    EXPECT_EQ(e.position(), 2);
  }
}

TEST(SmilesTest, CountsMatchHandLabels) {
  struct Case {
    const char *smiles;
    std::size_t atoms, bonds;
  };
  const Case cases[] = {
      {"C", 1, 0},
      {"CC(C)(C)C", 5, 4},
      {"C1CCCCC1", 6, 6},
      {"O=C(Nc1ccc(Cl)cc1)c1cc2ccccc2o1", 19, 21},
      {"COc1cc2ncnc(Nc3cccc(C#N)c3)c2cc1OC", 23, 25},
      {"N#N", 2, 1},
  };
  for (const Case &c : cases) {
    const MolecularGraph g = parse_smiles(c.smiles);
    EXPECT_EQ(g.num_atoms(), c.atoms) << c.smiles;
    EXPECT_EQ(g.num_bonds(), c.bonds) << c.smiles;
  }
}

TEST(SmilesTest, Deterministic) {
  const char *text = "CC(C)(C)c1cc(NC(=O)Nc2ccc(OC(F)(F)F)cc2)no1";
  EXPECT_TRUE(parse_smiles(text).structurally_equal(parse_smiles(text)));
}

TEST(ValidateGraphTest, RejectsBrokenGraphs) {
  MolecularGraph g = parse_smiles("CCC");
  EXPECT_NO_THROW(validate_graph(g));
  MolecularGraph dup = g;
  dup.bonds.push_back({0, 1, BondOrder::Single, false});
  EXPECT_THROW(validate_graph(dup), std::invalid_argument);
  MolecularGraph split = g;
  split.bonds.pop_back();
  EXPECT_THROW(validate_graph(split), std::invalid_argument);
  MolecularGraph arom = g;
  arom.bonds[0].order = BondOrder::Aromatic;
  EXPECT_THROW(validate_graph(arom), std::invalid_argument);
  MolecularGraph loop = g;
  loop.bonds.push_back({2, 2, BondOrder::Single, false});
  EXPECT_THROW(validate_graph(loop), std::invalid_argument);
}

TEST(FeaturesTest, SingleCarbon) {
  const FeatureMatrix f = atom_features(parse_smiles("C"));
  ASSERT_EQ(f.rows, 1);
  ASSERT_EQ(f.cols, kAtomFeatureWidth);
  double total = 0.0;
  for (double v : f.values)
    total += v;
  EXPECT_EQ(total, 4.0); // element, degree, charge, hydrogens
  EXPECT_EQ(f.at(0, atom_slots::kElement + 1), 1.0);
  EXPECT_EQ(f.at(0, atom_slots::kDegree + 0), 1.0);
  EXPECT_EQ(f.at(0, atom_slots::kCharge + 1), 1.0);
  EXPECT_EQ(f.at(0, atom_slots::kAromatic), 0.0);
  EXPECT_EQ(f.at(0, atom_slots::kHydrogens + 0), 1.0);
}

TEST(FeaturesTest, DegreeAndCharge) {
  const FeatureMatrix f = atom_features(parse_smiles("CCO"));
  EXPECT_EQ(f.at(1, atom_slots::kDegree + 2), 1.0);
  const FeatureMatrix n = atom_features(parse_smiles("[NH3+]C"));
  EXPECT_EQ(n.at(0, atom_slots::kElement + 2), 1.0);
  EXPECT_EQ(n.at(0, atom_slots::kCharge + 2), 1.0);
  EXPECT_EQ(n.at(0, atom_slots::kHydrogens + 3), 1.0);
  const FeatureMatrix clipped = atom_features(parse_smiles("[O-2]"));
  EXPECT_EQ(clipped.at(0, atom_slots::kCharge + 0), 1.0);
}

TEST(FeaturesTest, BondRows) {
  const DirectedEdges cc = bond_features(parse_smiles("CC"));
  ASSERT_EQ(cc.source.size(), 2);
  EXPECT_EQ(cc.features.rows, 2);
  EXPECT_EQ(cc.features.cols, kBondFeatureWidth);
  EXPECT_EQ(cc.source[0], cc.target[1]);
  EXPECT_EQ(cc.target[0], cc.source[1]);
  for (std::size_t e = 0; e < 2; ++e) {
    EXPECT_EQ(cc.features.at(e, bond_slots::kOrder + 0), 1.0);
    EXPECT_EQ(cc.features.at(e, bond_slots::kInRing), 0.0);
  }
  const DirectedEdges benzene = bond_features(parse_smiles("c1ccccc1"));
  EXPECT_EQ(benzene.features.rows, 12);
  for (std::size_t e = 0; e < 12; ++e) {
    EXPECT_EQ(benzene.features.at(e, bond_slots::kOrder + 3), 1.0);
    EXPECT_EQ(benzene.features.at(e, bond_slots::kInRing), 1.0);
  }
  const DirectedEdges ethene = bond_features(parse_smiles("C=C"));
  EXPECT_EQ(ethene.features.at(0, bond_slots::kOrder + 1), 1.0);
  EXPECT_EQ(ethene.features.at(1, bond_slots::kOrder + 1), 1.0);
}

TEST(FeaturesTest, DirectedEdgesComeInIdenticalPairs) {
  const MolecularGraph g = parse_smiles("O=C(Nc1ccc(Cl)cc1)c1cc2ccccc2o1");
  const DirectedEdges d = bond_features(g);
  ASSERT_EQ(d.source.size(), 2 * g.num_bonds());
  for (std::size_t b = 0; b < g.num_bonds(); ++b) {
    EXPECT_EQ(d.source[2 * b], g.bonds[b].begin);
    EXPECT_EQ(d.target[2 * b], g.bonds[b].end);
    EXPECT_EQ(d.source[2 * b + 1], g.bonds[b].end);
    for (std::size_t c = 0; c < kBondFeatureWidth; ++c)
      EXPECT_EQ(d.features.at(2 * b, c), d.features.at(2 * b + 1, c));
  }
}

} // namespace
} // namespace cliffkit
