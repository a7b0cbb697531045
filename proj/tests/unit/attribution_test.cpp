//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cliffkit/attribution.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "cliffkit/mcs.h"
#include "oracles.h"

namespace cliffkit {
namespace {

const char *kDrug = "CC(C)(C)c1cc(NC(=O)Nc2ccc(OC)cc2)no1";

double total(const std::vector<double> &v) { return std::accumulate(v.begin(), v.end(), 0.0); }

MpnnModel model(std::uint64_t seed, std::size_t hidden = 8) {
  ModelConfig c;
  c.hidden_dim = hidden;
  MpnnModel m = init_parameters(c, seed);
  // Running statistics away from the identity.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.2, 1.5);
  for (ad::RunningStats &r : m.running)
    for (std::size_t k = 0; k < r.mean.size(); ++k) {
      r.mean[k] = u(rng) - 0.8;
      r.var[k] = u(rng);
    }
  return m;
}

double score_at(const MpnnModel &m, const GraphInputs &g, double alpha) {
  ad::Tape tape;
  ad::Tensor atoms = g.atom_features, bonds = g.bond_features;
  for (double &v : atoms.values())
    v *= alpha;
  for (double &v : bonds.values())
    v *= alpha;
  return model_score(m, g)(tape, tape.constant(atoms), tape.constant(bonds)).score.value().item();
}

double completeness_error(const MpnnModel &m, const GraphInputs &g, std::size_t steps) {
  const AttributionMap raw = integrated_gradients(model_score(m, g), g, steps);
  const double mass = total(raw.node_values) + total(raw.edge_values);
  return std::abs(mass - (score_at(m, g, 1.0) - score_at(m, g, 0.0)));
}

CliffPair pair_of(const char *a, const char *b, double ya, double yb) {
  const Compound ci{"A", "T", parse_smiles(a), ya};
  const Compound cj{"B", "T", parse_smiles(b), yb};
  return make_cliff_pair(ci, cj, max_common_substructure(ci.graph, cj.graph));
}

TEST(AttributionTest, MethodNames) {
  for (AttributionMethod m : all_methods())
    EXPECT_EQ(parse_method(method_name(m)), m);
  EXPECT_EQ(method_name(AttributionMethod::GradInput), "gradinput");
  EXPECT_THROW(parse_method("saliency"), std::invalid_argument);
}

TEST(AttributionTest, ZeroModelGivesZeroMaps) {
  ModelConfig c;
  c.hidden_dim = 4;
  const MpnnModel m = zero_model(c);
  const GraphInputs g = make_inputs(parse_smiles(kDrug));
  for (AttributionMethod method : all_methods()) {
    const AttributionMap map = attribute(m, g, method);
    EXPECT_EQ(map.method, method);
    ASSERT_EQ(map.node_values.size(), g.num_atoms);
    EXPECT_TRUE(map.edge_values.empty());
    for (double v : map.node_values)
      EXPECT_EQ(v, 0.0) << method_name(method);
  }
}

TEST(AttributionTest, LinearSurrogateClosedForm) {
  const GraphInputs g = make_inputs(parse_smiles("c1ccccc1C(=O)N"));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  ad::Tensor w = ad::Tensor::zeros_like(g.atom_features);
  ad::Tensor u = ad::Tensor::zeros_like(g.bond_features);
  for (double &v : w.values())
    v = normal(rng);
  for (double &v : u.values())
    v = normal(rng);
  const ScoreFunction linear = [&](ad::Tape &tape, ad::Var atoms, ad::Var bonds) {
    const ad::Var s = ad::add(ad::sum(ad::mul(atoms, tape.constant(w))),
                              ad::sum(ad::mul(bonds, tape.constant(u))));
    return ScoreOutput{s, atoms};
  };
  const AttributionMap gi = gradient_x_input(linear, g);
  const AttributionMap ig = integrated_gradients(linear, g, 64);
  for (std::size_t v = 0; v < g.num_atoms; ++v) {
    double expected = 0.0;
    for (std::size_t c = 0; c < g.atom_features.cols(); ++c)
      expected += w.at(v, c) * g.atom_features.at(v, c);
    EXPECT_NEAR(gi.node_values[v], expected, 1e-12);
    EXPECT_NEAR(ig.node_values[v], gi.node_values[v], 1e-12);
  }
  for (std::size_t e = 0; e < g.edge_source.size(); ++e) {
    double expected = 0.0;
    for (std::size_t c = 0; c < g.bond_features.cols(); ++c)
      expected += u.at(e, c) * g.bond_features.at(e, c);
    EXPECT_NEAR(gi.edge_values[e], expected, 1e-12);
    EXPECT_NEAR(ig.edge_values[e], expected, 1e-12);
  }
}

TEST(AttributionTest, IntegratedGradientsCompleteness) {
  std::mt19937_64 rng(8);
  int improved = 0;
  const int instances = 6;
  for (int k = 0; k < instances; ++k) {
    MolecularGraph mol;
    do {
      mol = oracle::random_molecule(rng, 9);
    } while (mol.num_atoms() < 3);
    const MpnnModel m = model(100 + k);
    const GraphInputs g = make_inputs(mol);
    const double delta = score_at(m, g, 1.0) - score_at(m, g, 0.0);
    const double fine = completeness_error(m, g, 1024);
    EXPECT_LT(fine, 1e-3 * std::max(1.0, std::abs(delta))) << k;
    if (fine < completeness_error(m, g, 8))
      ++improved;
  }
  EXPECT_GE(improved, instances - 1);
}

TEST(AttributionTest, RedistributionMovesHalfToEachEndpoint) {
  AttributionMap map;
  map.node_values = {0.0, 0.0, 0.5};
  map.edge_values = {2.0};
  map.edge_source = {0};
  map.edge_target = {1};
  const AttributionMap out = redistribute_edges(map);
  EXPECT_EQ(out.node_values, (std::vector<double>{1.0, 1.0, 0.5}));
  EXPECT_TRUE(out.edge_values.empty());

  map.edge_values = {0.0};
  map.node_values = {0.3, -0.2, 0.1};
  EXPECT_EQ(redistribute_edges(map).node_values, map.node_values);

  map.edge_values = {1.0, 2.0};
  EXPECT_THROW(redistribute_edges(map), std::invalid_argument);
}

TEST(AttributionTest, RedistributionConservesMass) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  for (int k = 0; k < 20; ++k) {
    const GraphInputs g = make_inputs(oracle::random_molecule(rng, 12));
    AttributionMap map;
    map.node_values.resize(g.num_atoms);
    map.edge_values.resize(g.edge_source.size());
    map.edge_source = g.edge_source;
    map.edge_target = g.edge_target;
    for (double &v : map.node_values)
      v = normal(rng);
    for (double &v : map.edge_values)
      v = normal(rng);
    const double before = total(map.node_values) + total(map.edge_values);
    EXPECT_NEAR(total(redistribute_edges(map).node_values), before, 1e-12);
  }
}

TEST(AttributionTest, DeterministicInEvalMode) {
  const MpnnModel m = model(3);
  const GraphInputs g = make_inputs(parse_smiles(kDrug));
  for (AttributionMethod method : all_methods()) {
    AttributionConfig c;
    c.ig_steps = 16;
    EXPECT_EQ(attribute(m, g, method, c).node_values, attribute(m, g, method, c).node_values);
  }
}

TEST(AttributionTest, CamAndGradCamUnderLinearHeads) {
  // The heads are linear, so the prediction is affine in the pooled
  // embedding: mean CAM plus the intercept is the prediction and Grad-CAM is
  // CAM divided by the atom count.
  const MpnnModel m = model(6);
  MpnnModel silent = m;
  for (int l = 0; l < 3; ++l) {
    for (double &v : silent.parameter("conv" + std::to_string(l) + ".bn.scale").value.values())
      v = 0.0;
    for (double &v : silent.parameter("conv" + std::to_string(l) + ".bn.shift").value.values())
      v = 0.0;
  }
  for (const char *smiles : {kDrug, "CCO", "c1ccncc1Cl"}) {
    const MolecularGraph mol = parse_smiles(smiles);
    const GraphInputs g = make_inputs(mol);
    const double n = static_cast<double>(g.num_atoms);
    const AttributionMap c = attribute(m, g, AttributionMethod::CAM);
    const AttributionMap gc = attribute(m, g, AttributionMethod::GradCAM);
    EXPECT_NEAR(total(c.node_values) / n + predict_affinity(silent, mol), predict_affinity(m, mol),
                1e-10);
    for (std::size_t v = 0; v < g.num_atoms; ++v)
      EXPECT_NEAR(gc.node_values[v], c.node_values[v] / n, 1e-12);
  }
}

TEST(AttributionTest, CamPermutationEquivariance) {
  const MpnnModel m = model(12);
  const MolecularGraph mol = parse_smiles(kDrug);
  std::vector<std::size_t> perm(mol.num_atoms());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(1);
  std::shuffle(perm.begin(), perm.end(), rng);
  MolecularGraph p;
  p.atoms.resize(mol.num_atoms());
  for (std::size_t v = 0; v < mol.num_atoms(); ++v)
    p.atoms[perm[v]] = mol.atoms[v];
  for (const Bond &b : mol.bonds)
    p.bonds.push_back({perm[b.begin], perm[b.end], b.order, b.in_ring});
  for (AttributionMethod method : {AttributionMethod::CAM, AttributionMethod::GradCAM}) {
    const AttributionMap a = attribute(m, make_inputs(mol), method);
    const AttributionMap b = attribute(m, make_inputs(p), method);
    for (std::size_t v = 0; v < mol.num_atoms(); ++v)
      EXPECT_NEAR(a.node_values[v], b.node_values[perm[v]], 1e-10);
  }
}

TEST(AttributionTest, IgRejectsZeroSteps) {
  const MpnnModel m = model(1, 4);
  const GraphInputs g = make_inputs(parse_smiles("CC"));
  EXPECT_THROW(integrated_gradients(model_score(m, g), g, 0), std::invalid_argument);
}

TEST(GroundTruthTest, SignRule) {
  const CliffPair p = pair_of("c1ccccc1CCN", "c1ccccc1CCO", 8.0, 6.0);
  const auto [li, lj] = ground_truth(p);
  ASSERT_EQ(li.size(), p.graph_i.num_atoms());
  for (std::size_t v = 0; v < li.size(); ++v) {
    EXPECT_EQ(li[v], p.uncommon_mask_i[v] ? 1 : 0);
  }
  for (std::size_t v = 0; v < lj.size(); ++v)
    EXPECT_EQ(lj[v], p.uncommon_mask_j[v] ? -1 : 0);
  // One substituent atom differs: one nonzero label each.
  EXPECT_EQ(std::count_if(li.begin(), li.end(), [](int x) { return x != 0; }), 1);
  EXPECT_EQ(std::count_if(lj.begin(), lj.end(), [](int x) { return x != 0; }), 1);
}

TEST(GroundTruthTest, SwappingThePairNegatesLabels) {
  const CliffPair p = pair_of("c1ccccc1C(=O)NC", "c1ccccc1C(=O)OCC", 5.0, 7.5);
  const CliffPair q = pair_of("c1ccccc1C(=O)OCC", "c1ccccc1C(=O)NC", 7.5, 5.0);
  const auto [pi, pj] = ground_truth(p);
  const auto [qi, qj] = ground_truth(q);
  ASSERT_EQ(pi.size(), qj.size());
  ASSERT_EQ(pj.size(), qi.size());
  for (std::size_t v = 0; v < pi.size(); ++v)
    EXPECT_EQ(pi[v], qj[v]);
  for (std::size_t v = 0; v < pj.size(); ++v)
    EXPECT_EQ(pj[v], qi[v]);
  // Reversing only the activities negates every label.
  CliffPair r = p;
  std::swap(r.y_i, r.y_j);
  const auto [ri, rj] = ground_truth(r);
  for (std::size_t v = 0; v < pi.size(); ++v)
    EXPECT_EQ(ri[v], -pi[v]);
  for (std::size_t v = 0; v < pj.size(); ++v)
    EXPECT_EQ(rj[v], -pj[v]);
  r.y_j = r.y_i;
  EXPECT_THROW(ground_truth(r), std::invalid_argument);
}

} // namespace
} // namespace cliffkit
