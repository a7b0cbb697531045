//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cliffkit/model.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "gradcheck.h"
#include "oracles.h"

namespace cliffkit {
namespace {

const char *kDrug = "CC(C)(C)c1cc(NC(=O)Nc2ccc(OC)cc2)no1";

// Parameter count from the layer shapes, written out independently.
std::size_t counted_by_hand(std::size_t h) {
  const std::size_t node_embed = 26 * h + h;
  const std::size_t edge_embed = 5 * h + h;
  const std::size_t edge_net = h * (h * h) + h * h;
  const std::size_t root = h * h + h;
  const std::size_t bn = 2 * h;
  const std::size_t head = h * h + h;
  const std::size_t scalarize = h + 1;
  const std::size_t combine = 2 * h * h + h;
  const std::size_t out = h + 1;
  return node_embed + edge_embed + 3 * (edge_net + root + bn) + 2 * (head + scalarize) +
         combine + out;
}

std::vector<bool> all_true(std::size_t n) { return std::vector<bool>(n, true); }

double eval_prediction(const MpnnModel &m, const GraphInputs &g, const std::vector<bool> &c,
                       const std::vector<bool> &u) {
  ad::Tape tape;
  return forward(m, bind_parameters(m, tape, false), g, c, u, Mode::Eval).predicted();
}

MolecularGraph permuted(const MolecularGraph &g, const std::vector<std::size_t> &perm,
                        std::mt19937_64 &rng) {
  // perm[old] = new
  MolecularGraph out;
  out.atoms.resize(g.num_atoms());
  for (std::size_t v = 0; v < g.num_atoms(); ++v)
    out.atoms[perm[v]] = g.atoms[v];
  for (const Bond &b : g.bonds)
    out.bonds.push_back({perm[b.end], perm[b.begin], b.order, b.in_ring});
  std::shuffle(out.bonds.begin(), out.bonds.end(), rng);
  return out;
}

TEST(ModelTest, ParameterCountClosedForm) {
  for (std::size_t h : {4, 8, 16, 64}) {
    ModelConfig c;
    c.hidden_dim = h;
    EXPECT_EQ(parameter_count(c), counted_by_hand(h)) << h;
    const MpnnModel m = init_parameters(c, 1);
    std::size_t stored = 0;
    for (const ad::Parameter &p : m.parameters)
      stored += p.value.size();
    EXPECT_EQ(stored, counted_by_hand(h)) << h;
  }
  ModelConfig c;
  EXPECT_EQ(parameter_count(c), 830467);
}

TEST(ModelTest, ConfigValidation) {
  ModelConfig c;
  c.hidden_dim = 3;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.hidden_dim = 8;
  c.message_layers = 2;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.message_layers = 3;
  c.atom_feature_width = 27;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(ModelTest, GroupTagsCoverExactlyTheHeads) {
  ModelConfig c;
  c.hidden_dim = 8;
  const MpnnModel m = init_parameters(c, 0);
  for (const ad::Parameter &p : m.parameters) {
    const bool cn = p.name.rfind("head_cn.", 0) == 0;
    const bool ucn = p.name.rfind("head_ucn.", 0) == 0;
    EXPECT_EQ(p.group == ad::GroupTag::CommonHead, cn) << p.name;
    EXPECT_EQ(p.group == ad::GroupTag::UncommonHead, ucn) << p.name;
  }
  EXPECT_EQ(m.parameter("head_cn.weight").value.shape(), (ad::Shape{8, 8}));
  EXPECT_EQ(m.parameter("head_ucn.scalarize.weight").value.shape(), (ad::Shape{8, 1}));
  EXPECT_EQ(m.parameter("conv1.edge_net.weight").value.shape(), (ad::Shape{8, 64}));
  EXPECT_EQ(m.parameter("combine.weight").value.shape(), (ad::Shape{16, 8}));
  EXPECT_THROW(m.index_of("nope"), std::out_of_range);
}

TEST(ModelTest, InitializationBoundsAndDeterminism) {
  ModelConfig c;
  c.hidden_dim = 8;
  const MpnnModel a = init_parameters(c, 42);
  const MpnnModel b = init_parameters(c, 42);
  const MpnnModel other = init_parameters(c, 43);
  bool differs = false;
  for (std::size_t k = 0; k < a.parameters.size(); ++k) {
    EXPECT_EQ(a.parameters[k].value, b.parameters[k].value);
    differs |= !(a.parameters[k].value == other.parameters[k].value);
    const ad::Parameter &p = a.parameters[k];
    if (p.name.find(".bn.scale") != std::string::npos) {
      for (double v : p.value.values())
        EXPECT_EQ(v, 1.0);
      continue;
    }
    if (p.name.find(".bn.shift") != std::string::npos) {
      for (double v : p.value.values())
        EXPECT_EQ(v, 0.0);
      continue;
    }
    const std::string layer = p.name.substr(0, p.name.rfind('.'));
    const std::size_t fan_in = a.parameter(layer + ".weight").value.rows();
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (double v : p.value.values())
      EXPECT_LE(std::abs(v), bound) << p.name;
  }
  EXPECT_TRUE(differs);
}

TEST(ModelTest, ZeroModelPredictsZero) {
  ModelConfig c;
  c.hidden_dim = 8;
  const MpnnModel m = zero_model(c);
  EXPECT_EQ(predict_affinity(m, parse_smiles(kDrug)), 0.0);
  EXPECT_EQ(predict_affinity(m, parse_smiles("C")), 0.0);
}

TEST(ModelTest, SingleAtomIsFinite) {
  ModelConfig c;
  c.hidden_dim = 8;
  const MpnnModel m = init_parameters(c, 3);
  EXPECT_TRUE(std::isfinite(predict_affinity(m, parse_smiles("[NH4+]"))));
  ad::Tape tape;
  const GraphInputs g = make_inputs(parse_smiles("O"));
  const ForwardTrace t =
      forward(m, bind_parameters(m, tape, true), g, {true}, {false}, Mode::Train);
  EXPECT_TRUE(std::isfinite(t.predicted()));
}

TEST(ModelTest, PredictAffinityIsTheAllTrueForward) {
  ModelConfig c;
  c.hidden_dim = 8;
  const MpnnModel m = init_parameters(c, 5);
  const MolecularGraph g = parse_smiles(kDrug);
  const GraphInputs in = make_inputs(g);
  const double direct = eval_prediction(m, in, all_true(g.num_atoms()), all_true(g.num_atoms()));
  EXPECT_EQ(predict_affinity(m, g), direct);
  EXPECT_EQ(predict_affinity(m, g), predict_affinity(m, parse_smiles(kDrug)));
}

TEST(ModelTest, PermutationInvariance) {
  ModelConfig c;
  c.hidden_dim = 8;
  const MpnnModel m = init_parameters(c, 9);
  const MolecularGraph g = parse_smiles(kDrug);
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<std::size_t> perm(g.num_atoms());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    const MolecularGraph p = permuted(g, perm, rng);
    EXPECT_NEAR(predict_affinity(m, g), predict_affinity(m, p), 1e-10);
    // Pair masks permute along with the atoms.
    std::vector<bool> common(g.num_atoms()), uncommon(g.num_atoms());
    std::vector<bool> pc(g.num_atoms()), pu(g.num_atoms());
    for (std::size_t v = 0; v < g.num_atoms(); ++v) {
      common[v] = v % 3 != 0;
      uncommon[v] = !common[v];
      pc[perm[v]] = common[v];
      pu[perm[v]] = uncommon[v];
    }
    EXPECT_NEAR(eval_prediction(m, make_inputs(g), common, uncommon),
                eval_prediction(m, make_inputs(p), pc, pu), 1e-10);
  }
}

TEST(ModelTest, MaskLengthMismatchThrows) {
  ModelConfig c;
  c.hidden_dim = 4;
  const MpnnModel m = init_parameters(c, 1);
  const GraphInputs g = make_inputs(parse_smiles("CCO"));
  ad::Tape tape;
  const BoundParameters p = bind_parameters(m, tape, false);
  EXPECT_THROW(forward(m, p, g, {true, true}, {false, false, false}, Mode::Eval),
               std::invalid_argument);
  EXPECT_THROW(forward(m, p, g, all_true(3), {false}, Mode::Eval), std::invalid_argument);
  GraphInputs bad = g;
  bad.atom_features = ad::Tensor({3, 25});
  EXPECT_ANY_THROW(forward(m, p, bad, all_true(3), all_true(3), Mode::Eval));
}

TEST(ModelTest, TraceKeepsEveryIntermediate) {
  ModelConfig c;
  c.hidden_dim = 4;
  const MpnnModel m = init_parameters(c, 1);
  const GraphInputs g = make_inputs(parse_smiles("CCOC"));
  ad::Tape tape;
  const ForwardTrace t = forward(m, bind_parameters(m, tape, false), g, {true, true, false, false},
                                 {false, false, true, true}, Mode::Train);
  ASSERT_EQ(t.layer_activations.size(), 3);
  for (const ad::Var &a : t.layer_activations)
    for (double v : a.value().values())
      EXPECT_GE(v, 0.0);
  EXPECT_EQ(t.h.value(), t.layer_activations.back().value());
  EXPECT_EQ(t.readout_cn.value().size(), 4);
  EXPECT_EQ(t.head_ucn.value().size(), 4);
  EXPECT_EQ(t.batch_stats.size(), 3);
}

TEST(ModelTest, PairForwardInEvalEqualsSeparateForwards) {
  ModelConfig c;
  c.hidden_dim = 8;
  const MpnnModel m = init_parameters(c, 2);
  const GraphInputs a = make_inputs(parse_smiles("c1ccccc1OC"));
  const GraphInputs b = make_inputs(parse_smiles("c1ccccc1NCC"));
  const PairMasks masks{{true, true, true, true, true, true, false, false},
                        {false, false, false, false, false, false, true, true},
                        {true, true, true, true, true, true, false, false, false},
                        {false, false, false, false, false, false, true, true, true}};
  ad::Tape tape;
  const BoundParameters p = bind_parameters(m, tape, false);
  const PairTrace pair = forward_pair(m, p, merge_inputs(a, b), a.num_atoms, masks, Mode::Eval);
  EXPECT_NEAR(pair.i.predicted(),
              eval_prediction(m, a, masks.common_i, masks.uncommon_i), 1e-12);
  EXPECT_NEAR(pair.j.predicted(),
              eval_prediction(m, b, masks.common_j, masks.uncommon_j), 1e-12);
}

TEST(ModelTest, BatchStatsCommitMovesRunningAverages) {
  ModelConfig c;
  c.hidden_dim = 4;
  MpnnModel m = init_parameters(c, 2);
  const GraphInputs g = make_inputs(parse_smiles("CCOCN"));
  ad::Tape tape;
  const ForwardTrace t = forward(m, bind_parameters(m, tape, false), g, all_true(5),
                                 all_true(5), Mode::Train);
  const ad::Tensor before = m.running[0].mean;
  commit_batch_stats(m, t);
  for (std::size_t i = 0; i < before.size(); ++i)
    EXPECT_DOUBLE_EQ(m.running[0].mean[i],
                     0.9 * before[i] + 0.1 * t.batch_stats[0].mean[i]);
}

TEST(ModelTest, PooledOutputWeightsReproduceThePrediction) {
  // With all-true masks the output is linear in the pooled embedding, so
  // w . mean(h) plus the constant term equals the prediction.
  ModelConfig c;
  c.hidden_dim = 8;
  const MpnnModel m = init_parameters(c, 4);
  const MpnnModel zero_h = [&] {
    MpnnModel z = m;
    for (int l = 0; l < 3; ++l) {
      for (double &v : z.parameter("conv" + std::to_string(l) + ".bn.scale").value.values())
        v = 0.0;
      for (double &v : z.parameter("conv" + std::to_string(l) + ".bn.shift").value.values())
        v = 0.0;
    }
    return z;
  }();
  const std::vector<double> w = pooled_output_weights(m);
  for (const char *smiles : {kDrug, "CCO", "c1ccncc1"}) {
    const MolecularGraph g = parse_smiles(smiles);
    const GraphInputs in = make_inputs(g);
    ad::Tape tape;
    const ForwardTrace t = forward(m, bind_parameters(m, tape, false), in, all_true(g.num_atoms()),
                                   all_true(g.num_atoms()), Mode::Eval);
    const ad::Tensor pooled = t.readout_cn.value();
    double linear = predict_affinity(zero_h, g);
    for (std::size_t k = 0; k < w.size(); ++k)
      linear += w[k] * pooled[k];
    EXPECT_NEAR(linear, t.predicted(), 1e-10) << smiles;
  }
}

TEST(ModelTest, EndToEndGradientsMatchFiniteDifferences) {
  for (std::uint64_t seed = 100; seed < 106; ++seed) {
    const oracle::GradcheckResult r = oracle::gradient_check(oracle::random_instance(seed));
    EXPECT_GT(r.checked, 0);
    EXPECT_LT(r.max_error, 1e-4) << "seed " << seed;
  }
}

} // namespace
} // namespace cliffkit
