//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CLIFFKIT_MODEL_H_
#define CLIFFKIT_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cliffkit/autodiff.h"
#include "cliffkit/molgraph.h"

namespace cliffkit {

struct ModelConfig {
  std::size_t hidden_dim = 64;
  std::size_t message_layers = 3;
  std::size_t atom_feature_width = kAtomFeatureWidth;
  std::size_t bond_feature_width = kBondFeatureWidth;

  void validate() const;
  bool operator==(const ModelConfig &) const = default;
};

// Number of scalars in a model with this configuration.
std::size_t parameter_count(const ModelConfig &config);

/// All learnable tensors plus batchnorm running statistics. Linear layers
/// compute x * weight + bias with weight shaped (in, out).
///
/// Parameter names, in storage order:
///   node_embed.{weight,bias}, edge_embed.{weight,bias},
///   conv<l>.edge_net.{weight,bias}, conv<l>.root.{weight,bias},
///   conv<l>.bn.{scale,shift}                      for l = 0, 1, 2
///   head_cn.{weight,bias}, head_cn.scalarize.{weight,bias}     (CN_head)
///   head_ucn.{weight,bias}, head_ucn.scalarize.{weight,bias}   (UCN_head)
///   combine.{weight,bias}, out.{weight,bias}
struct MpnnModel {
  ModelConfig config;
  std::vector<ad::Parameter> parameters;
  std::vector<ad::RunningStats> running;

  std::size_t index_of(const std::string &name) const;
  const ad::Parameter &parameter(const std::string &name) const {
    return parameters[index_of(name)];
  }
  ad::Parameter &parameter(const std::string &name) {
    return parameters[index_of(name)];
  }
};

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for every linear weight and bias,
/// batchnorm scale 1 and shift 0, running mean 0 and variance 1.
MpnnModel init_parameters(const ModelConfig &config, std::uint64_t seed);

// Model with every learnable tensor set to zero (running stats as init).
MpnnModel zero_model(const ModelConfig &config);

/// Featurized graph ready for the tape.
struct GraphInputs {
  std::size_t num_atoms = 0;
  ad::Tensor atom_features;
  ad::Tensor bond_features;
  std::vector<std::size_t> edge_source;
  std::vector<std::size_t> edge_target;
};

GraphInputs make_inputs(const MolecularGraph &graph);

enum class Mode { Train, Eval };

// Tape handles for the model parameters, in MpnnModel::parameters order.
struct BoundParameters {
  std::vector<ad::Var> vars;
};

// Trainable parameters get gradients; frozen ones are tape constants.
BoundParameters bind_parameters(const MpnnModel &model, ad::Tape &tape,
                                bool trainable);

struct ForwardTrace {
  ad::Var atom_input;
  ad::Var bond_input;
  std::vector<ad::Var> layer_activations;
  ad::Var h;
  ad::Var readout_cn;
  ad::Var readout_ucn;
  ad::Var head_cn;
  ad::Var head_ucn;
  // Per-head scalar predictions used by the node loss.
  ad::Var node_score_cn;
  ad::Var node_score_ucn;
  ad::Var prediction;
  // Train mode only: per-layer statistics of this graph.
  std::vector<ad::BatchStats> batch_stats;

  double predicted() const { return prediction.value().item(); }
};

/// Full pipeline on one graph. `atom_input` / `bond_input` are the feature
/// tensors already on the tape (constants or gradient inputs). Train mode
/// normalizes with this graph's node statistics and records them in the
/// trace; it never touches the model.
ForwardTrace forward(const MpnnModel &model, const BoundParameters &params,
                     ad::Var atom_input, ad::Var bond_input,
                     const GraphInputs &graph,
                     const std::vector<bool> &common_mask,
                     const std::vector<bool> &uncommon_mask, Mode mode);

// Convenience overload placing the features on the tape as constants.
ForwardTrace forward(const MpnnModel &model, const BoundParameters &params,
                     const GraphInputs &graph,
                     const std::vector<bool> &common_mask,
                     const std::vector<bool> &uncommon_mask, Mode mode);

struct PairMasks {
  std::vector<bool> common_i;
  std::vector<bool> uncommon_i;
  std::vector<bool> common_j;
  std::vector<bool> uncommon_j;
};

struct PairTrace {
  // Both traces share the merged node matrix h (compound i's atoms first).
  ForwardTrace i;
  ForwardTrace j;
  // Train mode only: per-layer statistics over the nodes of both compounds.
  std::vector<ad::BatchStats> batch_stats;
};

// Disjoint union of two graphs; b's atoms follow a's.
GraphInputs merge_inputs(const GraphInputs &a, const GraphInputs &b);

/// Both compounds of a pair in one pass over their disjoint union, so train
/// mode normalizes with statistics of the whole pair. `merged` comes from
/// merge_inputs(i, j) and compound i has `atoms_i` atoms. In eval mode the
/// result equals two separate forward() calls.
PairTrace forward_pair(const MpnnModel &model, const BoundParameters &params,
                       const GraphInputs &merged, std::size_t atoms_i,
                       const PairMasks &masks, Mode mode);

// Folds train-mode batch statistics into the running averages.
void commit_batch_stats(MpnnModel &model, const std::vector<ad::BatchStats> &stats);
void commit_batch_stats(MpnnModel &model, const ForwardTrace &trace);

/// Standalone affinity: eval mode with both masks all-true.
double predict_affinity(const MpnnModel &model, const MolecularGraph &graph);
double predict_affinity(const MpnnModel &model, const GraphInputs &graph);

/// The linear map from the pooled final-layer embedding to the prediction
/// when both readouts see the same pooled vector (all-true masks).
std::vector<double> pooled_output_weights(const MpnnModel &model);

} // namespace cliffkit

#endif // CLIFFKIT_MODEL_H_
