//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cliffkit/model.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace cliffkit {

using ad::Shape;
using ad::Tensor;
using ad::Var;

void ModelConfig::validate() const {
  if (hidden_dim < 4)
    throw std::invalid_argument("hidden_dim must be at least 4");
  if (message_layers != 3)
    throw std::invalid_argument("message_layers must be 3");
  if (atom_feature_width != kAtomFeatureWidth)
    throw std::invalid_argument("atom_feature_width must be " +
                                std::to_string(kAtomFeatureWidth));
  if (bond_feature_width != kBondFeatureWidth)
    throw std::invalid_argument("bond_feature_width must be " +
                                std::to_string(kBondFeatureWidth));
}

std::size_t parameter_count(const ModelConfig &c) {
  const std::size_t h = c.hidden_dim;
  const std::size_t per_layer = (h * h * h + h * h) + (h * h + h) + 2 * h;
  return (c.atom_feature_width * h + h) + (c.bond_feature_width * h + h) +
         c.message_layers * per_layer + 2 * ((h * h + h) + (h + 1)) +
         (2 * h * h + h) + (h + 1);
}

namespace {

// Fixed storage offsets; see the table in model.h.
constexpr std::size_t kNodeEmbed = 0;
constexpr std::size_t kEdgeEmbed = 2;
constexpr std::size_t kFirstLayer = 4;
constexpr std::size_t kPerLayer = 6;

std::size_t layer_base(std::size_t l) { return kFirstLayer + kPerLayer * l; }

std::size_t head_base(const ModelConfig &c) { return layer_base(c.message_layers); }

struct ParameterSpec {
  std::string name;
  ad::GroupTag group;
  Shape shape;
  std::size_t fan_in; // 0 marks batchnorm scale/shift
  double fill;
};

std::vector<ParameterSpec> layout(const ModelConfig &c) {
  using ad::GroupTag;
  const std::size_t h = c.hidden_dim;
  std::vector<ParameterSpec> specs;
  auto linear = [&](const std::string &name, std::size_t in, std::size_t out,
                    GroupTag group) {
    specs.push_back({name + ".weight", group, {in, out}, in, 0.0});
    specs.push_back({name + ".bias", group, {out}, in, 0.0});
  };
  linear("node_embed", c.atom_feature_width, h, GroupTag::Other);
  linear("edge_embed", c.bond_feature_width, h, GroupTag::Other);
  for (std::size_t l = 0; l < c.message_layers; ++l) {
    const std::string prefix = "conv" + std::to_string(l);
    linear(prefix + ".edge_net", h, h * h, GroupTag::Other);
    linear(prefix + ".root", h, h, GroupTag::Other);
    specs.push_back({prefix + ".bn.scale", GroupTag::Other, {h}, 0, 1.0});
    specs.push_back({prefix + ".bn.shift", GroupTag::Other, {h}, 0, 0.0});
  }
  linear("head_cn", h, h, GroupTag::CommonHead);
  linear("head_cn.scalarize", h, 1, GroupTag::CommonHead);
  linear("head_ucn", h, h, GroupTag::UncommonHead);
  linear("head_ucn.scalarize", h, 1, GroupTag::UncommonHead);
  linear("combine", 2 * h, h, GroupTag::Other);
  linear("out", h, 1, GroupTag::Other);
  return specs;
}

std::vector<ad::RunningStats> fresh_running_stats(const ModelConfig &c) {
  std::vector<ad::RunningStats> running(c.message_layers);
  for (auto &r : running) {
    r.mean = Tensor(Shape{c.hidden_dim}, 0.0);
    r.var = Tensor(Shape{c.hidden_dim}, 1.0);
    r.initialized = true;
  }
  return running;
}

Var linear(Var x, const BoundParameters &p, std::size_t weight_index) {
  return ad::add(ad::matmul(x, p.vars[weight_index]), p.vars[weight_index + 1]);
}

struct DistinctRows {
  Tensor rows;
  std::vector<std::size_t> index; // row of each input row in `rows`
};

DistinctRows distinct_rows(const Tensor &t) {
  const std::size_t cols = t.cols();
  std::vector<double> values;
  DistinctRows out;
  std::size_t count = 0;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const double *row = t.data() + r * cols;
    std::size_t k = 0;
    while (k < count && !std::equal(row, row + cols, values.data() + k * cols))
      ++k;
    if (k == count) {
      values.insert(values.end(), row, row + cols);
      ++count;
    }
    out.index.push_back(k);
  }
  out.rows = Tensor(Shape{count, cols}, std::move(values));
  return out;
}

void check_mask(const std::vector<bool> &mask, std::size_t atoms,
                const char *which) {
  if (mask.size() != atoms)
    throw std::invalid_argument(std::string(which) + " mask has " +
                                std::to_string(mask.size()) +
                                " entries for " + std::to_string(atoms) +
                                " atoms");
}

} // namespace

std::size_t MpnnModel::index_of(const std::string &name) const {
  for (std::size_t i = 0; i < parameters.size(); ++i)
    if (parameters[i].name == name)
      return i;
  throw std::out_of_range("no parameter named '" + name + "'");
}

MpnnModel init_parameters(const ModelConfig &config, std::uint64_t seed) {
  config.validate();
  MpnnModel model;
  model.config = config;
  std::mt19937_64 rng(seed);
  for (const ParameterSpec &spec : layout(config)) {
    Tensor t(spec.shape, spec.fill);
    if (spec.fan_in > 0) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(spec.fan_in));
      std::uniform_real_distribution<double> dist(-bound, bound);
      for (double &v : t.values())
        v = dist(rng);
    }
    model.parameters.push_back({spec.name, spec.group, std::move(t)});
  }
  model.running = fresh_running_stats(config);
  return model;
}

MpnnModel zero_model(const ModelConfig &config) {
  config.validate();
  MpnnModel model;
  model.config = config;
  for (const ParameterSpec &spec : layout(config))
    model.parameters.push_back({spec.name, spec.group, Tensor(spec.shape, 0.0)});
  model.running = fresh_running_stats(config);
  return model;
}

GraphInputs make_inputs(const MolecularGraph &graph) {
  GraphInputs in;
  in.num_atoms = graph.num_atoms();
  FeatureMatrix atoms = atom_features(graph);
  in.atom_features = Tensor(Shape{atoms.rows, atoms.cols}, std::move(atoms.values));
  DirectedEdges edges = bond_features(graph);
  in.bond_features = Tensor(Shape{edges.features.rows, edges.features.cols},
                            std::move(edges.features.values));
  in.edge_source = std::move(edges.source);
  in.edge_target = std::move(edges.target);
  return in;
}

BoundParameters bind_parameters(const MpnnModel &model, ad::Tape &tape,
                                bool trainable) {
  BoundParameters bound;
  bound.vars.reserve(model.parameters.size());
  for (const ad::Parameter &p : model.parameters)
    bound.vars.push_back(trainable ? tape.input(p.value) : tape.constant(p.value));
  return bound;
}

namespace {

void check_inputs(const MpnnModel &model, const BoundParameters &params,
                  const Tensor &x, const Tensor &e, const GraphInputs &graph) {
  const ModelConfig &c = model.config;
  if (params.vars.size() != model.parameters.size())
    throw std::invalid_argument("bound parameter count mismatch");
  if (x.rows() != graph.num_atoms || x.cols() != c.atom_feature_width)
    throw std::invalid_argument("atom features do not match model config: " +
                                ad::shape_string(x.shape()));
  if (e.rows() != graph.edge_source.size() ||
      (e.rows() > 0 && e.cols() != c.bond_feature_width))
    throw std::invalid_argument("bond features do not match model config: " +
                                ad::shape_string(e.shape()));
}

// Embeddings and message-passing layers; fills the per-layer part of `trace`.
void encode(const MpnnModel &model, const BoundParameters &params, Var atom_input,
            Var bond_input, const GraphInputs &graph, Mode mode,
            ForwardTrace &trace) {
  const ModelConfig &c = model.config;
  const Tensor &e = bond_input.value();
  trace.atom_input = atom_input;
  trace.bond_input = bond_input;

  Var h = linear(atom_input, params, kNodeEmbed);

  // Without a bond gradient the edge network only needs to see each distinct
  // feature row once; rows are gathered back per edge afterwards.
  ad::Tape &tape = *bond_input.tape;
  const bool dedup = !tape.requires_gradient(bond_input) && e.rows() > 0;
  std::vector<std::size_t> row_of_edge;
  Var edge_embedding;
  if (dedup) {
    const DistinctRows distinct = distinct_rows(e);
    row_of_edge = distinct.index;
    edge_embedding = linear(tape.constant(distinct.rows), params, kEdgeEmbed);
  } else {
    edge_embedding = linear(bond_input, params, kEdgeEmbed);
  }

  for (std::size_t l = 0; l < c.message_layers; ++l) {
    const std::size_t base = layer_base(l);
    Var edge_weights = linear(edge_embedding, params, base);
    if (dedup)
      edge_weights = ad::gather_rows(edge_weights, row_of_edge);
    const Var neighbours = ad::gather_rows(h, graph.edge_source);
    const Var messages = ad::edge_matvec(edge_weights, neighbours);
    const Var aggregate =
        ad::scatter_mean(messages, graph.edge_target, graph.num_atoms);
    const Var pre = ad::add(linear(h, params, base + 2), aggregate);
    Var normalized;
    if (mode == Mode::Train) {
      ad::BatchStats stats;
      normalized = ad::batchnorm_train(pre, params.vars[base + 4],
                                       params.vars[base + 5], &stats);
      trace.batch_stats.push_back(std::move(stats));
    } else {
      normalized = ad::batchnorm_eval(pre, params.vars[base + 4],
                                      params.vars[base + 5], model.running[l]);
    }
    h = ad::relu(normalized);
    trace.layer_activations.push_back(h);
  }
  trace.h = h;
}

// Masked readouts, heads and the output layers on top of trace.h.
void attach_heads(const MpnnModel &model, const BoundParameters &params,
                  const std::vector<bool> &common_mask,
                  const std::vector<bool> &uncommon_mask, ForwardTrace &trace) {
  const std::size_t head = head_base(model.config);
  trace.readout_cn = ad::masked_mean(trace.h, common_mask);
  trace.readout_ucn = ad::masked_mean(trace.h, uncommon_mask);
  trace.head_cn = linear(trace.readout_cn, params, head);
  trace.node_score_cn = linear(trace.head_cn, params, head + 2);
  trace.head_ucn = linear(trace.readout_ucn, params, head + 4);
  trace.node_score_ucn = linear(trace.head_ucn, params, head + 6);
  const Var combined =
      linear(ad::concat({trace.head_cn, trace.head_ucn}, 1), params, head + 8);
  trace.prediction = linear(combined, params, head + 10);
}

std::vector<bool> padded(const std::vector<bool> &mask, std::size_t before,
                         std::size_t after) {
  std::vector<bool> out(before, false);
  out.insert(out.end(), mask.begin(), mask.end());
  out.resize(out.size() + after, false);
  return out;
}

} // namespace

ForwardTrace forward(const MpnnModel &model, const BoundParameters &params,
                     Var atom_input, Var bond_input, const GraphInputs &graph,
                     const std::vector<bool> &common_mask,
                     const std::vector<bool> &uncommon_mask, Mode mode) {
  check_inputs(model, params, atom_input.value(), bond_input.value(), graph);
  check_mask(common_mask, graph.num_atoms, "common");
  check_mask(uncommon_mask, graph.num_atoms, "uncommon");
  ForwardTrace trace;
  encode(model, params, atom_input, bond_input, graph, mode, trace);
  attach_heads(model, params, common_mask, uncommon_mask, trace);
  return trace;
}

GraphInputs merge_inputs(const GraphInputs &a, const GraphInputs &b) {
  auto stack = [](const Tensor &x, const Tensor &y, std::size_t cols) {
    std::vector<double> values(x.values().begin(), x.values().end());
    values.insert(values.end(), y.values().begin(), y.values().end());
    const std::size_t rows = values.size() / cols;
    return Tensor(Shape{rows, cols}, std::move(values));
  };
  GraphInputs out;
  out.num_atoms = a.num_atoms + b.num_atoms;
  out.atom_features = stack(a.atom_features, b.atom_features, kAtomFeatureWidth);
  out.bond_features = stack(a.bond_features, b.bond_features, kBondFeatureWidth);
  out.edge_source = a.edge_source;
  out.edge_target = a.edge_target;
  for (std::size_t s : b.edge_source)
    out.edge_source.push_back(s + a.num_atoms);
  for (std::size_t t : b.edge_target)
    out.edge_target.push_back(t + a.num_atoms);
  return out;
}

PairTrace forward_pair(const MpnnModel &model, const BoundParameters &params,
                       const GraphInputs &merged, std::size_t atoms_i,
                       const PairMasks &masks, Mode mode) {
  ad::Tape &tape = *params.vars.front().tape;
  const Var atoms = tape.constant(merged.atom_features);
  const Var bonds = tape.constant(merged.bond_features);
  check_inputs(model, params, atoms.value(), bonds.value(), merged);
  if (atoms_i > merged.num_atoms)
    throw std::invalid_argument("compound i has more atoms than the merged graph");
  const std::size_t atoms_j = merged.num_atoms - atoms_i;
  check_mask(masks.common_i, atoms_i, "common i");
  check_mask(masks.uncommon_i, atoms_i, "uncommon i");
  check_mask(masks.common_j, atoms_j, "common j");
  check_mask(masks.uncommon_j, atoms_j, "uncommon j");

  PairTrace out;
  encode(model, params, atoms, bonds, merged, mode, out.i);
  out.batch_stats = std::move(out.i.batch_stats);
  out.i.batch_stats.clear();
  out.j.atom_input = out.i.atom_input;
  out.j.bond_input = out.i.bond_input;
  out.j.layer_activations = out.i.layer_activations;
  out.j.h = out.i.h;
  attach_heads(model, params, padded(masks.common_i, 0, atoms_j),
               padded(masks.uncommon_i, 0, atoms_j), out.i);
  attach_heads(model, params, padded(masks.common_j, atoms_i, 0),
               padded(masks.uncommon_j, atoms_i, 0), out.j);
  return out;
}

ForwardTrace forward(const MpnnModel &model, const BoundParameters &params,
                     const GraphInputs &graph,
                     const std::vector<bool> &common_mask,
                     const std::vector<bool> &uncommon_mask, Mode mode) {
  ad::Tape &tape = *params.vars.front().tape;
  const Var atoms = tape.constant(graph.atom_features);
  const Var bonds = tape.constant(graph.bond_features);
  return forward(model, params, atoms, bonds, graph, common_mask, uncommon_mask,
                 mode);
}

void commit_batch_stats(MpnnModel &model, const std::vector<ad::BatchStats> &stats) {
  if (stats.size() != model.running.size())
    throw std::logic_error("no batch statistics to commit");
  for (std::size_t l = 0; l < model.running.size(); ++l)
    ad::update_running_stats(model.running[l], stats[l]);
}

void commit_batch_stats(MpnnModel &model, const ForwardTrace &trace) {
  commit_batch_stats(model, trace.batch_stats);
}

double predict_affinity(const MpnnModel &model, const GraphInputs &graph) {
  ad::Tape tape;
  const BoundParameters params = bind_parameters(model, tape, false);
  const std::vector<bool> all(graph.num_atoms, true);
  return forward(model, params, graph, all, all, Mode::Eval).predicted();
}

double predict_affinity(const MpnnModel &model, const MolecularGraph &graph) {
  return predict_affinity(model, make_inputs(graph));
}

std::vector<double> pooled_output_weights(const MpnnModel &model) {
  const std::size_t h = model.config.hidden_dim;
  const std::size_t head = head_base(model.config);
  const Tensor &w_cn = model.parameters[head].value;
  const Tensor &w_ucn = model.parameters[head + 4].value;
  const Tensor &w_combine = model.parameters[head + 8].value;
  const Tensor &w_out = model.parameters[head + 10].value;

  // combine * out, split into the halves fed by each head.
  std::vector<double> through_combine(2 * h, 0.0);
  for (std::size_t r = 0; r < 2 * h; ++r)
    for (std::size_t k = 0; k < h; ++k)
      through_combine[r] += w_combine.at(r, k) * w_out.at(k, 0);

  std::vector<double> w(h, 0.0);
  for (std::size_t c = 0; c < h; ++c)
    for (std::size_t k = 0; k < h; ++k)
      w[c] += w_cn.at(c, k) * through_combine[k] +
              w_ucn.at(c, k) * through_combine[h + k];
  return w;
}

} // namespace cliffkit
