//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cliffkit/attribution.h"

#include <stdexcept>

namespace cliffkit {

std::string method_name(AttributionMethod method) {
  switch (method) {
  case AttributionMethod::CAM: return "cam";
  case AttributionMethod::GradCAM: return "gradcam";
  case AttributionMethod::GradInput: return "gradinput";
  case AttributionMethod::IG: return "ig";
  }
  return "cam";
}

const std::array<AttributionMethod, 4> &all_methods() {
  static const std::array<AttributionMethod, 4> methods = {
      AttributionMethod::CAM, AttributionMethod::GradCAM,
      AttributionMethod::GradInput, AttributionMethod::IG};
  return methods;
}

AttributionMethod parse_method(const std::string &name) {
  for (AttributionMethod m : all_methods())
    if (method_name(m) == name)
      return m;
  throw std::invalid_argument("unknown attribution method '" + name +
                              "' (expected cam, gradcam, gradinput or ig)");
}

namespace {

AttributionMap empty_map(AttributionMethod method, const GraphInputs &graph) {
  AttributionMap map;
  map.method = method;
  map.node_values.assign(graph.num_atoms, 0.0);
  map.edge_source = graph.edge_source;
  map.edge_target = graph.edge_target;
  return map;
}

// Row sums of grad (*) input.
std::vector<double> row_products(const ad::Tensor &grad, const ad::Tensor &input,
                                 std::size_t rows) {
  std::vector<double> out(rows, 0.0);
  if (input.size() == 0)
    return out;
  const std::size_t cols = input.cols();
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      out[r] += grad.at(r, c) * input.at(r, c);
  return out;
}

ad::Tensor scaled(const ad::Tensor &t, double factor) {
  ad::Tensor out = t;
  for (double &v : out.values())
    v *= factor;
  return out;
}

} // namespace

ScoreFunction model_score(const MpnnModel &model, const GraphInputs &graph) {
  return [&model, &graph](ad::Tape &tape, ad::Var atoms, ad::Var bonds) {
    const BoundParameters params = bind_parameters(model, tape, false);
    const std::vector<bool> all(graph.num_atoms, true);
    const ForwardTrace trace =
        forward(model, params, atoms, bonds, graph, all, all, Mode::Eval);
    return ScoreOutput{trace.prediction, trace.h};
  };
}

AttributionMap cam(const MpnnModel &model, const GraphInputs &graph) {
  AttributionMap map = empty_map(AttributionMethod::CAM, graph);
  ad::Tape tape;
  const ScoreOutput out = model_score(model, graph)(
      tape, tape.constant(graph.atom_features), tape.constant(graph.bond_features));
  const ad::Tensor &h = out.node_embeddings.value();
  const std::vector<double> w = pooled_output_weights(model);
  for (std::size_t v = 0; v < graph.num_atoms; ++v)
    for (std::size_t c = 0; c < w.size(); ++c)
      map.node_values[v] += w[c] * h.at(v, c);
  return map;
}

AttributionMap grad_cam(const ScoreFunction &f, const GraphInputs &graph) {
  AttributionMap map = empty_map(AttributionMethod::GradCAM, graph);
  if (graph.num_atoms == 0)
    return map;
  ad::Tape tape;
  // The atom input carries a gradient so every downstream node, h included,
  // keeps its adjoint.
  const ScoreOutput out =
      f(tape, tape.input(graph.atom_features), tape.constant(graph.bond_features));
  tape.backward(out.score);
  const ad::Tensor &h = out.node_embeddings.value();
  const ad::Tensor grad = tape.gradient(out.node_embeddings);
  const std::size_t channels = h.cols();
  std::vector<double> alpha(channels, 0.0);
  for (std::size_t v = 0; v < graph.num_atoms; ++v)
    for (std::size_t c = 0; c < channels; ++c)
      alpha[c] += grad.at(v, c);
  for (double &a : alpha)
    a /= static_cast<double>(graph.num_atoms);
  for (std::size_t v = 0; v < graph.num_atoms; ++v)
    for (std::size_t c = 0; c < channels; ++c)
      map.node_values[v] += alpha[c] * h.at(v, c);
  return map;
}

AttributionMap gradient_x_input(const ScoreFunction &f, const GraphInputs &graph) {
  AttributionMap map = empty_map(AttributionMethod::GradInput, graph);
  ad::Tape tape;
  const ad::Var atoms = tape.input(graph.atom_features);
  const ad::Var bonds = tape.input(graph.bond_features);
  tape.backward(f(tape, atoms, bonds).score);
  map.node_values = row_products(tape.gradient(atoms), graph.atom_features,
                                 graph.num_atoms);
  map.edge_values = row_products(tape.gradient(bonds), graph.bond_features,
                                 graph.edge_source.size());
  return map;
}

AttributionMap integrated_gradients(const ScoreFunction &f,
                                    const GraphInputs &graph, std::size_t steps) {
  if (steps < 1)
    throw std::invalid_argument("integrated gradients needs at least one step");
  AttributionMap map = empty_map(AttributionMethod::IG, graph);
  ad::Tensor atom_grad = ad::Tensor::zeros_like(graph.atom_features);
  ad::Tensor bond_grad = ad::Tensor::zeros_like(graph.bond_features);
  for (std::size_t s = 1; s <= steps; ++s) {
    const double alpha = static_cast<double>(s) / static_cast<double>(steps);
    ad::Tape tape;
    const ad::Var atoms = tape.input(scaled(graph.atom_features, alpha));
    const ad::Var bonds = tape.input(scaled(graph.bond_features, alpha));
    tape.backward(f(tape, atoms, bonds).score);
    const auto ga = tape.gradient(atoms).values();
    for (std::size_t i = 0; i < ga.size(); ++i)
      atom_grad[i] += ga[i];
    const auto gb = tape.gradient(bonds).values();
    for (std::size_t i = 0; i < gb.size(); ++i)
      bond_grad[i] += gb[i];
  }
  const double inv = 1.0 / static_cast<double>(steps);
  map.node_values =
      row_products(scaled(atom_grad, inv), graph.atom_features, graph.num_atoms);
  map.edge_values = row_products(scaled(bond_grad, inv), graph.bond_features,
                                 graph.edge_source.size());
  return map;
}

AttributionMap attribute(const MpnnModel &model, const GraphInputs &graph,
                         AttributionMethod method, const AttributionConfig &config) {
  switch (method) {
  case AttributionMethod::CAM: return cam(model, graph);
  case AttributionMethod::GradCAM: return grad_cam(model_score(model, graph), graph);
  case AttributionMethod::GradInput:
    return redistribute_edges(gradient_x_input(model_score(model, graph), graph));
  case AttributionMethod::IG:
    return redistribute_edges(
        integrated_gradients(model_score(model, graph), graph, config.ig_steps));
  }
  throw std::invalid_argument("unknown attribution method");
}

AttributionMap redistribute_edges(const AttributionMap &map) {
  if (map.edge_values.size() != map.edge_source.size() ||
      map.edge_values.size() != map.edge_target.size())
    throw std::invalid_argument("edge values do not match the edge list");
  AttributionMap out = map;
  for (std::size_t e = 0; e < map.edge_values.size(); ++e) {
    const double half = 0.5 * map.edge_values[e];
    out.node_values.at(map.edge_source[e]) += half;
    out.node_values.at(map.edge_target[e]) += half;
  }
  out.edge_values.clear();
  return out;
}

std::pair<std::vector<int>, std::vector<int>> ground_truth(const CliffPair &pair) {
  if (pair.y_i == pair.y_j)
    throw std::invalid_argument("pair " + pair.pair_id +
                                " has equal activities; no cliff direction");
  const int sign_i = pair.y_i > pair.y_j ? 1 : -1;
  auto labels = [](const std::vector<bool> &uncommon, int sign) {
    std::vector<int> out(uncommon.size(), 0);
    for (std::size_t v = 0; v < uncommon.size(); ++v)
      if (uncommon[v])
        out[v] = sign;
    return out;
  };
  return {labels(pair.uncommon_mask_i, sign_i), labels(pair.uncommon_mask_j, -sign_i)};
}

} // namespace cliffkit
