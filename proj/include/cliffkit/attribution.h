//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CLIFFKIT_ATTRIBUTION_H_
#define CLIFFKIT_ATTRIBUTION_H_

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cliffkit/autodiff.h"
#include "cliffkit/model.h"
#include "cliffkit/pairs.h"

namespace cliffkit {

enum class AttributionMethod { CAM, GradCAM, GradInput, IG };

// "cam", "gradcam", "gradinput", "ig".
std::string method_name(AttributionMethod method);
AttributionMethod parse_method(const std::string &name);
const std::array<AttributionMethod, 4> &all_methods();

struct AttributionConfig {
  std::size_t ig_steps = 64;
};

struct AttributionMap {
  AttributionMethod method = AttributionMethod::CAM;
  std::vector<double> node_values;
  // Per directed edge; empty once redistributed.
  std::vector<double> edge_values;
  std::vector<std::size_t> edge_source;
  std::vector<std::size_t> edge_target;
  // Hash of the checkpoint the map was computed from (may be empty).
  std::string model_ref;
};

/// A differentiable scalar of the graph inputs. `node_embeddings` is the
/// final-layer node matrix the score is computed from (used by Grad-CAM).
struct ScoreOutput {
  ad::Var score;
  ad::Var node_embeddings;
};
using ScoreFunction =
    std::function<ScoreOutput(ad::Tape &, ad::Var atom_input, ad::Var bond_input)>;

// The standalone prediction (eval mode, all-true masks) as a ScoreFunction.
ScoreFunction model_score(const MpnnModel &model, const GraphInputs &graph);

/// node_v = sum_c w_c * h_vc where w is the pooled-embedding-to-output map
/// of the model (see pooled_output_weights).
AttributionMap cam(const MpnnModel &model, const GraphInputs &graph);

// alpha_c = mean_v df/dh_vc; node_v = sum_c alpha_c * h_vc.
AttributionMap grad_cam(const ScoreFunction &f, const GraphInputs &graph);

// Gradient times input on atom and bond features; edge values retained.
AttributionMap gradient_x_input(const ScoreFunction &f, const GraphInputs &graph);

/// Zero baseline, right-endpoint Riemann sum with `steps` points on both atom
/// and bond features; edge values retained.
AttributionMap integrated_gradients(const ScoreFunction &f,
                                    const GraphInputs &graph, std::size_t steps);

/// Runs `method` on the model's standalone prediction and redistributes edge
/// values onto atoms.
AttributionMap attribute(const MpnnModel &model, const GraphInputs &graph,
                         AttributionMethod method,
                         const AttributionConfig &config = {});

// Splits every directed-edge value equally between its two endpoint atoms.
AttributionMap redistribute_edges(const AttributionMap &map);

/// Per-atom labels: uncommon atoms of the more active compound +1, of the
/// less active compound -1, everything else 0. Throws if y_i == y_j.
std::pair<std::vector<int>, std::vector<int>> ground_truth(const CliffPair &pair);

} // namespace cliffkit

#endif // CLIFFKIT_ATTRIBUTION_H_
