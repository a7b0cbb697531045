//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CLIFFKIT_RENDER_H_
#define CLIFFKIT_RENDER_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cliffkit/molgraph.h"

namespace cliffkit {

struct RenderConfig {
  std::uint64_t seed = 0;
  std::size_t iterations = 300;
  double panel_size = 260.0;
};

/// Seeded Fruchterman-Reingold embedding scaled into the unit square. Not a
/// chemical depiction; only deterministic.
std::vector<std::array<double, 2>> spring_layout(const MolecularGraph &graph,
                                                 std::uint64_t seed,
                                                 std::size_t iterations);

/// Diverging scale on [-1, 1]: negative toward blue, zero white, positive
/// toward red. Values outside the range are clamped.
std::string diverging_color(double t);

struct RenderPanel {
  std::string title;
  // One value per atom; scaled by the panel's max |value|.
  std::vector<double> values;
};

// Side-by-side panels of one compound sharing a single layout.
std::string render_compound_svg(const MolecularGraph &graph, const std::string &title,
                                const std::vector<RenderPanel> &panels,
                                const RenderConfig &config = {});

} // namespace cliffkit

#endif // CLIFFKIT_RENDER_H_
