//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cliffkit/render.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "cliffkit/io.h"

namespace cliffkit {

std::vector<std::array<double, 2>> spring_layout(const MolecularGraph &graph,
                                                 std::uint64_t seed,
                                                 std::size_t iterations) {
  const std::size_t n = graph.num_atoms();
  std::vector<std::array<double, 2>> pos(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto &p : pos)
    p = {unit(rng), unit(rng)};
  if (n < 2) {
    for (auto &p : pos)
      p = {0.5, 0.5};
    return pos;
  }
  const double k = std::sqrt(1.0 / static_cast<double>(n));
  std::vector<std::array<double, 2>> disp(n);
  for (std::size_t it = 0; it < iterations; ++it) {
    const double temperature =
        0.1 * (1.0 - static_cast<double>(it) / static_cast<double>(iterations));
    for (auto &d : disp)
      d = {0.0, 0.0};
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v) {
        const double dx = pos[u][0] - pos[v][0];
        const double dy = pos[u][1] - pos[v][1];
        const double dist = std::max(std::hypot(dx, dy), 1e-9);
        const double force = k * k / dist;
        disp[u][0] += dx / dist * force;
        disp[u][1] += dy / dist * force;
        disp[v][0] -= dx / dist * force;
        disp[v][1] -= dy / dist * force;
      }
    for (const Bond &b : graph.bonds) {
      const double dx = pos[b.begin][0] - pos[b.end][0];
      const double dy = pos[b.begin][1] - pos[b.end][1];
      const double dist = std::max(std::hypot(dx, dy), 1e-9);
      const double force = dist * dist / k;
      disp[b.begin][0] -= dx / dist * force;
      disp[b.begin][1] -= dy / dist * force;
      disp[b.end][0] += dx / dist * force;
      disp[b.end][1] += dy / dist * force;
    }
    for (std::size_t v = 0; v < n; ++v) {
      const double len = std::max(std::hypot(disp[v][0], disp[v][1]), 1e-9);
      const double step = std::min(len, temperature);
      pos[v][0] += disp[v][0] / len * step;
      pos[v][1] += disp[v][1] / len * step;
    }
  }
  double min_x = pos[0][0], max_x = pos[0][0], min_y = pos[0][1], max_y = pos[0][1];
  for (const auto &p : pos) {
    min_x = std::min(min_x, p[0]);
    max_x = std::max(max_x, p[0]);
    min_y = std::min(min_y, p[1]);
    max_y = std::max(max_y, p[1]);
  }
  const double span = std::max({max_x - min_x, max_y - min_y, 1e-9});
  for (auto &p : pos) {
    p[0] = (p[0] - min_x) / span + (1.0 - (max_x - min_x) / span) / 2.0;
    p[1] = (p[1] - min_y) / span + (1.0 - (max_y - min_y) / span) / 2.0;
  }
  return pos;
}

std::string diverging_color(double t) {
  t = std::clamp(t, -1.0, 1.0);
  static constexpr int kWarm[3] = {178, 24, 43};
  static constexpr int kCold[3] = {33, 102, 172};
  const int *target = t >= 0.0 ? kWarm : kCold;
  const double a = std::abs(t);
  char buf[8];
  int rgb[3];
  for (int c = 0; c < 3; ++c)
    rgb[c] = static_cast<int>(std::lround(255.0 + a * (target[c] - 255.0)));
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

namespace {

std::string escape_xml(const std::string &s) {
  std::string out;
  for (char c : s) {
    switch (c) {
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '&': out += "&amp;"; break;
    case '"': out += "&quot;"; break;
    default: out += c;
    }
  }
  return out;
}

std::string atom_label(const Atom &a) {
  std::string s(element_symbol(a.element));
  if (a.aromatic)
    s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  if (a.formal_charge > 0)
    s += "+";
  else if (a.formal_charge < 0)
    s += "-";
  return s;
}

} // namespace

std::string render_compound_svg(const MolecularGraph &graph, const std::string &title,
                                const std::vector<RenderPanel> &panels,
                                const RenderConfig &config) {
  for (const RenderPanel &p : panels)
    if (p.values.size() != graph.num_atoms())
      throw std::invalid_argument("panel '" + p.title + "' has " +
                                  std::to_string(p.values.size()) + " values for " +
                                  std::to_string(graph.num_atoms()) + " atoms");
  const auto layout = spring_layout(graph, config.seed, config.iterations);
  const double size = config.panel_size;
  const double margin = 24.0;
  const double header = 40.0;
  const double width = size * static_cast<double>(std::max<std::size_t>(panels.size(), 1));
  const double height = size + header;
  auto fx = [&](std::size_t panel, double x) {
    return format_fixed(size * static_cast<double>(panel) + margin + x * (size - 2 * margin), 2);
  };
  auto fy = [&](double y) { return format_fixed(header + margin + y * (size - 2 * margin), 2); };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    format_fixed(width, 0) + "\" height=\"" + format_fixed(height, 0) +
                    "\" viewBox=\"0 0 " + format_fixed(width, 0) + " " +
                    format_fixed(height, 0) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  svg += "<text x=\"8\" y=\"16\" font-family=\"sans-serif\" font-size=\"13\">" +
         escape_xml(title) + "</text>\n";
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const RenderPanel &panel = panels[p];
    double scale = 0.0;
    for (double v : panel.values)
      scale = std::max(scale, std::abs(v));
    svg += "<g class=\"panel\">\n";
    svg += "<text x=\"" + fx(p, 0.0) + "\" y=\"34\" font-family=\"sans-serif\" font-size=\"12\">" +
           escape_xml(panel.title) + "</text>\n";
    for (const Bond &b : graph.bonds) {
      const double width_px = b.order == BondOrder::Double   ? 3.0
                              : b.order == BondOrder::Triple ? 4.5
                                                             : 1.5;
      svg += "<line x1=\"" + fx(p, layout[b.begin][0]) + "\" y1=\"" + fy(layout[b.begin][1]) +
             "\" x2=\"" + fx(p, layout[b.end][0]) + "\" y2=\"" + fy(layout[b.end][1]) +
             "\" stroke=\"#555555\" stroke-width=\"" + format_fixed(width_px, 1) + "\"" +
             (b.order == BondOrder::Aromatic ? " stroke-dasharray=\"4 2\"" : "") + "/>\n";
    }
    for (std::size_t v = 0; v < graph.num_atoms(); ++v) {
      const double t = scale > 0.0 ? panel.values[v] / scale : 0.0;
      svg += "<circle cx=\"" + fx(p, layout[v][0]) + "\" cy=\"" + fy(layout[v][1]) +
             "\" r=\"9\" fill=\"" + diverging_color(t) +
             "\" stroke=\"#333333\" stroke-width=\"0.8\"/>\n";
      svg += "<text x=\"" + fx(p, layout[v][0]) + "\" y=\"" + fy(layout[v][1]) +
             "\" dy=\"4\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"9\">" +
             escape_xml(atom_label(graph.atoms[v])) + "</text>\n";
    }
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

} // namespace cliffkit
