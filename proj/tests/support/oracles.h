//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

// Test-only reference implementations. Each one is written from the
// definition, shares no code with the library and favours obviousness over
// speed.

#ifndef CLIFFKIT_TESTS_ORACLES_H_
#define CLIFFKIT_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "cliffkit/molgraph.h"

namespace cliffkit::oracle {

// Random connected graph: a random tree plus a few chords. Elements C/N/O,
// bond orders single/double, no aromaticity.
inline MolecularGraph random_molecule(std::mt19937_64 &rng, std::size_t max_atoms) {
  std::uniform_int_distribution<std::size_t> size_dist(1, max_atoms);
  const std::size_t n = size_dist(rng);
  MolecularGraph g;
  std::discrete_distribution<int> element({6, 2, 2});
  const Element elements[3] = {Element::C, Element::N, Element::O};
  for (std::size_t v = 0; v < n; ++v)
    g.atoms.push_back({elements[element(rng)], 0, false, 0});
  std::bernoulli_distribution is_double(0.2);
  auto add_bond = [&](std::size_t u, std::size_t v) {
    g.bonds.push_back({u, v, is_double(rng) ? BondOrder::Double : BondOrder::Single, false});
  };
  for (std::size_t v = 1; v < n; ++v)
    add_bond(std::uniform_int_distribution<std::size_t>(0, v - 1)(rng), v);
  std::bernoulli_distribution chord(0.15);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 2; v < n; ++v)
      if (g.find_bond(u, v) < 0 && chord(rng))
        add_bond(u, v);
  assign_ring_flags(g);
  return g;
}

inline bool atoms_match(const Atom &a, const Atom &b) {
  return a.element == b.element && a.aromatic == b.aromatic;
}

// Bond order between u and v, or -1 when absent.
inline int bond_code(const MolecularGraph &g, std::size_t u, std::size_t v) {
  for (const Bond &b : g.bonds)
    if ((b.begin == u && b.end == v) || (b.begin == v && b.end == u))
      return static_cast<int>(b.order);
  return -1;
}

inline bool connected_subset(const MolecularGraph &g, const std::vector<std::size_t> &subset) {
  if (subset.empty())
    return true;
  std::vector<bool> in(g.num_atoms(), false), seen(g.num_atoms(), false);
  for (std::size_t v : subset)
    in[v] = true;
  std::vector<std::size_t> stack{subset.front()};
  seen[subset.front()] = true;
  std::size_t reached = 0;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    ++reached;
    for (std::size_t w = 0; w < g.num_atoms(); ++w)
      if (in[w] && !seen[w] && bond_code(g, v, w) >= 0) {
        seen[w] = true;
        stack.push_back(w);
      }
  }
  return reached == subset.size();
}

/// Size of the maximum connected common induced substructure by exhaustive
/// enumeration: every atom of g1 is either left out or sent to any free,
/// label-compatible atom of g2 whose bond pattern to the earlier images
/// agrees; connectivity is checked on complete assignments only.
inline std::size_t brute_force_mcs_size(const MolecularGraph &g1, const MolecularGraph &g2) {
  const std::size_t n1 = g1.num_atoms(), n2 = g2.num_atoms();
  std::vector<std::vector<int>> b1(n1, std::vector<int>(n1)), b2(n2, std::vector<int>(n2));
  for (std::size_t u = 0; u < n1; ++u)
    for (std::size_t v = 0; v < n1; ++v)
      b1[u][v] = bond_code(g1, u, v);
  for (std::size_t u = 0; u < n2; ++u)
    for (std::size_t v = 0; v < n2; ++v)
      b2[u][v] = bond_code(g2, u, v);
  std::vector<int> image(n1, -1);
  std::vector<bool> used(n2, false);
  std::size_t best = 0;
  std::function<void(std::size_t)> rec = [&](std::size_t u) {
    if (u == n1) {
      std::vector<std::size_t> subset;
      for (std::size_t v = 0; v < n1; ++v)
        if (image[v] >= 0)
          subset.push_back(v);
      if (subset.size() > best && connected_subset(g1, subset))
        best = subset.size();
      return;
    }
    rec(u + 1);
    for (std::size_t w = 0; w < n2; ++w) {
      if (used[w] || !atoms_match(g1.atoms[u], g2.atoms[w]))
        continue;
      bool ok = true;
      for (std::size_t v = 0; v < u && ok; ++v)
        if (image[v] >= 0 && b1[u][v] != b2[w][static_cast<std::size_t>(image[v])])
          ok = false;
      if (!ok)
        continue;
      image[u] = static_cast<int>(w);
      used[w] = true;
      rec(u + 1);
      used[w] = false;
      image[u] = -1;
    }
  };
  rec(0);
  return best;
}

/// Minimizes 0.5 * ||b - z||^2 + g(b) for a convex g by cyclic coordinate
/// descent, each coordinate solved by golden-section search on a bracket
/// that always contains the minimizer (between 0 and z_i, widened).
inline std::vector<double> numeric_prox(std::span<const double> z,
                                        const std::function<double(const std::vector<double> &)> &g,
                                        int sweeps = 400) {
  std::vector<double> b(z.begin(), z.end());
  auto objective = [&](const std::vector<double> &x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      s += 0.5 * (x[i] - z[i]) * (x[i] - z[i]);
    return s + g(x);
  };
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    double moved = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      double lo = std::min(0.0, z[i]) - 1e-3, hi = std::max(0.0, z[i]) + 1e-3;
      std::vector<double> x = b;
      auto at = [&](double v) {
        x[i] = v;
        return objective(x);
      };
      double c = hi - phi * (hi - lo), d = lo + phi * (hi - lo);
      double fc = at(c), fd = at(d);
      for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        if (fc < fd) {
          hi = d;
          d = c;
          fd = fc;
          c = hi - phi * (hi - lo);
          fc = at(c);
        } else {
          lo = c;
          c = d;
          fc = fd;
          d = lo + phi * (hi - lo);
          fd = at(d);
        }
      }
      double v = 0.5 * (lo + hi);
      // Exact zero is a kink; prefer it when it is at least as good.
      if (at(0.0) <= at(v))
        v = 0.0;
      moved = std::max(moved, std::abs(v - b[i]));
      b[i] = v;
    }
    if (moved < 1e-12)
      break;
  }
  return b;
}

/// Two-sided signed-rank p-value by enumerating all 2^n sign assignments of
/// the absolute differences (zeros dropped, mid-ranks for ties).
inline double brute_force_wilcoxon_p(std::span<const double> x, std::span<const double> y) {
  std::vector<double> mags;
  std::vector<bool> positive;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    if (d != 0.0) {
      mags.push_back(std::abs(d));
      positive.push_back(d > 0.0);
    }
  }
  const std::size_t n = mags.size();
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n; ++i) {
    double less = 0.0, equal = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (mags[j] < mags[i])
        less += 1.0;
      else if (mags[j] == mags[i])
        equal += 1.0;
    }
    ranks[i] = less + (equal + 1.0) / 2.0;
  }
  double total = 0.0, w_plus = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += ranks[i];
    if (positive[i])
      w_plus += ranks[i];
  }
  const double observed = std::min(w_plus, total - w_plus);
  std::uint64_t extreme = 0;
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::uint64_t{1} << i))
        w += ranks[i];
    if (std::min(w, total - w) <= observed + 1e-9)
      ++extreme;
  }
  return std::min(1.0, static_cast<double>(extreme) / static_cast<double>(count));
}

// Central difference of f at x along coordinate i.
inline double central_difference(const std::function<double(const std::vector<double> &)> &f,
                                 std::vector<double> x, std::size_t i, double h = 1e-5) {
  const double x0 = x[i];
  x[i] = x0 + h;
  const double up = f(x);
  x[i] = x0 - h;
  const double down = f(x);
  return (up - down) / (2.0 * h);
}

/// Gradient-check error: |a - n| / max(|a|, |n|, floor). The floor keeps
/// near-zero components, where finite differences carry only rounding
/// noise, from dominating.
inline double relative_error(double analytic, double numeric, double floor = 1e-2) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), floor});
}

} // namespace cliffkit::oracle

#endif // CLIFFKIT_TESTS_ORACLES_H_
