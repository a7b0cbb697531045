//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cliffkit/evaluation.h"

namespace cliffkit {

WilcoxonResult wilcoxon_signed_rank(std::span<const double> x,
                                    std::span<const double> y) {
  if (x.size() != y.size())
    throw std::invalid_argument("wilcoxon: series lengths differ");
  std::vector<double> d;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] - y[i] != 0.0)
      d.push_back(x[i] - y[i]);
  if (d.empty())
    throw std::invalid_argument("wilcoxon: every difference is zero");
  const std::size_t n = d.size();

  // Doubled mid-ranks of |d| are integers, which keeps the exact
  // distribution on an integer grid.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(d[a]) < std::abs(d[b]);
  });
  std::vector<std::size_t> rank2(n);
  double tie_term = 0.0;
  for (std::size_t start = 0; start < n;) {
    std::size_t stop = start;
    while (stop + 1 < n && std::abs(d[order[stop + 1]]) == std::abs(d[order[start]]))
      ++stop;
    // Ranks start+1 .. stop+1; doubled midpoint = start + stop + 2.
    for (std::size_t k = start; k <= stop; ++k)
      rank2[order[k]] = start + stop + 2;
    const double t = static_cast<double>(stop - start + 1);
    tie_term += t * t * t - t;
    start = stop + 1;
  }

  std::size_t plus2 = 0, total2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total2 += rank2[i];
    if (d[i] > 0.0)
      plus2 += rank2[i];
  }
  const std::size_t w2 = std::min(plus2, total2 - plus2);

  WilcoxonResult r;
  r.statistic = static_cast<double>(w2) / 2.0;
  r.n_effective = n;
  r.exact = n <= kWilcoxonExactLimit;
  if (r.exact) {
    // counts[s] = number of sign assignments whose doubled positive rank sum
    // is s.
    std::vector<double> counts(total2 + 1, 0.0);
    counts[0] = 1.0;
    std::size_t reach = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t s = reach + 1; s-- > 0;)
        if (counts[s] != 0.0)
          counts[s + rank2[i]] += counts[s];
      reach += rank2[i];
    }
    double tail = 0.0;
    for (std::size_t s = 0; s <= w2; ++s)
      tail += counts[s];
    r.p_value = std::min(1.0, 2.0 * tail / std::ldexp(1.0, static_cast<int>(n)));
  } else {
    const double nn = static_cast<double>(n);
    const double mean = nn * (nn + 1.0) / 4.0;
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
    const double dev = std::max(0.0, std::abs(r.statistic - mean) - 0.5);
    const double z = dev / std::sqrt(var);
    r.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  }
  return r;
}

} // namespace cliffkit
