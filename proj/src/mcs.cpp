//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cliffkit/mcs.h"

#include <algorithm>
#include <array>
#include <map>
#include <tuple>

namespace cliffkit {
namespace {

using Mapping = std::vector<std::pair<std::size_t, std::size_t>>;

// Dense label view of one graph. Edge label 0 means "not bonded".
struct LabeledGraph {
  std::size_t n = 0;
  std::vector<int> atom_label;
  std::vector<int> edge_label;
  std::vector<std::vector<std::size_t>> adj;

  explicit LabeledGraph(const MolecularGraph &g)
      : n(g.num_atoms()), atom_label(n), edge_label(n * n, 0),
        adj(g.adjacency()) {
    for (std::size_t v = 0; v < n; ++v)
      atom_label[v] = static_cast<int>(g.atoms[v].element) * 2 +
                      (g.atoms[v].aromatic ? 1 : 0);
    for (const Bond &b : g.bonds) {
      const int label = 1 + static_cast<int>(b.order);
      edge_label[b.begin * n + b.end] = label;
      edge_label[b.end * n + b.begin] = label;
    }
  }

  int edge(std::size_t u, std::size_t v) const { return edge_label[u * n + v]; }
};

struct BudgetExhausted {};

class StepCounter {
public:
  explicit StepCounter(std::uint64_t budget) : budget_(budget) {}
  void tick() {
    if (++steps_ > budget_)
      throw BudgetExhausted{};
  }

private:
  std::uint64_t budget_;
  std::uint64_t steps_ = 0;
};

// Phase one: size of the optimum via label-class partition refinement
// (McSplit-style) restricted to connected growth.
class ConnectedSearch {
public:
  ConnectedSearch(const LabeledGraph &a, const LabeledGraph &b,
                  StepCounter &counter)
      : a_(a), b_(b), counter_(counter) {}

  // Returns the best mapping found; throws BudgetExhausted after storing the
  // best-so-far in best().
  void run() {
    std::map<int, Domain> by_label;
    for (std::size_t v = 0; v < a_.n; ++v)
      by_label[a_.atom_label[v]].left.push_back(v);
    for (std::size_t w = 0; w < b_.n; ++w)
      by_label[b_.atom_label[w]].right.push_back(w);
    std::vector<Domain> domains;
    for (auto &[label, d] : by_label)
      if (!d.left.empty() && !d.right.empty())
        domains.push_back(std::move(d));
    search(domains);
  }

  const Mapping &best() const { return best_; }

private:
  struct Domain {
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    bool adjacent = false;
  };

  std::size_t bound(const std::vector<Domain> &domains) const {
    std::size_t total = current_.size();
    for (const Domain &d : domains)
      total += std::min(d.left.size(), d.right.size());
    return total;
  }

  std::vector<Domain> refine(const std::vector<Domain> &domains, std::size_t v,
                             std::size_t w) const {
    std::vector<Domain> out;
    for (const Domain &d : domains) {
      std::array<Domain, 5> split;
      for (std::size_t u : d.left)
        if (u != v)
          split[static_cast<std::size_t>(a_.edge(v, u))].left.push_back(u);
      for (std::size_t u : d.right)
        if (u != w)
          split[static_cast<std::size_t>(b_.edge(w, u))].right.push_back(u);
      for (std::size_t label = 0; label < split.size(); ++label) {
        Domain &s = split[label];
        if (s.left.empty() || s.right.empty())
          continue;
        s.adjacent = d.adjacent || label != 0;
        out.push_back(std::move(s));
      }
    }
    return out;
  }

  void search(std::vector<Domain> &domains) {
    counter_.tick();
    if (current_.size() > best_.size())
      best_ = current_;
    if (bound(domains) <= best_.size())
      return;

    std::ptrdiff_t chosen = -1;
    std::size_t chosen_size = 0;
    for (std::size_t i = 0; i < domains.size(); ++i) {
      const Domain &d = domains[i];
      if (!current_.empty() && !d.adjacent)
        continue;
      const std::size_t size = std::max(d.left.size(), d.right.size());
      if (chosen < 0 || size < chosen_size) {
        chosen = static_cast<std::ptrdiff_t>(i);
        chosen_size = size;
      }
    }
    if (chosen < 0)
      return;

    Domain &d = domains[static_cast<std::size_t>(chosen)];
    std::size_t v = d.left.front();
    for (std::size_t u : d.left)
      if (a_.adj[u].size() > a_.adj[v].size())
        v = u;

    const std::vector<std::size_t> candidates = d.right;
    for (std::size_t w : candidates) {
      std::vector<Domain> next = refine(domains, v, w);
      current_.emplace_back(v, w);
      search(next);
      current_.pop_back();
    }

    // Branch where v stays unmatched.
    std::vector<Domain> rest = domains;
    Domain &rd = rest[static_cast<std::size_t>(chosen)];
    rd.left.erase(std::find(rd.left.begin(), rd.left.end(), v));
    if (rd.left.empty())
      rest.erase(rest.begin() + chosen);
    search(rest);
  }

  const LabeledGraph &a_;
  const LabeledGraph &b_;
  StepCounter &counter_;
  Mapping current_;
  Mapping best_;
};

bool mapping_connected(const LabeledGraph &a, const Mapping &mapping) {
  if (mapping.empty())
    return true;
  std::vector<char> in_set(a.n, 0), seen(a.n, 0);
  for (auto [u, w] : mapping)
    in_set[u] = 1;
  std::vector<std::size_t> stack{mapping.front().first};
  seen[mapping.front().first] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t u : a.adj[v])
      if (in_set[u] && !seen[u]) {
        seen[u] = 1;
        ++reached;
        stack.push_back(u);
      }
  }
  return reached == mapping.size();
}

// Phase two: walk g1 atoms in index order, trying images in ascending g2
// order before leaving the atom unmatched. The first connected mapping of
// the known optimum size is therefore the lexicographically smallest.
class LexSearch {
public:
  LexSearch(const LabeledGraph &a, const LabeledGraph &b, std::size_t target,
            StepCounter &counter)
      : a_(a), b_(b), target_(target), counter_(counter), used_(b.n, 0) {}

  bool run() { return visit(0); }
  const Mapping &result() const { return current_; }

private:
  std::vector<int> signature_left(std::size_t u) const {
    std::vector<int> sig;
    sig.reserve(current_.size() + 1);
    sig.push_back(a_.atom_label[u]);
    for (auto [x, y] : current_)
      sig.push_back(a_.edge(u, x));
    return sig;
  }

  std::vector<int> signature_right(std::size_t w) const {
    std::vector<int> sig;
    sig.reserve(current_.size() + 1);
    sig.push_back(b_.atom_label[w]);
    for (auto [x, y] : current_)
      sig.push_back(b_.edge(w, y));
    return sig;
  }

  // Upper bound on the final size of any completion from atom `next`.
  std::size_t bound(std::size_t next) const {
    std::map<std::vector<int>, std::size_t> right_count;
    for (std::size_t w = 0; w < b_.n; ++w)
      if (!used_[w])
        ++right_count[signature_right(w)];

    std::vector<char> alive(a_.n, 0);
    std::vector<std::vector<int>> sig(a_.n);
    for (std::size_t u = next; u < a_.n; ++u) {
      sig[u] = signature_left(u);
      if (right_count.count(sig[u]))
        alive[u] = 1;
    }

    std::vector<char> reachable(a_.n, 0);
    if (current_.empty()) {
      for (std::size_t u = next; u < a_.n; ++u)
        reachable[u] = alive[u];
    } else {
      std::vector<char> member(a_.n, 0);
      for (std::size_t u = 0; u < a_.n; ++u)
        member[u] = alive[u];
      for (auto [x, y] : current_)
        member[x] = 1;
      std::vector<std::size_t> stack{current_.front().first};
      reachable[current_.front().first] = 1;
      while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        for (std::size_t u : a_.adj[v])
          if (member[u] && !reachable[u]) {
            reachable[u] = 1;
            stack.push_back(u);
          }
      }
      for (auto [x, y] : current_)
        if (!reachable[x])
          return 0;
    }

    std::map<std::vector<int>, std::size_t> left_count;
    for (std::size_t u = next; u < a_.n; ++u)
      if (alive[u] && reachable[u])
        ++left_count[sig[u]];
    std::size_t total = current_.size();
    for (const auto &[s, count] : left_count)
      total += std::min(count, right_count.at(s));
    return total;
  }

  bool consistent(std::size_t v, std::size_t w) const {
    if (a_.atom_label[v] != b_.atom_label[w])
      return false;
    for (auto [x, y] : current_)
      if (a_.edge(v, x) != b_.edge(w, y))
        return false;
    return true;
  }

  bool visit(std::size_t v) {
    counter_.tick();
    if (current_.size() >= target_)
      return current_.size() == target_ && mapping_connected(a_, current_);
    if (v == a_.n || bound(v) < target_)
      return false;

    for (std::size_t w = 0; w < b_.n; ++w) {
      if (used_[w] || !consistent(v, w))
        continue;
      used_[w] = 1;
      current_.emplace_back(v, w);
      if (visit(v + 1))
        return true;
      current_.pop_back();
      used_[w] = 0;
    }
    return visit(v + 1);
  }

  const LabeledGraph &a_;
  const LabeledGraph &b_;
  std::size_t target_;
  StepCounter &counter_;
  std::vector<char> used_;
  Mapping current_;
};

bool canonically_greater(const MolecularGraph &g1, const MolecularGraph &g2) {
  auto atom_key = [](const Atom &a) {
    return std::make_tuple(static_cast<int>(a.element), a.aromatic,
                           a.formal_charge, a.explicit_h);
  };
  auto bond_key = [](const Bond &b) {
    return std::make_tuple(b.begin, b.end, static_cast<int>(b.order),
                           b.in_ring);
  };
  if (g1.num_atoms() != g2.num_atoms())
    return g1.num_atoms() > g2.num_atoms();
  if (g1.num_bonds() != g2.num_bonds())
    return g1.num_bonds() > g2.num_bonds();
  for (std::size_t i = 0; i < g1.num_atoms(); ++i) {
    const auto k1 = atom_key(g1.atoms[i]);
    const auto k2 = atom_key(g2.atoms[i]);
    if (k1 != k2)
      return k1 > k2;
  }
  for (std::size_t i = 0; i < g1.num_bonds(); ++i) {
    const auto k1 = bond_key(g1.bonds[i]);
    const auto k2 = bond_key(g2.bonds[i]);
    if (k1 != k2)
      return k1 > k2;
  }
  return false;
}

McsResult solve_oriented(const MolecularGraph &g1, const MolecularGraph &g2,
                         std::uint64_t budget) {
  const LabeledGraph a(g1);
  const LabeledGraph b(g2);
  StepCounter counter(budget);
  McsResult result;

  ConnectedSearch first(a, b, counter);
  try {
    first.run();
  } catch (const BudgetExhausted &) {
    result.truncated = true;
  }
  result.mapping = first.best();

  if (!result.truncated && !result.mapping.empty()) {
    LexSearch lex(a, b, result.mapping.size(), counter);
    try {
      if (lex.run())
        result.mapping = lex.result();
    } catch (const BudgetExhausted &) {
      result.truncated = true;
    }
  }

  std::sort(result.mapping.begin(), result.mapping.end());
  return result;
}

} // namespace

McsResult max_common_substructure(const MolecularGraph &g1,
                                  const MolecularGraph &g2,
                                  std::uint64_t step_budget) {
  McsResult result;
  if (canonically_greater(g1, g2)) {
    result = solve_oriented(g2, g1, step_budget);
    for (auto &p : result.mapping)
      std::swap(p.first, p.second);
    std::sort(result.mapping.begin(), result.mapping.end());
  } else {
    result = solve_oriented(g1, g2, step_budget);
  }
  result.size = result.mapping.size();
  result.fraction_1 = g1.num_atoms() == 0
                          ? 0.0
                          : static_cast<double>(result.size) /
                                static_cast<double>(g1.num_atoms());
  result.fraction_2 = g2.num_atoms() == 0
                          ? 0.0
                          : static_cast<double>(result.size) /
                                static_cast<double>(g2.num_atoms());
  return result;
}

bool is_valid_common_substructure(const MolecularGraph &g1,
                                  const MolecularGraph &g2,
                                  const Mapping &mapping) {
  const LabeledGraph a(g1);
  const LabeledGraph b(g2);
  std::vector<char> used_a(a.n, 0), used_b(b.n, 0);
  for (auto [u, w] : mapping) {
    if (u >= a.n || w >= b.n || used_a[u] || used_b[w])
      return false;
    used_a[u] = used_b[w] = 1;
    if (a.atom_label[u] != b.atom_label[w])
      return false;
  }
  for (auto [u1, w1] : mapping)
    for (auto [u2, w2] : mapping)
      if (a.edge(u1, u2) != b.edge(w1, w2))
        return false;
  return mapping_connected(a, mapping);
}

} // namespace cliffkit
