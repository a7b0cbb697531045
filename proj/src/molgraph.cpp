//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cliffkit/molgraph.h"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <utility>

namespace cliffkit {

std::string_view element_symbol(Element e) {
  static constexpr std::array<std::string_view, kNumElements> kSymbols = {
      "B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I", "Si"};
  return kSymbols[static_cast<std::size_t>(e)];
}

std::vector<std::vector<std::size_t>> MolecularGraph::adjacency() const {
  std::vector<std::vector<std::size_t>> adj(atoms.size());
  for (const Bond &b : bonds) {
    adj[b.begin].push_back(b.end);
    adj[b.end].push_back(b.begin);
  }
  return adj;
}

std::ptrdiff_t MolecularGraph::find_bond(std::size_t u, std::size_t v) const {
  for (std::size_t i = 0; i < bonds.size(); ++i) {
    const Bond &b = bonds[i];
    if ((b.begin == u && b.end == v) || (b.begin == v && b.end == u))
      return static_cast<std::ptrdiff_t>(i);
  }
  return -1;
}

std::vector<int> MolecularGraph::degrees() const {
  std::vector<int> deg(atoms.size(), 0);
  for (const Bond &b : bonds) {
    ++deg[b.begin];
    ++deg[b.end];
  }
  return deg;
}

namespace {

struct PendingBond {
  char symbol;
  std::size_t position;
};

struct RingOpening {
  std::size_t atom;
  std::optional<char> bond;
  std::size_t position;
};

class SmilesParser {
public:
  SmilesParser(std::string_view text, std::vector<std::string> *warnings)
      : text_(text), warnings_(warnings) {}

  MolecularGraph parse() {
    graph_.source_smiles = std::string(text_);
    if (text_.empty())
      throw SmilesError("empty SMILES", 0);

    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '(') {
        open_branch();
      } else if (c == ')') {
        close_branch();
      } else if (c == '-' || c == '=' || c == '#' || c == ':' || c == '/' ||
                 c == '\\') {
        read_bond_symbol();
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
        ring_closure();
      } else if (c == '[') {
        add_atom(read_bracket_atom());
      } else if (c == '.') {
        throw SmilesError("disconnected molecules ('.') are not supported",
                          pos_);
      } else if (std::isalpha(static_cast<unsigned char>(c))) {
        add_atom(read_organic_atom());
      } else if (c == '$') {
        throw SmilesError("quadruple bonds are not supported", pos_);
      } else {
        throw SmilesError(std::string("unexpected character '") + c + "'",
                          pos_);
      }
    }

    if (pending_)
      throw SmilesError("dangling bond symbol", pending_->position);
    if (!branches_.empty())
      throw SmilesError("unclosed branch", branches_.back().second);
    if (!rings_.empty()) {
      const auto &[label, open] = *rings_.begin();
      throw SmilesError("unclosed ring closure " + std::to_string(label),
                        open.position);
    }

    assign_ring_flags(graph_);
    return std::move(graph_);
  }

private:
  void warn(const std::string &msg) {
    if (warnings_ != nullptr)
      warnings_->push_back(msg + " (at position " + std::to_string(pos_) + ")");
  }

  void open_branch() {
    if (!previous_)
      throw SmilesError("branch without a preceding atom", pos_);
    if (pending_)
      throw SmilesError("bond symbol before '('", pending_->position);
    branches_.emplace_back(*previous_, pos_);
    atoms_at_branch_open_.push_back(graph_.atoms.size());
    ++pos_;
  }

  void close_branch() {
    if (branches_.empty())
      throw SmilesError("unmatched ')'", pos_);
    if (pending_)
      throw SmilesError("dangling bond symbol", pending_->position);
    if (atoms_at_branch_open_.back() == graph_.atoms.size())
      throw SmilesError("empty branch", pos_);
    previous_ = branches_.back().first;
    branches_.pop_back();
    atoms_at_branch_open_.pop_back();
    ++pos_;
  }

  void read_bond_symbol() {
    if (!previous_)
      throw SmilesError("bond without a preceding atom", pos_);
    if (pending_)
      throw SmilesError("consecutive bond symbols", pos_);
    char c = text_[pos_];
    if (c == '/' || c == '\\') {
      warn("directional bond ignored");
      c = '-';
    }
    pending_ = PendingBond{c, pos_};
    ++pos_;
  }

  void ring_closure() {
    const std::size_t start = pos_;
    if (!previous_)
      throw SmilesError("ring closure without a preceding atom", pos_);
    int label = 0;
    if (text_[pos_] == '%') {
      if (pos_ + 2 >= text_.size() ||
          !std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])) ||
          !std::isdigit(static_cast<unsigned char>(text_[pos_ + 2])))
        throw SmilesError("'%' must be followed by two digits", pos_);
      label = (text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0');
      pos_ += 3;
    } else {
      label = text_[pos_] - '0';
      ++pos_;
    }

    std::optional<char> symbol;
    if (pending_)
      symbol = pending_->symbol;
    pending_.reset();

    auto it = rings_.find(label);
    if (it == rings_.end()) {
      rings_.emplace(label, RingOpening{*previous_, symbol, start});
      return;
    }

    const RingOpening open = it->second;
    rings_.erase(it);
    if (open.atom == *previous_)
      throw SmilesError("ring closure bonds an atom to itself", start);
    if (open.bond && symbol && *open.bond != *symbol)
      throw SmilesError("conflicting ring-closure bond symbols", start);
    const std::optional<char> chosen = symbol ? symbol : open.bond;
    connect(open.atom, *previous_, chosen, start);
  }

  BondOrder resolve_order(std::size_t a, std::size_t b,
                          std::optional<char> symbol, std::size_t where) {
    const bool both_aromatic =
        graph_.atoms[a].aromatic && graph_.atoms[b].aromatic;
    if (!symbol)
      return both_aromatic ? BondOrder::Aromatic : BondOrder::Single;
    switch (*symbol) {
    case '-':
      return BondOrder::Single;
    case '=':
      return BondOrder::Double;
    case '#':
      return BondOrder::Triple;
    case ':':
      if (!both_aromatic)
        throw SmilesError("aromatic bond between non-aromatic atoms", where);
      return BondOrder::Aromatic;
    default:
      throw SmilesError("unsupported bond symbol", where);
    }
  }

  void connect(std::size_t a, std::size_t b, std::optional<char> symbol,
               std::size_t where) {
    if (graph_.find_bond(a, b) >= 0)
      throw SmilesError("duplicate bond between the same atoms", where);
    graph_.bonds.push_back(Bond{a, b, resolve_order(a, b, symbol, where), false});
  }

  void add_atom(const Atom &atom) {
    const std::size_t index = graph_.atoms.size();
    graph_.atoms.push_back(atom);
    if (previous_) {
      std::optional<char> symbol;
      std::size_t where = pos_;
      if (pending_) {
        symbol = pending_->symbol;
        where = pending_->position;
      }
      connect(*previous_, index, symbol, where);
    } else if (pending_) {
      throw SmilesError("bond symbol before the first atom",
                        pending_->position);
    }
    pending_.reset();
    previous_ = index;
  }

  Atom read_organic_atom() {
    const std::size_t start = pos_;
    const std::string_view rest = text_.substr(pos_);
    Atom atom;
    if (rest.starts_with("Cl")) {
      atom.element = Element::Cl;
      pos_ += 2;
      return atom;
    }
    if (rest.starts_with("Br")) {
      atom.element = Element::Br;
      pos_ += 2;
      return atom;
    }
    const char c = text_[pos_];
    ++pos_;
    switch (c) {
    case 'B': atom.element = Element::B; return atom;
    case 'C': atom.element = Element::C; return atom;
    case 'N': atom.element = Element::N; return atom;
    case 'O': atom.element = Element::O; return atom;
    case 'P': atom.element = Element::P; return atom;
    case 'S': atom.element = Element::S; return atom;
    case 'F': atom.element = Element::F; return atom;
    case 'I': atom.element = Element::I; return atom;
    default: break;
    }
    atom.aromatic = true;
    switch (c) {
    case 'b': atom.element = Element::B; return atom;
    case 'c': atom.element = Element::C; return atom;
    case 'n': atom.element = Element::N; return atom;
    case 'o': atom.element = Element::O; return atom;
    case 'p': atom.element = Element::P; return atom;
    case 's': atom.element = Element::S; return atom;
    default: break;
    }
    throw SmilesError(std::string("unsupported element '") + c + "'", start);
  }

  Atom read_bracket_atom() {
    const std::size_t open = pos_;
    ++pos_; // '['
    auto peek = [&]() -> char {
      return pos_ < text_.size() ? text_[pos_] : '\0';
    };

    if (std::isdigit(static_cast<unsigned char>(peek())))
      throw SmilesError("isotope labels are not supported", pos_);

    Atom atom;
    const std::size_t symbol_pos = pos_;
    std::string symbol;
    if (std::isupper(static_cast<unsigned char>(peek()))) {
      symbol.push_back(peek());
      ++pos_;
      if (std::islower(static_cast<unsigned char>(peek()))) {
        symbol.push_back(peek());
        ++pos_;
      }
    } else if (std::islower(static_cast<unsigned char>(peek()))) {
      symbol.push_back(peek());
      ++pos_;
      atom.aromatic = true;
    } else {
      throw SmilesError("expected element symbol in bracket atom", pos_);
    }

    static const std::map<std::string, Element, std::less<>> kAliphatic = {
        {"B", Element::B},   {"C", Element::C},   {"N", Element::N},
        {"O", Element::O},   {"P", Element::P},   {"S", Element::S},
        {"F", Element::F},   {"Cl", Element::Cl}, {"Br", Element::Br},
        {"I", Element::I},   {"Si", Element::Si}};
    static const std::map<std::string, Element, std::less<>> kAromatic = {
        {"b", Element::B}, {"c", Element::C}, {"n", Element::N},
        {"o", Element::O}, {"p", Element::P}, {"s", Element::S}};
    const auto &table = atom.aromatic ? kAromatic : kAliphatic;
    auto it = table.find(symbol);
    if (it == table.end())
      throw SmilesError("unsupported element '" + symbol + "'", symbol_pos);
    atom.element = it->second;

    if (peek() == '@') {
      while (peek() == '@')
        ++pos_;
      warn("chirality mark ignored");
    }

    if (peek() == 'H') {
      ++pos_;
      atom.explicit_h = 1;
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        atom.explicit_h = peek() - '0';
        ++pos_;
      }
    }

    if (peek() == '+' || peek() == '-') {
      const char sign = peek();
      const int unit = sign == '+' ? 1 : -1;
      ++pos_;
      int magnitude = 1;
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        magnitude = peek() - '0';
        ++pos_;
      } else {
        while (peek() == sign) {
          ++magnitude;
          ++pos_;
        }
      }
      atom.formal_charge = unit * magnitude;
    }

    if (peek() == ':')
      throw SmilesError("atom classes are not supported", pos_);
    if (peek() != ']') {
      if (peek() == '\0')
        throw SmilesError("unterminated bracket atom", open);
      throw SmilesError(std::string("unexpected character '") + peek() +
                            "' in bracket atom",
                        pos_);
    }
    ++pos_;
    return atom;
  }

  std::string_view text_;
  std::vector<std::string> *warnings_;
  std::size_t pos_ = 0;
  MolecularGraph graph_;
  std::optional<std::size_t> previous_;
  std::optional<PendingBond> pending_;
  std::vector<std::pair<std::size_t, std::size_t>> branches_;
  std::vector<std::size_t> atoms_at_branch_open_;
  std::map<int, RingOpening> rings_;
};

} // namespace

MolecularGraph parse_smiles(std::string_view text,
                            std::vector<std::string> *warnings) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
    text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
    text.remove_suffix(1);
  return SmilesParser(text, warnings).parse();
}

void assign_ring_flags(MolecularGraph &graph) {
  // A bond lies on a cycle iff it is not a bridge.
  const std::size_t n = graph.atoms.size();
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> incident(n);
  for (std::size_t b = 0; b < graph.bonds.size(); ++b) {
    incident[graph.bonds[b].begin].emplace_back(graph.bonds[b].end, b);
    incident[graph.bonds[b].end].emplace_back(graph.bonds[b].begin, b);
  }

  std::vector<int> order(n, -1), low(n, 0);
  int counter = 0;
  std::function<void(std::size_t, std::ptrdiff_t)> visit =
      [&](std::size_t v, std::ptrdiff_t via) {
        order[v] = low[v] = counter++;
        for (auto [w, b] : incident[v]) {
          if (static_cast<std::ptrdiff_t>(b) == via)
            continue;
          if (order[w] < 0) {
            visit(w, static_cast<std::ptrdiff_t>(b));
            low[v] = std::min(low[v], low[w]);
            graph.bonds[b].in_ring = low[w] <= order[v];
          } else {
            low[v] = std::min(low[v], order[w]);
            graph.bonds[b].in_ring = true;
          }
        }
      };
  for (std::size_t v = 0; v < n; ++v)
    if (order[v] < 0)
      visit(v, -1);
}

void validate_graph(const MolecularGraph &graph) {
  const std::size_t n = graph.atoms.size();
  if (n == 0)
    throw std::invalid_argument("molecular graph has no atoms");
  for (const Atom &a : graph.atoms)
    if (a.explicit_h < 0 || a.explicit_h > 9)
      throw std::invalid_argument("explicit hydrogen count out of range");
  for (std::size_t i = 0; i < graph.bonds.size(); ++i) {
    const Bond &b = graph.bonds[i];
    if (b.begin >= n || b.end >= n || b.begin == b.end)
      throw std::invalid_argument("bond " + std::to_string(i) +
                                  " has invalid endpoints");
    if (graph.find_bond(b.begin, b.end) != static_cast<std::ptrdiff_t>(i))
      throw std::invalid_argument("duplicate bond " + std::to_string(i));
    if (b.order == BondOrder::Aromatic &&
        !(graph.atoms[b.begin].aromatic && graph.atoms[b.end].aromatic))
      throw std::invalid_argument("aromatic bond between non-aromatic atoms");
  }
  std::vector<bool> seen(n, false);
  const auto adj = graph.adjacency();
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t w : adj[v])
      if (!seen[w]) {
        seen[w] = true;
        ++reached;
        stack.push_back(w);
      }
  }
  if (reached != n)
    throw std::invalid_argument("molecular graph is disconnected");
}

FeatureMatrix atom_features(const MolecularGraph &graph) {
  using namespace atom_slots;
  FeatureMatrix m;
  m.rows = graph.atoms.size();
  m.cols = kAtomFeatureWidth;
  m.values.assign(m.rows * m.cols, 0.0);
  const std::vector<int> degree = graph.degrees();
  for (std::size_t v = 0; v < m.rows; ++v) {
    const Atom &a = graph.atoms[v];
    double *row = m.values.data() + v * m.cols;
    row[kElement + static_cast<std::size_t>(a.element)] = 1.0;
    row[kDegree + static_cast<std::size_t>(std::clamp(degree[v], 0, 5))] = 1.0;
    row[kCharge + static_cast<std::size_t>(std::clamp(a.formal_charge, -1, 1) + 1)] =
        1.0;
    row[kAromatic] = a.aromatic ? 1.0 : 0.0;
    row[kHydrogens + static_cast<std::size_t>(std::clamp(a.explicit_h, 0, 4))] =
        1.0;
  }
  return m;
}

DirectedEdges bond_features(const MolecularGraph &graph) {
  DirectedEdges edges;
  const std::size_t e = 2 * graph.bonds.size();
  edges.source.reserve(e);
  edges.target.reserve(e);
  edges.features.rows = e;
  edges.features.cols = kBondFeatureWidth;
  edges.features.values.assign(e * kBondFeatureWidth, 0.0);
  for (std::size_t b = 0; b < graph.bonds.size(); ++b) {
    const Bond &bond = graph.bonds[b];
    edges.source.push_back(bond.begin);
    edges.target.push_back(bond.end);
    edges.source.push_back(bond.end);
    edges.target.push_back(bond.begin);
    for (std::size_t d = 0; d < 2; ++d) {
      double *row = edges.features.values.data() + (2 * b + d) * kBondFeatureWidth;
      row[bond_slots::kOrder + static_cast<std::size_t>(bond.order)] = 1.0;
      row[bond_slots::kInRing] = bond.in_ring ? 1.0 : 0.0;
    }
  }
  return edges;
}

} // namespace cliffkit
