//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CLIFFKIT_MOLGRAPH_H_
#define CLIFFKIT_MOLGRAPH_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cliffkit {

enum class Element : std::uint8_t { B, C, N, O, P, S, F, Cl, Br, I, Si };

inline constexpr std::size_t kNumElements = 11;

std::string_view element_symbol(Element e);

enum class BondOrder : std::uint8_t { Single, Double, Triple, Aromatic };

struct Atom {
  Element element = Element::C;
  int formal_charge = 0;
  bool aromatic = false;
  int explicit_h = 0;

  bool operator==(const Atom &) const = default;
};

struct Bond {
  std::size_t begin = 0;
  std::size_t end = 0;
  BondOrder order = BondOrder::Single;
  bool in_ring = false;

  bool operator==(const Bond &) const = default;
};

/// A connected heavy-atom graph. Atom order follows the left-to-right order of
/// atom tokens in the source SMILES.
struct MolecularGraph {
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;
  std::string source_smiles;

  std::size_t num_atoms() const { return atoms.size(); }
  std::size_t num_bonds() const { return bonds.size(); }

  // Neighbor lists, one entry per incident bond, in bond order.
  std::vector<std::vector<std::size_t>> adjacency() const;

  // Bond index between u and v, or -1.
  std::ptrdiff_t find_bond(std::size_t u, std::size_t v) const;

  std::vector<int> degrees() const;

  bool structurally_equal(const MolecularGraph &other) const {
    return atoms == other.atoms && bonds == other.bonds;
  }
};

class SmilesError : public std::runtime_error {
public:
  SmilesError(const std::string &msg, std::size_t position)
      : std::runtime_error(msg + " (at position " + std::to_string(position) +
                           ")"),
        position_(position) {}

  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

/// Parses the supported SMILES subset (see docs/smiles_grammar.md). Stereo
/// marks are accepted and dropped; a note is appended to `warnings` when
/// provided.
MolecularGraph parse_smiles(std::string_view text,
                            std::vector<std::string> *warnings = nullptr);

// Marks every bond that lies on a cycle. Bonds are rewritten in place.
void assign_ring_flags(MolecularGraph &graph);

// Throws std::invalid_argument if the graph breaks a structural invariant
// (bad indices, duplicate bonds, disconnected, aromatic bond between
// non-aromatic atoms).
void validate_graph(const MolecularGraph &graph);

inline constexpr std::size_t kAtomFeatureWidth = 26;
inline constexpr std::size_t kBondFeatureWidth = 5;

struct FeatureConfig {
  std::size_t atom_feature_width = kAtomFeatureWidth;
  std::size_t bond_feature_width = kBondFeatureWidth;
};

// Row-major dense block produced by featurization.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

struct DirectedEdges {
  // Edge 2b runs bonds[b].begin -> bonds[b].end, edge 2b+1 the reverse.
  std::vector<std::size_t> source;
  std::vector<std::size_t> target;
  FeatureMatrix features;
};

namespace atom_slots {
inline constexpr std::size_t kElement = 0;
inline constexpr std::size_t kDegree = 11;
inline constexpr std::size_t kCharge = 17;
inline constexpr std::size_t kAromatic = 20;
inline constexpr std::size_t kHydrogens = 21;
} // namespace atom_slots

namespace bond_slots {
inline constexpr std::size_t kOrder = 0;
inline constexpr std::size_t kInRing = 4;
} // namespace bond_slots

/// One row per atom: element one-hot (11) | degree 0-5 (6) | charge
/// -1/0/+1 (3) | aromatic (1) | explicit H 0-4 (5).
FeatureMatrix atom_features(const MolecularGraph &graph);

/// Two directed edges per bond sharing one feature row: order one-hot (4) |
/// in-ring (1).
DirectedEdges bond_features(const MolecularGraph &graph);

} // namespace cliffkit

#endif // CLIFFKIT_MOLGRAPH_H_
