#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sawbound {

using IntVec = std::vector<int>;

/// One outgoing edge from a vertex class: the coordinate offset of the step
/// and the index of the edge class (weight variable) it belongs to.
struct StepRule {
  IntVec offset;
  int edge_class = 0;

  bool operator==(const StepRule&) const = default;
};

struct VertexClassSpec {
  IntVec representative;
  std::vector<StepRule> steps;

  bool operator==(const VertexClassSpec&) const = default;
};

/// Affine lattice symmetry v -> linear * v + shift, stored as a coset
/// representative modulo the translations. Must map edge classes to
/// themselves (weight-preserving); check_lattice verifies this.
struct SymmetryRep {
  std::vector<IntVec> linear;  // D rows of length D
  IntVec shift;

  bool operator==(const SymmetryRep&) const = default;
};

struct LatticeSpec {
  std::string name;
  std::string scheme;
  int dim = 0;               // embedding dimension D
  int num_edge_classes = 0;  // d
  std::vector<std::string> edge_class_labels;
  std::vector<VertexClassSpec> vertex_classes;
  std::vector<IntVec> translation_basis;  // D full-rank integer vectors
  std::vector<SymmetryRep> symmetries;    // includes the identity

  int num_vertex_classes() const { return static_cast<int>(vertex_classes.size()); }
  bool operator==(const LatticeSpec&) const = default;
};

// Supported builtin (name, scheme) pairs, in listing order:
//   square/general, cubic/general, cubic/xy-equal, triangular/general,
//   triangular/xz, hexagonal/general, hexagonal/xy-equal.
// Throws UnknownLatticeError for anything else.
LatticeSpec builtin_lattice(std::string_view name, std::string_view scheme);
std::vector<std::pair<std::string, std::string>> builtin_lattice_names();

SymmetryRep identity_symmetry(int dim);
IntVec apply_affine(const SymmetryRep& sym, const IntVec& v);

// Index k of the unique vertex class with coord - representative_k in the
// integer span of the translation basis. Throws OffLatticeError.
int classify_vertex(const LatticeSpec& lattice, const IntVec& coord);

struct NeighborStep {
  IntVec target;
  int edge_class;
};

// The class step rules applied at `coord`.
std::vector<NeighborStep> neighbor_steps(const LatticeSpec& lattice, const IntVec& coord);

/// Diagnostics from validating a lattice specification: translation basis
/// rank, representative classification, step targets, symmetry edge-class
/// preservation, symmetry closure modulo translations, and strong
/// connectivity of the quotient graph.
struct LatticeCheckReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

LatticeCheckReport check_lattice(const LatticeSpec& lattice);

// Text format for custom lattices (integers only, fixed field order; see
// README). load does not run check_lattice; callers do, per contract.
void save_lattice(const LatticeSpec& lattice, std::ostream& out);
LatticeSpec load_lattice(std::istream& in);
LatticeSpec load_lattice_file(const std::string& path);
void save_lattice_file(const LatticeSpec& lattice, const std::string& path);

}  // namespace sawbound
