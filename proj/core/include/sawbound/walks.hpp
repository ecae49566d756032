#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sawbound/lattice.hpp"
#include "sawbound/poly.hpp"

namespace sawbound {

enum class WalkMode { kSaw, kSat };

std::string_view to_string(WalkMode mode);
WalkMode walk_mode_from_string(std::string_view s);  // "saw" | "sat"

struct WalkStep {
  IntVec offset;
  int edge_class = 0;

  bool operator==(const WalkStep&) const = default;
};

/// A walk anchored at the representative of its start class. Only offsets
/// are stored; absolute vertices are recomputed on demand, so translated
/// copies of a walk compare equal.
struct Walk {
  int start_class = 0;
  std::vector<WalkStep> steps;

  int length() const { return static_cast<int>(steps.size()); }
  bool operator==(const Walk&) const = default;
};

// Absolute vertices v_0..v_n of the walk (v_0 = class representative).
std::vector<IntVec> walk_vertices(const LatticeSpec& lattice, const Walk& walk);

// Structural validity: every step exists at its position, plus the
// mode-specific self-avoidance constraint.
bool walk_valid(const LatticeSpec& lattice, const Walk& walk, WalkMode mode);

/// Comparison key: (startClass, flattened step offsets), ordered
/// lexicographically. Edge classes are omitted because startClass and
/// offsets already determine them.
struct WalkKey {
  int start_class = 0;
  std::vector<int> offsets;

  auto operator<=>(const WalkKey&) const = default;
};

WalkKey walk_key(const Walk& walk);

// Image of a walk under a weight-preserving symmetry, re-anchored to the
// image start's class representative. Edge classes carry over unchanged.
// Throws OffLatticeError if the image leaves the lattice (an invalid
// SymmetryRep; check_lattice surfaces those).
Walk apply_symmetry(const LatticeSpec& lattice, const SymmetryRep& sym, const Walk& walk);

// Minimum of walk_key over the symmetry list; idempotent.
WalkKey canonical_key(const LatticeSpec& lattice, const Walk& walk);
Walk canonical_form(const LatticeSpec& lattice, const Walk& walk);

inline constexpr std::uint64_t kDefaultWalkBudget = 1'000'000'000ULL;

// All m-step walks of the given mode from each of the K class
// representatives, found breadth-first level by level. m = 0 yields the K
// single-vertex walks. Throws BudgetExceededError past `budget` extensions.
std::vector<Walk> enumerate_walks(const LatticeSpec& lattice, int m, WalkMode mode,
                                  std::uint64_t budget = kDefaultWalkBudget);

// Steps per edge class, as a length-d exponent vector.
IntVec weight_exponents(const Walk& walk, int num_edge_classes);
Monomial weight_monomial(const Walk& walk, int num_edge_classes);

// c_{n,k}(z): sum over all n-step walks from representative k of
// prod_i z_i^{N_i}. Walks are completed depth-first with steps tried in
// rule declaration order and their weights accumulated in that order; the
// summation order is part of the contract (reference enumerators must
// reproduce it bit for bit).
double weighted_count(const LatticeSpec& lattice, int n, int k, WalkMode mode,
                      std::span<const double> z,
                      std::uint64_t budget = kDefaultWalkBudget);

struct PartitionClass {
  Walk canonical_rep;
  std::int64_t size = 0;
  Monomial rep_weight;

  bool operator==(const PartitionClass&) const = default;
};

/// Orbit partition of the m-step walks under the lattice's symmetry list,
/// classes sorted ascending by canonical key.
struct Partition {
  int m = 0;
  WalkMode mode = WalkMode::kSaw;
  std::vector<PartitionClass> classes;

  int t() const { return static_cast<int>(classes.size()); }
  bool operator==(const Partition&) const = default;
};

Partition partition_walks(const LatticeSpec& lattice, int m, WalkMode mode,
                          std::uint64_t budget = kDefaultWalkBudget);

// Debug/test dump: one walk per line, "startClass (o1,..,oD,ec) ...".
std::string format_walk(const Walk& walk);
void dump_walks(std::ostream& out, std::span<const Walk> walks);

}  // namespace sawbound
