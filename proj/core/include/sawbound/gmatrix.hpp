#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sawbound/lattice.hpp"
#include "sawbound/poly.hpp"
#include "sawbound/walks.hpp"

namespace sawbound {

/// The t x t symbolic transfer matrix for prefix length m and walk length n.
/// Entry (r,s) is the weight sum of the n-step walks extending the class-r
/// representative and ending in a translate of class s, divided by the
/// class-r representative weight. Every monomial in every entry has total
/// degree exactly n - m and a nonnegative coefficient.
struct GMatrix {
  std::string lattice_name;
  std::string scheme;
  WalkMode mode = WalkMode::kSaw;
  int m = 0;
  int n = 0;
  std::vector<std::string> labels;  // d edge-class labels
  Partition partition;
  std::vector<Poly> entries;  // t*t, row-major

  int t() const { return partition.t(); }
  int nvars() const { return static_cast<int>(labels.size()); }
  int entry_degree() const { return n - m; }

  const Poly& entry(int r, int s) const {
    return entries[static_cast<std::size_t>(r) * static_cast<std::size_t>(t()) +
                   static_cast<std::size_t>(s)];
  }
  Poly& entry(int r, int s) {
    return entries[static_cast<std::size_t>(r) * static_cast<std::size_t>(t()) +
                   static_cast<std::size_t>(s)];
  }

  bool operator==(const GMatrix&) const = default;
};

inline constexpr std::uint64_t kDefaultBuildBudget = 1'000'000'000ULL;

// Depth-first construction: for each partition class r, extend its canonical
// representative to all n-step walks of the mode, classify the final m steps
// (re-anchored) by canonical key, accumulate the full walk weight into entry
// (r, tail class), then divide row r by the representative weight. Rows may
// be built in parallel; the result does not depend on scheduling.
// Requires 0 <= m < n. Throws BudgetExceededError past `budget` extension
// nodes across all rows.
GMatrix build_gmatrix(const LatticeSpec& lattice, int m, int n, WalkMode mode,
                      std::uint64_t budget = kDefaultBuildBudget, int threads = 1);

struct MatrixInfo {
  std::string lattice_name;
  std::string scheme;
  WalkMode mode = WalkMode::kSaw;
  int m = 0;
  int n = 0;
  int t = 0;
  int entry_degree = 0;
  int nonzero_entries = 0;
  std::vector<std::int64_t> class_sizes;
  std::vector<std::uint8_t> nonzero_pattern;  // t*t row-major, 1 = nonzero
};

MatrixInfo matrix_info(const GMatrix& g);

// Versioned text format with a trailing FNV-1a 64 content checksum; see
// README for the layout. Round-trips bit-exactly.
void save_gmatrix(const GMatrix& g, std::ostream& out);
GMatrix load_gmatrix(std::istream& in);
void save_gmatrix_file(const GMatrix& g, const std::string& path);
GMatrix load_gmatrix_file(const std::string& path);

}  // namespace sawbound
