#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sawbound/gmatrix.hpp"

namespace sawbound {

struct BoolMatrix {
  int n = 0;
  std::vector<std::uint8_t> a;  // n*n row-major

  static BoolMatrix zero(int n) {
    return BoolMatrix{n, std::vector<std::uint8_t>(static_cast<std::size_t>(n) *
                                                   static_cast<std::size_t>(n))};
  }
  std::uint8_t at(int r, int c) const {
    return a[static_cast<std::size_t>(r) * static_cast<std::size_t>(n) +
             static_cast<std::size_t>(c)];
  }
  void set(int r, int c, bool v) {
    a[static_cast<std::size_t>(r) * static_cast<std::size_t>(n) +
      static_cast<std::size_t>(c)] = v ? 1 : 0;
  }
  bool operator==(const BoolMatrix&) const = default;
};

struct DenseMatrix {
  int n = 0;
  std::vector<double> a;  // n*n row-major

  static DenseMatrix zero(int n) {
    return DenseMatrix{n, std::vector<double>(static_cast<std::size_t>(n) *
                                              static_cast<std::size_t>(n))};
  }
  double at(int r, int c) const {
    return a[static_cast<std::size_t>(r) * static_cast<std::size_t>(n) +
             static_cast<std::size_t>(c)];
  }
  double& at(int r, int c) {
    return a[static_cast<std::size_t>(r) * static_cast<std::size_t>(n) +
             static_cast<std::size_t>(c)];
  }
};

// Nonzero pattern of the symbolic matrix. Valid for every z > 0 at once
// since all coefficients are nonnegative.
BoolMatrix structure_matrix(const GMatrix& g);

// Primitivity via the boolean-power criterion: B is primitive iff
// B^(t^2 - 2t + 2) is all-true. Uses repeated squaring in the boolean
// semiring.
bool is_primitive(const BoolMatrix& b);

// Numeric instantiation of the symbolic matrix at z > 0.
DenseMatrix eval_at(const GMatrix& g, std::span<const double> z);
// Same, with every operation rounded upward; used by tail certificates.
DenseMatrix eval_at_upper(const GMatrix& g, std::span<const double> z);

/// A certified enclosure of a positive quantity: lower <= value <= upper,
/// with (upper - lower) / value <= tolerance on success.
struct CertifiedBound {
  double value = 0;
  double lower = 0;
  double upper = 0;
  std::int64_t iterations = 0;
  double tolerance = 0;

  double width() const { return upper - lower; }
};

inline constexpr double kDefaultEigenTolerance = 1e-12;
inline constexpr std::int64_t kDefaultIterationCap = 1'000'000;

// Dominant eigenvalue of a nonnegative matrix with irreducible (certify
// primitivity first) structure, by power iteration from the all-ones
// vector. After each multiply the ratio interval
// [min_i (Mv)_i / v_i, max_i (Mv)_i / v_i] brackets the eigenvalue; the
// bracket is widened by a documented rounding allowance, successive
// brackets are intersected, and iteration stops when the relative width
// reaches `tol`. The reported value is the geometric mean of the bracket.
// Throws ConvergenceError past `iteration_cap` (after one retry from a
// perturbed start vector) and PreconditionError on zero/negative data.
CertifiedBound dominant_eigenvalue(const DenseMatrix& m,
                                   double tol = kDefaultEigenTolerance,
                                   std::int64_t iteration_cap = kDefaultIterationCap);

// The upper bound on the weighted connective constant: the (n-m)-th root of
// the certified dominant eigenvalue of g at z, roots applied to both bracket
// ends. Refuses (NotPrimitiveError) unless the structure matrix is
// primitive, which is the hypothesis of the bound.
CertifiedBound mu_upper_bound(const GMatrix& g, std::span<const double> z,
                              double tol = kDefaultEigenTolerance);

}  // namespace sawbound
