#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sawbound/gmatrix.hpp"

namespace sawbound {

/// Parameters of the anisotropic circuit model: horizontal edges weighted
/// epsilon, vertical edges alpha, and the positive constant t of the
/// size-proportional function a(gamma) = t * (number of edges).
struct KPInstance {
  double epsilon = 0;
  double alpha = 0;
  double kp_t = 0;
};

/// Certified upper bound on the full weighted trail sum from a vertex,
/// sum_{l>=1} c_l(z): exact enumeration up to length L plus a rigorous
/// geometric tail, total = exact_partial + tail_bound.
struct CertifiedAnchoredBound {
  double exact_partial = 0;
  double tail_bound = 0;
  double total = 0;
  int max_exact_length = 0;  // L
  bool converged = false;
};

inline constexpr int kDefaultMaxBlocks = 64;

// Requires g built for the square lattice in trail mode, primitive, with a
// certified eigenvalue upper enclosure below 1 at z (else
// PreconditionError / NotPrimitiveError). exact_partial sums c_1..c_L by
// direct enumeration (plain arithmetic, deterministic order). The tail takes
// the smallest block count q0 <= max_blocks whose up-rounded power of the
// numeric matrix has max row sum below 1, covers the remaining lengths by
// chaining short exact sums through matrix-power row-sum bounds, and closes
// the geometric series in closed form; all tail arithmetic rounds upward,
// including an allowance for the rounding of exact_partial itself. If no
// such q0 exists the result has converged = false.
CertifiedAnchoredBound anchored_sat_bound(const GMatrix& g, std::array<double, 2> z,
                                          int max_exact_length,
                                          int max_blocks = kDefaultMaxBlocks);

enum class KPVerdict { kCertified, kRejected, kIndeterminate };

std::string_view to_string(KPVerdict v);

struct KPCertificate {
  KPInstance instance;
  std::array<double, 2> z = {0, 0};  // (|eps| e^t, |alpha| e^t), zeros lifted
  int max_exact_length = 0;
  CertifiedAnchoredBound bound;
  KPVerdict verdict = KPVerdict::kIndeterminate;
  std::string note;
};

// Sufficient convergence check for the cluster expansion: evaluates the
// anchored trail bound at z = (|eps| e^t, |alpha| e^t) and certifies the
// criterion iff total <= t. Precondition failures yield kIndeterminate,
// never a false positive. Zero weights are lifted to a tiny positive value
// (sound: the bound is monotone in z).
KPCertificate kp_check(const KPInstance& instance, const GMatrix& g, int max_exact_length);

void write_kp_certificate(std::ostream& out, const KPCertificate& cert);

struct EpsilonProbe {
  double epsilon = 0;
  double alpha = 0;
  double total = 0;
  KPVerdict verdict = KPVerdict::kIndeterminate;
};

struct EpsilonSearchResult {
  bool found = false;
  double epsilon0 = 0;
  double kp_t = 0;
  int max_exact_length = 0;
  std::vector<EpsilonProbe> probes;  // every epsilon actually checked
};

// Bisection over epsilon > 0 for the predicate kp_check(eps, f(eps), t),
// where f is the polynomial with the given coefficients (constant term
// first). Requires |f(0)| < 1 and |f(0)| e^t < 1 (PreconditionError).
// Certifies only the probed points: the result is the largest epsilon that
// passed, with the full probe list recorded. found = false when no positive
// epsilon could be certified.
EpsilonSearchResult find_epsilon0(std::span<const double> f_coeffs, double kp_t,
                                  const GMatrix& g, int max_exact_length);

void write_epsilon_certificate(std::ostream& out, const EpsilonSearchResult& result);

}  // namespace sawbound
