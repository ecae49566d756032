#include "sawbound/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rounding.hpp"
#include "sawbound/errors.hpp"

namespace sawbound {

namespace {

BoolMatrix bool_multiply(const BoolMatrix& a, const BoolMatrix& b) {
  BoolMatrix r = BoolMatrix::zero(a.n);
  for (int i = 0; i < a.n; ++i) {
    for (int k = 0; k < a.n; ++k) {
      if (!a.at(i, k)) continue;
      for (int j = 0; j < a.n; ++j) {
        if (b.at(k, j)) r.set(i, j, true);
      }
    }
  }
  return r;
}

bool all_true(const BoolMatrix& a) {
  return std::all_of(a.a.begin(), a.a.end(), [](std::uint8_t v) { return v != 0; });
}

// Relative allowance for one multiply-and-divide pass of the ratio bounds:
// a dot product of length t contributes about t rounding errors, the
// division one more; doubled for headroom.
double ratio_inflation(int t) {
  return 2.0 * (static_cast<double>(t) + 2.0) * std::numeric_limits<double>::epsilon();
}

struct IterationResult {
  bool converged = false;
  double lower = 0;
  double upper = 0;
  std::int64_t iterations = 0;
};

IterationResult iterate(const DenseMatrix& m, std::span<const double> start, double tol,
                        std::int64_t cap) {
  const int t = m.n;
  const double inflation = ratio_inflation(t);
  std::vector<double> v(start.begin(), start.end());
  std::vector<double> w(static_cast<std::size_t>(t), 0.0);

  IterationResult res;
  double best_lower = 0;
  double best_upper = std::numeric_limits<double>::infinity();

  for (std::int64_t it = 1; it <= cap; ++it) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0;
    double wmax = 0;
    for (int i = 0; i < t; ++i) {
      double acc = 0;
      for (int j = 0; j < t; ++j) acc += m.at(i, j) * v[static_cast<std::size_t>(j)];
      w[static_cast<std::size_t>(i)] = acc;
      if (acc <= 0 || !std::isfinite(acc)) {
        throw PreconditionError(
            "power iteration produced a nonpositive component (matrix is reducible or zero)");
      }
      const double ratio = acc / v[static_cast<std::size_t>(i)];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      wmax = std::max(wmax, acc);
    }
    // Collatz-Wielandt: every positive vector brackets the eigenvalue, so
    // successive inflated brackets may be intersected.
    best_lower = std::max(best_lower, lo * (1.0 - inflation));
    best_upper = std::min(best_upper, hi * (1.0 + inflation));
    res.iterations = it;
    if (best_upper < best_lower) {
      throw ConvergenceError("eigenvalue bracket collapsed (inconsistent rounding)");
    }
    const double mid = std::sqrt(best_lower * best_upper);
    if (best_upper - best_lower <= tol * mid) {
      res.converged = true;
      break;
    }
    for (int i = 0; i < t; ++i) v[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)] / wmax;
  }
  res.lower = best_lower;
  res.upper = best_upper;
  return res;
}

}  // namespace

BoolMatrix structure_matrix(const GMatrix& g) {
  BoolMatrix b = BoolMatrix::zero(g.t());
  for (int r = 0; r < g.t(); ++r) {
    for (int s = 0; s < g.t(); ++s) {
      b.set(r, s, !g.entry(r, s).is_zero());
    }
  }
  return b;
}

bool is_primitive(const BoolMatrix& b) {
  if (b.n < 1) throw PreconditionError("primitivity requires a nonempty matrix");
  // A is primitive iff A^(t^2 - 2t + 2) is positive; repeated squaring in
  // the boolean semiring.
  const long long t = b.n;
  long long exponent = t * t - 2 * t + 2;
  BoolMatrix base = b;
  BoolMatrix acc = BoolMatrix::zero(b.n);
  for (int i = 0; i < b.n; ++i) acc.set(i, i, true);
  while (exponent > 0) {
    if (exponent & 1) acc = bool_multiply(acc, base);
    exponent >>= 1;
    if (exponent > 0) base = bool_multiply(base, base);
  }
  return all_true(acc);
}

DenseMatrix eval_at(const GMatrix& g, std::span<const double> z) {
  if (static_cast<int>(z.size()) != g.nvars()) {
    throw PreconditionError("weight vector dimension mismatch");
  }
  for (double zi : z) {
    if (!(zi > 0)) throw PreconditionError("weights must be strictly positive");
  }
  DenseMatrix m = DenseMatrix::zero(g.t());
  for (int r = 0; r < g.t(); ++r) {
    for (int s = 0; s < g.t(); ++s) {
      m.at(r, s) = g.entry(r, s).eval(z);
    }
  }
  return m;
}

DenseMatrix eval_at_upper(const GMatrix& g, std::span<const double> z) {
  if (static_cast<int>(z.size()) != g.nvars()) {
    throw PreconditionError("weight vector dimension mismatch");
  }
  DenseMatrix m = DenseMatrix::zero(g.t());
  for (int r = 0; r < g.t(); ++r) {
    for (int s = 0; s < g.t(); ++s) {
      double sum = 0;
      for (const auto& [mono, coeff] : g.entry(r, s).terms()) {
        double term = internal::up(coeff.convert_to<double>());
        for (int i = 0; i < g.nvars(); ++i) {
          for (int e = 0; e < mono.exponent(i); ++e) {
            term = internal::mul_up(term, z[static_cast<std::size_t>(i)]);
          }
        }
        sum = internal::add_up(sum, term);
      }
      m.at(r, s) = sum;
    }
  }
  return m;
}

CertifiedBound dominant_eigenvalue(const DenseMatrix& m, double tol,
                                   std::int64_t iteration_cap) {
  if (m.n < 1) throw PreconditionError("empty matrix");
  if (!(tol > 0)) throw PreconditionError("tolerance must be positive");
  for (double v : m.a) {
    if (v < 0 || !std::isfinite(v)) throw PreconditionError("matrix must be nonnegative and finite");
  }

  std::vector<double> ones(static_cast<std::size_t>(m.n), 1.0);
  IterationResult res = iterate(m, ones, tol, iteration_cap);
  if (!res.converged) {
    // One retry from a perturbed start before giving up.
    std::vector<double> perturbed(static_cast<std::size_t>(m.n));
    for (int i = 0; i < m.n; ++i) {
      perturbed[static_cast<std::size_t>(i)] = 1.0 + 0.0625 * static_cast<double>(i % 7);
    }
    res = iterate(m, perturbed, tol, iteration_cap);
    if (!res.converged) {
      throw ConvergenceError("power iteration did not certify the eigenvalue within the cap");
    }
  }

  CertifiedBound bound;
  bound.lower = res.lower;
  bound.upper = res.upper;
  bound.value = std::sqrt(res.lower * res.upper);
  bound.iterations = res.iterations;
  bound.tolerance = tol;
  return bound;
}

CertifiedBound mu_upper_bound(const GMatrix& g, std::span<const double> z, double tol) {
  if (!is_primitive(structure_matrix(g))) {
    throw NotPrimitiveError(
        "matrix is not primitive; the eigenvalue bound hypothesis fails");
  }
  const CertifiedBound lam = dominant_eigenvalue(eval_at(g, z), tol);
  const double root = 1.0 / static_cast<double>(g.entry_degree());

  CertifiedBound bound;
  // pow is faithful to a couple of ulps at most; nudge both ends outward.
  bound.lower = internal::down(internal::down(std::pow(lam.lower, root)));
  bound.upper = internal::up(internal::up(std::pow(lam.upper, root)));
  bound.value = std::sqrt(bound.lower * bound.upper);
  bound.iterations = lam.iterations;
  bound.tolerance = tol;
  return bound;
}

}  // namespace sawbound
