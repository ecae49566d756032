#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sawbound/gmatrix.hpp"
#include "sawbound/spectral.hpp"

namespace sawbound {

struct AxisSpec {
  double min = 0;
  double max = 0;
  int samples = 0;  // >= 2, endpoints included
};

struct GridSpec {
  std::vector<AxisSpec> axes;  // one per weight variable

  std::int64_t total_points() const;
};

struct GridRow {
  std::vector<double> z;
  CertifiedBound bound;  // mu upper bound, i.e. lambda^(1/(n-m))
  bool ok = false;
  std::string error;
};

// Certified bound at every grid point, rows in row-major order (last axis
// fastest). Eigenvalue failures are recorded per row, not thrown.
std::vector<GridRow> grid_scan(const GMatrix& g, const GridSpec& spec,
                               double tol = kDefaultEigenTolerance, int threads = 1);

void write_grid_csv(std::ostream& out, const GMatrix& g, std::span<const GridRow> rows);

struct FrontierPoint {
  std::vector<double> direction;
  std::vector<double> point;  // direction scaled onto the lambda = 1 frontier
  double residual_lower = 0;  // certified enclosure of |lambda(point) - 1|
  double residual_upper = 0;
};

// Exact frontier extraction along rays: by homogeneity, lambda(c*u) =
// c^(n-m) * lambda(u), so the frontier point on ray u is
// u * lambda(u)^(-1/(n-m)). The residual is re-certified at the returned
// point as a self-check. Directions must be strictly positive; they are
// normalized internally.
std::vector<FrontierPoint> ray_frontier(const GMatrix& g,
                                        std::span<const std::vector<double>> directions,
                                        double tol = kDefaultEigenTolerance,
                                        int threads = 1);

// Evenly spread strictly-positive unit directions: `count` rays in the
// quadrant for 2 variables, a count x count grid on the octant for 3.
std::vector<std::vector<double>> direction_grid(int nvars, int count);

void write_frontier_csv(std::ostream& out, const GMatrix& g,
                        std::span<const FrontierPoint> points);

enum class Containment { kInside, kOutside, kUnknown };

std::string_view to_string(Containment c);

// Membership of x in the certified convergence domain of the generating
// function: true iff the certified upper enclosure of lambda at
// (|x_1|,...,|x_d|) is below 1. Zero coordinates are lifted to a tiny
// positive value, sound by monotonicity. Returns kUnknown when the
// enclosure straddles 1.
Containment domain_contains(const GMatrix& g, std::span<const double> x,
                            double tol = kDefaultEigenTolerance);

// Closed-form reference bounds (hard-coded radical expressions for the
// builtin square, cubic xy-equal, triangular xz, and hexagonal xy-equal
// families). Row ids look like "square/general/saw/1/2".
std::vector<std::string> closed_form_rows();
std::optional<std::string> closed_form_row(std::string_view lattice, std::string_view scheme,
                                           WalkMode mode, int m, int n);
double closed_form_oracle(std::string_view row_id, std::span<const double> z);

struct ValidationCheck {
  std::string name;
  std::int64_t trials = 0;
  std::int64_t failures = 0;
  bool pass = false;
  std::string detail;
};

struct ValidationReport {
  std::uint64_t seed = 0;
  std::int64_t trials = 0;
  std::vector<ValidationCheck> checks;

  bool pass() const;
};

// Randomized validation at seeded z in (0,1]^d: closed-form agreement when a
// table row matches (or `row_override` is given), the scaling identity
// lambda(c z) = c^(n-m) lambda(z), and the reciprocal identity at the
// isotropic point. Failures are recorded in the report, never thrown.
ValidationReport validate(const GMatrix& g, std::int64_t trials, std::uint64_t seed,
                          const std::optional<std::string>& row_override = {});

void write_validation_report(std::ostream& out, const ValidationReport& report);

}  // namespace sawbound
