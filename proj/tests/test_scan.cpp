#include <doctest.h>

#include <cmath>
#include <sstream>

#include "sawbound/errors.hpp"
#include "sawbound/scan.hpp"

using namespace sawbound;

namespace {

struct Rng {
  std::uint64_t state;

  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t x = state;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }
  double unit() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1p-53; }
};

GMatrix square_12() {
  return build_gmatrix(builtin_lattice("square", "general"), 1, 2, WalkMode::kSaw);
}

// Independent frontier cross-check: bisect the scale c until the certified
// bound at c*u straddles 1.
double bisect_along_ray(const GMatrix& g, const std::vector<double>& u) {
  double lo = 1e-6, hi = 10.0;
  for (int iter = 0; iter < 80; ++iter) {
    const double mid = 0.5 * (lo + hi);
    std::vector<double> z(u);
    for (double& c : z) c *= mid;
    const CertifiedBound b = mu_upper_bound(g, z);
    if (b.value < 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("grid scan hits the known anchors") {
  const GMatrix g = square_12();
  GridSpec spec;
  spec.axes = {{1.0 / 3, 1.0, 3}, {1.0 / 3, 1.0, 3}};  // includes (1/3,1/3) and (1,1)
  const auto rows = grid_scan(g, spec);
  REQUIRE(rows.size() == 9);
  CHECK(rows.front().z == std::vector<double>{1.0 / 3, 1.0 / 3});
  CHECK(rows.back().z == std::vector<double>{1.0, 1.0});
  CHECK(rows.front().ok);
  CHECK(rows.front().bound.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rows.back().bound.value == doctest::Approx(3.0).epsilon(1e-9));

  // Row-major: the second row varies the last axis.
  CHECK(rows[1].z[0] == doctest::Approx(1.0 / 3));
  CHECK(rows[1].z[1] == doctest::Approx(2.0 / 3));

  // Monotone along ordered pairs.
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (rows[i].z[0] <= rows[j].z[0] && rows[i].z[1] <= rows[j].z[1]) {
        CHECK(rows[i].bound.value <= rows[j].bound.value + 1e-9);
      }
    }
  }
}

TEST_CASE("grid scan is equivariant under the x<->y weight swap") {
  const GMatrix g = square_12();
  GridSpec spec;
  spec.axes = {{0.2, 0.8, 4}, {0.2, 0.8, 4}};
  const auto rows = grid_scan(g, spec);
  auto bound_at = [&rows](double x, double y) {
    for (const GridRow& r : rows) {
      if (r.z[0] == x && r.z[1] == y) return r.bound.value;
    }
    REQUIRE(false);
    return 0.0;
  };
  for (const GridRow& r : rows) {
    CHECK(r.bound.value == doctest::Approx(bound_at(r.z[1], r.z[0])).epsilon(1e-10));
  }
}

TEST_CASE("grid scan validates its spec") {
  const GMatrix g = square_12();
  GridSpec bad;
  bad.axes = {{0.0, 1.0, 3}, {0.1, 1.0, 3}};
  CHECK_THROWS_AS(grid_scan(g, bad), PreconditionError);
  bad.axes = {{0.1, 1.0, 1}, {0.1, 1.0, 3}};
  CHECK_THROWS_AS(grid_scan(g, bad), PreconditionError);
  bad.axes = {{0.1, 1.0, 3}};
  CHECK_THROWS_AS(grid_scan(g, bad), PreconditionError);
}

TEST_CASE("grid csv output is stable") {
  const GMatrix g = square_12();
  GridSpec spec;
  spec.axes = {{0.5, 1.0, 2}, {0.5, 1.0, 2}};
  std::ostringstream a, b;
  write_grid_csv(a, g, grid_scan(g, spec));
  write_grid_csv(b, g, grid_scan(g, spec, kDefaultEigenTolerance, /*threads=*/2));
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("z_x,z_y,bound,bracketLow,bracketHigh\n", 0) == 0);
}

TEST_CASE("isotropic ray lands on (1/3, 1/3)") {
  const GMatrix g = square_12();
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const std::vector<std::vector<double>> dirs = {{inv_sqrt2, inv_sqrt2}};
  const auto points = ray_frontier(g, dirs);
  REQUIRE(points.size() == 1);
  CHECK(points[0].point[0] == doctest::Approx(1.0 / 3).epsilon(1e-9));
  CHECK(points[0].point[1] == doctest::Approx(1.0 / 3).epsilon(1e-9));
  CHECK(points[0].residual_upper <= 1e-9);
}

TEST_CASE("frontier is symmetric under direction swap and matches bisection") {
  const GMatrix g = square_12();
  const auto dirs = direction_grid(2, 8);
  const auto points = ray_frontier(g, dirs);
  REQUIRE(points.size() == 8);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    const auto& q = points[points.size() - 1 - i];  // swapped direction
    CHECK(p.point[0] == doctest::Approx(q.point[1]).epsilon(1e-9));
    CHECK(p.residual_upper <= 1e-9);
  }
  // Cross-check two rays against the bisection oracle.
  for (std::size_t i : {std::size_t{1}, std::size_t{5}}) {
    const double c_bisect = bisect_along_ray(g, points[i].direction);
    const double c_exact = points[i].point[0] / points[i].direction[0];
    CHECK(c_exact == doctest::Approx(c_bisect).epsilon(1e-9));
  }
}

TEST_CASE("hexagonal equal-weight ray crosses at one half") {
  // lambda(x,x) = 2x for the (1,2) matrix, so the frontier sits at (1/2, 1/2).
  const GMatrix g = build_gmatrix(builtin_lattice("hexagonal", "xy-equal"), 1, 2, WalkMode::kSaw);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const std::vector<std::vector<double>> dirs = {{inv_sqrt2, inv_sqrt2}};
  const auto points = ray_frontier(g, dirs);
  REQUIRE(points.size() == 1);
  CHECK(points[0].point[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(points[0].point[1] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("3d direction grids stay positive and unit") {
  const auto dirs = direction_grid(3, 4);
  CHECK(dirs.size() == 16);
  for (const auto& u : dirs) {
    double norm2 = 0;
    for (double c : u) {
      CHECK(c > 0);
      norm2 += c * c;
    }
    CHECK(norm2 == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(direction_grid(4, 4), PreconditionError);
}

TEST_CASE("frontier csv layout") {
  const GMatrix g = square_12();
  const auto points = ray_frontier(g, direction_grid(2, 2));
  std::ostringstream out;
  write_frontier_csv(out, g, points);
  CHECK(out.str().rfind("dir_x,dir_y,z_x,z_y,residual\n", 0) == 0);
}

TEST_CASE("domain membership") {
  const GMatrix g = square_12();
  const std::vector<double> inside = {0.1, 0.1};
  const std::vector<double> outside = {0.5, 0.5};
  const std::vector<double> negative = {-0.1, 0.1};
  const std::vector<double> with_zero = {0.0, 0.2};
  CHECK(domain_contains(g, inside) == Containment::kInside);
  CHECK(domain_contains(g, outside) == Containment::kOutside);
  CHECK(domain_contains(g, negative) == Containment::kInside);
  CHECK(domain_contains(g, with_zero) == Containment::kInside);

  // A coarse tolerance leaves the boundary undecided.
  const std::vector<double> boundary = {1.0 / 3, 1.0 / 3};
  CHECK(domain_contains(g, boundary, /*tol=*/1e-2) == Containment::kUnknown);
}

TEST_CASE("closed-form table identities") {
  Rng rng{2718};
  const std::vector<double> ones = {1.0, 1.0};
  CHECK(closed_form_oracle("square/general/saw/1/2", ones) == doctest::Approx(3.0));
  CHECK(closed_form_oracle("hexagonal/xy-equal/saw/1/2", ones) == doctest::Approx(2.0));
  CHECK(closed_form_oracle("cubic/xy-equal/saw/1/2", ones) == doctest::Approx(5.0));

  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<double> z = {rng.unit(), rng.unit()};
    // The (1,2) and (2,3) reduced-cubic rows print the same expression.
    CHECK(closed_form_oracle("cubic/xy-equal/saw/1/2", z) ==
          closed_form_oracle("cubic/xy-equal/saw/2/3", z));
    // Reduced-triangular SAT (1,3) coincides with reduced-cubic (1,3).
    CHECK(closed_form_oracle("triangular/xz/sat/1/3", z) ==
          closed_form_oracle("cubic/xy-equal/sat/1/3", z));
  }

  CHECK_THROWS_AS(closed_form_oracle("square/general/saw/9/9", ones), PreconditionError);
  CHECK(closed_form_row("square", "general", WalkMode::kSaw, 1, 2).has_value());
  CHECK_FALSE(closed_form_row("square", "general", WalkMode::kSaw, 1, 9).has_value());
}

TEST_CASE("validate passes on a table row and flags a mismatched row") {
  const GMatrix g = square_12();
  const ValidationReport good = validate(g, 20, 4242);
  CHECK(good.pass());
  REQUIRE(good.checks.size() == 3);
  CHECK(good.checks[0].name == "closed-form:square/general/saw/1/2");

  const ValidationReport bad = validate(g, 5, 4242, std::string("hexagonal/xy-equal/saw/1/2"));
  CHECK_FALSE(bad.pass());
  CHECK(bad.checks[0].failures > 0);
}

TEST_CASE("bounds tighten from (1,2) to (1,3) at random points") {
  Rng rng{5555};
  const GMatrix g2 = square_12();
  const GMatrix g3 = build_gmatrix(builtin_lattice("square", "general"), 1, 3, WalkMode::kSaw);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<double> z = {rng.unit(), rng.unit()};
    const CertifiedBound b2 = mu_upper_bound(g2, z);
    const CertifiedBound b3 = mu_upper_bound(g3, z);
    CHECK(b3.value <= b2.value + b2.width() + b3.width());
  }
}
