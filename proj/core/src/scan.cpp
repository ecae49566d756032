#include "sawbound/scan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "sawbound/errors.hpp"
#include "sawbound/parallel.hpp"

namespace sawbound {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Deterministic uniform draw in (0, 1], independent of the standard
// library's distribution implementations.
double unit_draw(std::uint64_t& state) {
  // splitmix64
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t x = state;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return (static_cast<double>(x >> 11) + 1.0) * 0x1p-53;
}

using ClosedForm = double (*)(double, double);

double square_12(double x, double y) {
  return 0.5 * (x + y + std::sqrt(x * x + 14 * x * y + y * y));
}

double square_13(double x, double y) {
  const double s = std::sqrt(x * x + 14 * x * y + y * y);
  return std::sqrt(0.5 * (x * x + 8 * x * y + y * y + (x + y) * s));
}

double square_14_saw(double x, double y) {
  const double x2 = x * x, y2 = y * y;
  const double inner = x2 * x2 * x2 + 24 * x2 * x2 * x * y + 136 * x2 * x2 * y2 +
                       254 * x2 * x * y2 * y + 136 * x2 * y2 * y2 + 24 * x * y2 * y2 * y +
                       y2 * y2 * y2;
  return std::cbrt(0.5 * (x * x2 + 12 * x * y * (x + y) + y * y2 + std::sqrt(inner)));
}

double square_14_sat(double x, double y) {
  const double s = std::sqrt(x * x + 14 * x * y + y * y);
  return std::cbrt(0.5 * (x * x * x + 12 * x * y * (x + y) + y * y * y +
                          (x * x + 5 * x * y + y * y) * s));
}

double cubicxy_12(double x, double z) {
  return 0.5 * (3 * x + z + std::sqrt(9 * x * x + 26 * x * z + z * z));
}

double cubicxy_13(double x, double z) {
  const double s = std::sqrt(9 * x * x + 26 * x * z + z * z);
  return std::sqrt(0.5 * (9 * x * x + 16 * x * z + z * z + (3 * x + z) * s));
}

double trixz_13_saw(double x, double z) {
  const double inner = 81 * x * x * x * x + 182 * x * x * x * z + 143 * x * x * z * z +
                       34 * x * z * z * z + z * z * z * z;
  return std::sqrt(0.5 * (9 * x * x + 15 * x * z + z * z + std::sqrt(inner)));
}

double hexxy_12(double x, double z) {
  return 0.5 * (x + std::sqrt(x * (x + 8 * z)));
}

double hexxy_13(double x, double z) {
  return std::sqrt(0.5 * (x * x + 4 * x * z + x * std::sqrt(x * (x + 8 * z))));
}

double hexxy_14(double x, double z) {
  return std::cbrt(0.5 * (x * x * x + 6 * x * x * z + x * (x + 2 * z) * std::sqrt(x * (x + 8 * z))));
}

const std::map<std::string, ClosedForm>& closed_form_table() {
  static const std::map<std::string, ClosedForm> table = [] {
    std::map<std::string, ClosedForm> t;
    t["square/general/saw/1/2"] = square_12;
    t["square/general/sat/1/2"] = square_12;
    t["square/general/saw/1/3"] = square_13;
    t["square/general/sat/1/3"] = square_13;
    t["square/general/saw/1/4"] = square_14_saw;
    t["square/general/sat/1/4"] = square_14_sat;
    t["cubic/xy-equal/saw/1/2"] = cubicxy_12;
    t["cubic/xy-equal/sat/1/2"] = cubicxy_12;
    t["cubic/xy-equal/saw/2/3"] = cubicxy_12;
    t["cubic/xy-equal/sat/2/3"] = cubicxy_12;
    t["cubic/xy-equal/saw/1/3"] = cubicxy_13;
    t["cubic/xy-equal/sat/1/3"] = cubicxy_13;
    t["triangular/xz/saw/1/2"] = cubicxy_12;  // identical radical expression
    t["triangular/xz/sat/1/2"] = cubicxy_12;
    t["triangular/xz/saw/1/3"] = trixz_13_saw;
    t["triangular/xz/sat/1/3"] = cubicxy_13;  // identical radical expression
    t["hexagonal/xy-equal/saw/1/2"] = hexxy_12;
    t["hexagonal/xy-equal/sat/1/2"] = hexxy_12;
    t["hexagonal/xy-equal/saw/1/3"] = hexxy_13;
    t["hexagonal/xy-equal/sat/1/3"] = hexxy_13;
    t["hexagonal/xy-equal/saw/1/4"] = hexxy_14;
    t["hexagonal/xy-equal/sat/1/4"] = hexxy_14;
    return t;
  }();
  return table;
}

}  // namespace

std::int64_t GridSpec::total_points() const {
  std::int64_t total = 1;
  for (const AxisSpec& axis : axes) total *= axis.samples;
  return total;
}

std::vector<GridRow> grid_scan(const GMatrix& g, const GridSpec& spec, double tol,
                               int threads) {
  if (static_cast<int>(spec.axes.size()) != g.nvars()) {
    throw PreconditionError("grid spec must have one axis per weight variable");
  }
  for (const AxisSpec& axis : spec.axes) {
    if (!(axis.min > 0) || !(axis.max >= axis.min) || axis.samples < 2) {
      throw PreconditionError("grid axis requires min > 0, max >= min, samples >= 2");
    }
  }
  if (!is_primitive(structure_matrix(g))) {
    throw NotPrimitiveError("matrix is not primitive; bounds do not apply");
  }

  const std::int64_t total = spec.total_points();
  const int d = g.nvars();
  std::vector<GridRow> rows(static_cast<std::size_t>(total));

  parallel_for(total, threads, [&](std::int64_t index) {
    GridRow& row = rows[static_cast<std::size_t>(index)];
    row.z.resize(static_cast<std::size_t>(d));
    std::int64_t rem = index;
    for (int axis = d - 1; axis >= 0; --axis) {
      const AxisSpec& a = spec.axes[static_cast<std::size_t>(axis)];
      const std::int64_t i = rem % a.samples;
      rem /= a.samples;
      row.z[static_cast<std::size_t>(axis)] =
          a.min + (a.max - a.min) * static_cast<double>(i) / static_cast<double>(a.samples - 1);
    }
    try {
      row.bound = mu_upper_bound(g, row.z, tol);
      row.ok = true;
    } catch (const Error& e) {
      row.ok = false;
      row.error = e.what();
    }
  });
  return rows;
}

void write_grid_csv(std::ostream& out, const GMatrix& g, std::span<const GridRow> rows) {
  for (int i = 0; i < g.nvars(); ++i) out << "z_" << g.labels[static_cast<std::size_t>(i)] << ',';
  out << "bound,bracketLow,bracketHigh\n";
  for (const GridRow& row : rows) {
    for (double zi : row.z) out << fmt_double(zi) << ',';
    if (row.ok) {
      out << fmt_double(row.bound.value) << ',' << fmt_double(row.bound.lower) << ','
          << fmt_double(row.bound.upper) << '\n';
    } else {
      out << "error,error,error\n";
    }
  }
}

std::vector<FrontierPoint> ray_frontier(const GMatrix& g,
                                        std::span<const std::vector<double>> directions,
                                        double tol, int threads) {
  if (!is_primitive(structure_matrix(g))) {
    throw NotPrimitiveError("matrix is not primitive; bounds do not apply");
  }
  const int d = g.nvars();
  std::vector<FrontierPoint> points(directions.size());
  parallel_for(static_cast<std::int64_t>(directions.size()), threads, [&](std::int64_t i) {
    const std::vector<double>& raw = directions[static_cast<std::size_t>(i)];
    if (static_cast<int>(raw.size()) != d) {
      throw PreconditionError("direction dimension mismatch");
    }
    double norm2 = 0;
    for (double c : raw) {
      if (!(c > 0)) throw PreconditionError("directions must be strictly positive");
      norm2 += c * c;
    }
    std::vector<double> u(raw);
    const double norm = std::sqrt(norm2);
    for (double& c : u) c /= norm;

    // lambda(c u) = c^(n-m) lambda(u), so the frontier sits at
    // c = lambda(u)^(-1/(n-m)) exactly.
    const CertifiedBound lam = dominant_eigenvalue(eval_at(g, u), tol);
    const double c = std::pow(lam.value, -1.0 / static_cast<double>(g.entry_degree()));

    FrontierPoint& p = points[static_cast<std::size_t>(i)];
    p.direction = std::move(u);
    p.point.resize(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) p.point[static_cast<std::size_t>(j)] = c * p.direction[static_cast<std::size_t>(j)];

    const CertifiedBound check = dominant_eigenvalue(eval_at(g, p.point), tol);
    if (check.lower <= 1.0 && 1.0 <= check.upper) {
      p.residual_lower = 0.0;
      p.residual_upper = std::max(check.upper - 1.0, 1.0 - check.lower);
    } else if (check.lower > 1.0) {
      p.residual_lower = check.lower - 1.0;
      p.residual_upper = check.upper - 1.0;
    } else {
      p.residual_lower = 1.0 - check.upper;
      p.residual_upper = 1.0 - check.lower;
    }
  });
  return points;
}

std::vector<std::vector<double>> direction_grid(int nvars, int count) {
  if (count < 1) throw PreconditionError("direction count must be positive");
  std::vector<std::vector<double>> dirs;
  const double half_pi = std::acos(0.0);
  if (nvars == 2) {
    dirs.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      const double theta = half_pi * (static_cast<double>(i) + 0.5) / static_cast<double>(count);
      dirs.push_back({std::cos(theta), std::sin(theta)});
    }
  } else if (nvars == 3) {
    dirs.reserve(static_cast<std::size_t>(count) * static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      const double phi = half_pi * (static_cast<double>(i) + 0.5) / static_cast<double>(count);
      for (int j = 0; j < count; ++j) {
        const double theta = half_pi * (static_cast<double>(j) + 0.5) / static_cast<double>(count);
        dirs.push_back({std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta),
                        std::cos(phi)});
      }
    }
  } else {
    throw PreconditionError("direction grids support 2 or 3 weight variables");
  }
  return dirs;
}

void write_frontier_csv(std::ostream& out, const GMatrix& g,
                        std::span<const FrontierPoint> points) {
  for (int i = 0; i < g.nvars(); ++i) out << "dir_" << g.labels[static_cast<std::size_t>(i)] << ',';
  for (int i = 0; i < g.nvars(); ++i) out << "z_" << g.labels[static_cast<std::size_t>(i)] << ',';
  out << "residual\n";
  for (const FrontierPoint& p : points) {
    for (double c : p.direction) out << fmt_double(c) << ',';
    for (double c : p.point) out << fmt_double(c) << ',';
    out << fmt_double(p.residual_upper) << '\n';
  }
}

std::string_view to_string(Containment c) {
  switch (c) {
    case Containment::kInside:
      return "inside";
    case Containment::kOutside:
      return "outside";
    default:
      return "unknown";
  }
}

Containment domain_contains(const GMatrix& g, std::span<const double> x, double tol) {
  if (static_cast<int>(x.size()) != g.nvars()) {
    throw PreconditionError("point dimension mismatch");
  }
  if (!is_primitive(structure_matrix(g))) {
    throw NotPrimitiveError("matrix is not primitive; bounds do not apply");
  }
  // Membership uses |x| and is monotone, so zero coordinates may be lifted
  // to a tiny positive value without changing the answer.
  constexpr double kLift = 1e-30;
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    z[i] = std::max(std::abs(x[i]), kLift);
  }
  const CertifiedBound lam = dominant_eigenvalue(eval_at(g, z), tol);
  if (lam.upper < 1.0) return Containment::kInside;
  if (lam.lower > 1.0) return Containment::kOutside;
  return Containment::kUnknown;
}

std::vector<std::string> closed_form_rows() {
  std::vector<std::string> ids;
  for (const auto& [id, fn] : closed_form_table()) ids.push_back(id);
  return ids;
}

std::optional<std::string> closed_form_row(std::string_view lattice, std::string_view scheme,
                                           WalkMode mode, int m, int n) {
  std::ostringstream id;
  id << lattice << '/' << scheme << '/' << to_string(mode) << '/' << m << '/' << n;
  if (closed_form_table().count(id.str())) return id.str();
  return std::nullopt;
}

double closed_form_oracle(std::string_view row_id, std::span<const double> z) {
  const auto& table = closed_form_table();
  const auto it = table.find(std::string(row_id));
  if (it == table.end()) {
    throw PreconditionError("unknown closed-form row: " + std::string(row_id));
  }
  if (z.size() != 2) throw PreconditionError("closed forms take two weights");
  return it->second(z[0], z[1]);
}

bool ValidationReport::pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const ValidationCheck& c) { return c.pass; });
}

ValidationReport validate(const GMatrix& g, std::int64_t trials, std::uint64_t seed,
                          const std::optional<std::string>& row_override) {
  if (trials < 1) throw PreconditionError("validation requires at least one trial");
  ValidationReport report;
  report.seed = seed;
  report.trials = trials;

  const int d = g.nvars();
  const int degree = g.entry_degree();
  std::uint64_t rng = seed;

  // Closed-form agreement.
  std::optional<std::string> row = row_override;
  if (!row) row = closed_form_row(g.lattice_name, g.scheme, g.mode, g.m, g.n);
  if (row) {
    ValidationCheck check;
    check.name = "closed-form:" + *row;
    check.trials = trials;
    for (std::int64_t i = 0; i < trials; ++i) {
      std::vector<double> z(static_cast<std::size_t>(d));
      for (double& zi : z) zi = unit_draw(rng);
      double oracle = 0;
      bool failed = false;
      try {
        oracle = closed_form_oracle(*row, z);
        const CertifiedBound bound = mu_upper_bound(g, z);
        if (std::abs(bound.value - oracle) > bound.width() + 1e-8) failed = true;
      } catch (const Error& e) {
        failed = true;
        if (check.detail.empty()) check.detail = e.what();
      }
      if (failed) check.failures += 1;
    }
    check.pass = check.failures == 0;
    report.checks.push_back(std::move(check));
  }

  // Scaling identity lambda(c z) = c^(n-m) lambda(z).
  {
    ValidationCheck check;
    check.name = "scaling-identity";
    check.trials = trials;
    for (std::int64_t i = 0; i < trials; ++i) {
      std::vector<double> z(static_cast<std::size_t>(d));
      for (double& zi : z) zi = unit_draw(rng);
      const double c = 2.0 * unit_draw(rng);
      std::vector<double> cz(z);
      for (double& zi : cz) zi *= c;
      try {
        const CertifiedBound a = dominant_eigenvalue(eval_at(g, cz));
        const CertifiedBound b = dominant_eigenvalue(eval_at(g, z));
        const double scale = std::pow(c, degree);
        const double diff = std::abs(a.value - scale * b.value);
        const double allowance = a.width() + scale * b.width() + 1e-9;
        if (diff > allowance) check.failures += 1;
      } catch (const Error& e) {
        check.failures += 1;
        if (check.detail.empty()) check.detail = e.what();
      }
    }
    check.pass = check.failures == 0;
    report.checks.push_back(std::move(check));
  }

  // Reciprocal identity: lambda at the isotropic frontier point is 1.
  {
    ValidationCheck check;
    check.name = "reciprocal-isotropic";
    check.trials = 1;
    try {
      std::vector<double> ones(static_cast<std::size_t>(d), 1.0);
      const CertifiedBound at_ones = dominant_eigenvalue(eval_at(g, ones));
      const double c = std::pow(at_ones.value, -1.0 / degree);
      std::vector<double> point(static_cast<std::size_t>(d), c);
      const CertifiedBound at_point = dominant_eigenvalue(eval_at(g, point));
      if (std::abs(at_point.value - 1.0) > at_point.width() + 1e-9) {
        check.failures = 1;
        check.detail = "lambda at reciprocal point is " + fmt_double(at_point.value);
      }
    } catch (const Error& e) {
      check.failures = 1;
      check.detail = e.what();
    }
    check.pass = check.failures == 0;
    report.checks.push_back(std::move(check));
  }

  return report;
}

void write_validation_report(std::ostream& out, const ValidationReport& report) {
  out << "seed " << report.seed << " trials " << report.trials << '\n';
  for (const ValidationCheck& check : report.checks) {
    out << (check.pass ? "pass" : "FAIL") << ' ' << check.name << " failures "
        << check.failures << '/' << check.trials;
    if (!check.detail.empty()) out << " (" << check.detail << ')';
    out << '\n';
  }
}

}  // namespace sawbound
