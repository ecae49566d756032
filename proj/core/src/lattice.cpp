#include "sawbound/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>

#include "sawbound/errors.hpp"

namespace sawbound {

namespace {

// Exact integer determinant (Bareiss fraction-free elimination).
long long int_det(std::vector<std::vector<long long>> m) {
  const std::size_t n = m.size();
  long long sign = 1;
  long long prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t piv = k + 1;
      while (piv < n && m[piv][k] == 0) ++piv;
      if (piv == n) return 0;
      std::swap(m[k], m[piv]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
      }
      m[i][k] = 0;
    }
    prev = m[k][k];
  }
  return n == 0 ? 1 : sign * m[n - 1][n - 1];
}

// Columns of the translation basis as a matrix.
std::vector<std::vector<long long>> basis_columns(const LatticeSpec& lat) {
  const std::size_t n = static_cast<std::size_t>(lat.dim);
  std::vector<std::vector<long long>> b(n, std::vector<long long>(n, 0));
  for (std::size_t j = 0; j < lat.translation_basis.size(); ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      b[i][j] = lat.translation_basis[j][i];
    }
  }
  return b;
}

// Solves B t = rhs over the integers (Cramer), or returns false.
bool solve_integer(const std::vector<std::vector<long long>>& b, long long det_b,
                   const IntVec& rhs, std::vector<long long>* t_out) {
  const std::size_t n = b.size();
  std::vector<long long> t(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    auto bj = b;
    for (std::size_t i = 0; i < n; ++i) bj[i][j] = rhs[i];
    const long long dj = int_det(std::move(bj));
    if (dj % det_b != 0) return false;
    t[j] = dj / det_b;
  }
  // Verify (guards against overflow in the determinants).
  for (std::size_t i = 0; i < n; ++i) {
    long long acc = 0;
    for (std::size_t j = 0; j < n; ++j) acc += b[i][j] * t[j];
    if (acc != rhs[i]) return false;
  }
  if (t_out) *t_out = std::move(t);
  return true;
}

bool on_translation_lattice(const LatticeSpec& lat, const IntVec& v) {
  auto b = basis_columns(lat);
  const long long det_b = int_det(b);
  if (det_b == 0) return false;
  return solve_integer(b, det_b, v, nullptr);
}

IntVec sub(const IntVec& a, const IntVec& b) {
  IntVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

IntVec add(const IntVec& a, const IntVec& b) {
  IntVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

std::string vec_to_string(const IntVec& v) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out << ',';
    out << v[i];
  }
  out << ')';
  return out.str();
}

SymmetryRep diag_symmetry(std::span<const int> signs) {
  const int d = static_cast<int>(signs.size());
  SymmetryRep s;
  s.linear.assign(static_cast<std::size_t>(d), IntVec(static_cast<std::size_t>(d), 0));
  for (int i = 0; i < d; ++i) s.linear[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = signs[i];
  s.shift.assign(static_cast<std::size_t>(d), 0);
  return s;
}

SymmetryRep swap12_symmetry(std::span<const int> signs) {
  // (n1, n2, n3, ...) -> (s1*n2, s2*n1, s3*n3, ...)
  const int d = static_cast<int>(signs.size());
  SymmetryRep s = diag_symmetry(signs);
  s.linear[0].assign(static_cast<std::size_t>(d), 0);
  s.linear[1].assign(static_cast<std::size_t>(d), 0);
  s.linear[0][1] = signs[0];
  s.linear[1][0] = signs[1];
  return s;
}

LatticeSpec make_square_general() {
  LatticeSpec lat;
  lat.name = "square";
  lat.scheme = "general";
  lat.dim = 2;
  lat.num_edge_classes = 2;
  lat.edge_class_labels = {"x", "y"};
  lat.translation_basis = {{1, 0}, {0, 1}};
  VertexClassSpec v;
  v.representative = {0, 0};
  v.steps = {{{1, 0}, 0}, {{-1, 0}, 0}, {{0, 1}, 1}, {{0, -1}, 1}};
  lat.vertex_classes = {v};
  for (int s1 : {1, -1}) {
    for (int s2 : {1, -1}) {
      const int signs[] = {s1, s2};
      lat.symmetries.push_back(diag_symmetry(signs));
    }
  }
  return lat;
}

LatticeSpec make_cubic(bool xy_equal) {
  LatticeSpec lat;
  lat.name = "cubic";
  lat.scheme = xy_equal ? "xy-equal" : "general";
  lat.dim = 3;
  lat.num_edge_classes = xy_equal ? 2 : 3;
  lat.edge_class_labels = xy_equal ? std::vector<std::string>{"x", "z"}
                                   : std::vector<std::string>{"x", "y", "z"};
  lat.translation_basis = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  VertexClassSpec v;
  v.representative = {0, 0, 0};
  const int axis_class[3] = {0, xy_equal ? 0 : 1, xy_equal ? 1 : 2};
  for (int axis = 0; axis < 3; ++axis) {
    for (int dir : {1, -1}) {
      IntVec off(3, 0);
      off[static_cast<std::size_t>(axis)] = dir;
      v.steps.push_back({off, axis_class[axis]});
    }
  }
  lat.vertex_classes = {v};
  for (int s1 : {1, -1}) {
    for (int s2 : {1, -1}) {
      for (int s3 : {1, -1}) {
        const int signs[] = {s1, s2, s3};
        lat.symmetries.push_back(diag_symmetry(signs));
      }
    }
  }
  if (xy_equal) {
    for (int s1 : {1, -1}) {
      for (int s2 : {1, -1}) {
        for (int s3 : {1, -1}) {
          const int signs[] = {s1, s2, s3};
          lat.symmetries.push_back(swap12_symmetry(signs));
        }
      }
    }
  }
  return lat;
}

LatticeSpec make_triangular(bool xz) {
  // Tilted embedding: the origin is adjacent to (+-1,0), (0,+-1), +-(1,1).
  LatticeSpec lat;
  lat.name = "triangular";
  lat.scheme = xz ? "xz" : "general";
  lat.dim = 2;
  lat.num_edge_classes = xz ? 2 : 3;
  lat.edge_class_labels =
      xz ? std::vector<std::string>{"x", "z"} : std::vector<std::string>{"x", "y", "z"};
  lat.translation_basis = {{1, 0}, {0, 1}};
  VertexClassSpec v;
  v.representative = {0, 0};
  const int e2_class = xz ? 0 : 1;
  const int diag_class = xz ? 1 : 2;
  v.steps = {{{1, 0}, 0},        {{-1, 0}, 0},        {{0, 1}, e2_class},
             {{0, -1}, e2_class}, {{1, 1}, diag_class}, {{-1, -1}, diag_class}};
  lat.vertex_classes = {v};
  const int plus[] = {1, 1};
  const int minus[] = {-1, -1};
  lat.symmetries.push_back(diag_symmetry(plus));
  lat.symmetries.push_back(diag_symmetry(minus));
  if (xz) {
    lat.symmetries.push_back(swap12_symmetry(plus));
    lat.symmetries.push_back(swap12_symmetry(minus));
  }
  return lat;
}

LatticeSpec make_hexagonal(bool xy_equal) {
  // Tilted embedding with two vertex classes: (0,0) is adjacent to (1,0),
  // (0,1), (-1,-1); (1,0) is adjacent to (0,0), (1,-1), (2,1); translations
  // are generated by (2,1) and (1,-1). Each undirected edge takes the class
  // of its direction vector up to global sign.
  LatticeSpec lat;
  lat.name = "hexagonal";
  lat.scheme = xy_equal ? "xy-equal" : "general";
  lat.dim = 2;
  lat.num_edge_classes = xy_equal ? 2 : 3;
  lat.edge_class_labels =
      xy_equal ? std::vector<std::string>{"x", "z"} : std::vector<std::string>{"x", "y", "z"};
  lat.translation_basis = {{2, 1}, {1, -1}};
  const int y_class = xy_equal ? 0 : 1;
  const int z_class = xy_equal ? 1 : 2;
  VertexClassSpec v0;
  v0.representative = {0, 0};
  v0.steps = {{{1, 0}, 0}, {{0, 1}, y_class}, {{-1, -1}, z_class}};
  VertexClassSpec v1;
  v1.representative = {1, 0};
  v1.steps = {{{-1, 0}, 0}, {{0, -1}, y_class}, {{1, 1}, z_class}};
  lat.vertex_classes = {v0, v1};
  lat.symmetries.push_back(identity_symmetry(2));
  SymmetryRep point;  // v -> -v + (1,0), swapping the two vertex classes
  point.linear = {{-1, 0}, {0, -1}};
  point.shift = {1, 0};
  lat.symmetries.push_back(point);
  return lat;
}

}  // namespace

SymmetryRep identity_symmetry(int dim) {
  std::vector<int> signs(static_cast<std::size_t>(dim), 1);
  return diag_symmetry(signs);
}

IntVec apply_affine(const SymmetryRep& sym, const IntVec& v) {
  const std::size_t n = sym.linear.size();
  IntVec r(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    long long acc = sym.shift[i];
    for (std::size_t j = 0; j < v.size(); ++j) acc += static_cast<long long>(sym.linear[i][j]) * v[j];
    r[i] = static_cast<int>(acc);
  }
  return r;
}

LatticeSpec builtin_lattice(std::string_view name, std::string_view scheme) {
  if (name == "square" && scheme == "general") return make_square_general();
  if (name == "cubic" && scheme == "general") return make_cubic(false);
  if (name == "cubic" && scheme == "xy-equal") return make_cubic(true);
  if (name == "triangular" && scheme == "general") return make_triangular(false);
  if (name == "triangular" && scheme == "xz") return make_triangular(true);
  if (name == "hexagonal" && scheme == "general") return make_hexagonal(false);
  if (name == "hexagonal" && scheme == "xy-equal") return make_hexagonal(true);
  throw UnknownLatticeError("unknown lattice/scheme: " + std::string(name) + "/" +
                            std::string(scheme));
}

std::vector<std::pair<std::string, std::string>> builtin_lattice_names() {
  return {{"square", "general"},     {"cubic", "general"},   {"cubic", "xy-equal"},
          {"triangular", "general"}, {"triangular", "xz"},   {"hexagonal", "general"},
          {"hexagonal", "xy-equal"}};
}

int classify_vertex(const LatticeSpec& lattice, const IntVec& coord) {
  if (static_cast<int>(coord.size()) != lattice.dim) {
    throw PreconditionError("coordinate dimension mismatch");
  }
  auto b = basis_columns(lattice);
  const long long det_b = int_det(b);
  if (det_b == 0) throw PreconditionError("translation basis is singular");
  for (int k = 0; k < lattice.num_vertex_classes(); ++k) {
    const IntVec rhs = sub(coord, lattice.vertex_classes[static_cast<std::size_t>(k)].representative);
    if (solve_integer(b, det_b, rhs, nullptr)) return k;
  }
  throw OffLatticeError("coordinate " + vec_to_string(coord) + " is not on lattice " +
                        lattice.name);
}

std::vector<NeighborStep> neighbor_steps(const LatticeSpec& lattice, const IntVec& coord) {
  const int k = classify_vertex(lattice, coord);
  std::vector<NeighborStep> out;
  const auto& cls = lattice.vertex_classes[static_cast<std::size_t>(k)];
  out.reserve(cls.steps.size());
  for (const StepRule& rule : cls.steps) {
    out.push_back({add(coord, rule.offset), rule.edge_class});
  }
  return out;
}

LatticeCheckReport check_lattice(const LatticeSpec& lat) {
  LatticeCheckReport report;
  auto fail = [&report](std::string msg) { report.violations.push_back(std::move(msg)); };

  if (lat.dim <= 0) {
    fail("embedding dimension must be positive");
    return report;
  }
  if (lat.vertex_classes.empty()) fail("lattice must have at least one vertex class");
  if (lat.num_edge_classes <= 0) fail("lattice must have at least one edge class");
  if (static_cast<int>(lat.edge_class_labels.size()) != lat.num_edge_classes) {
    fail("edge class label count does not match d");
  }
  if (static_cast<int>(lat.translation_basis.size()) != lat.dim) {
    fail("translation basis must have D vectors");
    return report;
  }
  for (const IntVec& v : lat.translation_basis) {
    if (static_cast<int>(v.size()) != lat.dim) {
      fail("translation basis vector has wrong dimension");
      return report;
    }
  }
  if (int_det(basis_columns(lat)) == 0) {
    fail("translation basis is rank-deficient (zero determinant)");
    return report;
  }

  for (int k = 0; k < lat.num_vertex_classes(); ++k) {
    const auto& cls = lat.vertex_classes[static_cast<std::size_t>(k)];
    if (static_cast<int>(cls.representative.size()) != lat.dim) {
      fail("class representative has wrong dimension");
      return report;
    }
    if (cls.steps.empty()) fail("vertex class " + std::to_string(k) + " has no steps");
    for (std::size_t a = 0; a < cls.steps.size(); ++a) {
      for (std::size_t b = a + 1; b < cls.steps.size(); ++b) {
        if (cls.steps[a].offset == cls.steps[b].offset) {
          fail("duplicate step offset in class " + std::to_string(k) +
               " (parallel edges are not supported)");
        }
      }
    }
    for (const StepRule& s : cls.steps) {
      if (static_cast<int>(s.offset.size()) != lat.dim) {
        fail("step offset has wrong dimension");
        return report;
      }
      if (std::all_of(s.offset.begin(), s.offset.end(), [](int c) { return c == 0; })) {
        fail("zero step offset in class " + std::to_string(k));
      }
      if (s.edge_class < 0 || s.edge_class >= lat.num_edge_classes) {
        fail("step edge class out of range in class " + std::to_string(k));
      }
    }
  }
  if (!report.ok()) return report;

  // Representatives must classify to their own index (distinct classes).
  for (int k = 0; k < lat.num_vertex_classes(); ++k) {
    try {
      const int got = classify_vertex(lat, lat.vertex_classes[static_cast<std::size_t>(k)].representative);
      if (got != k) {
        fail("representative of class " + std::to_string(k) + " classifies to class " +
             std::to_string(got));
      }
    } catch (const Error& e) {
      fail(std::string("representative classification failed: ") + e.what());
    }
  }

  // Every step target must land on the lattice.
  for (int k = 0; k < lat.num_vertex_classes(); ++k) {
    const auto& cls = lat.vertex_classes[static_cast<std::size_t>(k)];
    for (const StepRule& s : cls.steps) {
      try {
        classify_vertex(lat, add(cls.representative, s.offset));
      } catch (const Error&) {
        fail("step " + vec_to_string(s.offset) + " from class " + std::to_string(k) +
             " leaves the lattice");
      }
    }
  }
  if (!report.ok()) return report;

  // Symmetries: identity present, class representatives permuted, edge
  // classes preserved.
  const SymmetryRep id = identity_symmetry(lat.dim);
  bool has_identity = false;
  for (const SymmetryRep& sym : lat.symmetries) {
    if (sym.linear == id.linear && on_translation_lattice(lat, sym.shift)) has_identity = true;
  }
  if (lat.symmetries.empty()) fail("symmetry list is empty");
  if (!has_identity) fail("symmetry list does not contain the identity (modulo translations)");

  for (std::size_t si = 0; si < lat.symmetries.size(); ++si) {
    const SymmetryRep& sym = lat.symmetries[si];
    if (static_cast<int>(sym.linear.size()) != lat.dim ||
        static_cast<int>(sym.shift.size()) != lat.dim) {
      fail("symmetry " + std::to_string(si) + " has wrong dimensions");
      continue;
    }
    for (int k = 0; k < lat.num_vertex_classes(); ++k) {
      const auto& cls = lat.vertex_classes[static_cast<std::size_t>(k)];
      int image_class = -1;
      try {
        image_class = classify_vertex(lat, apply_affine(sym, cls.representative));
      } catch (const Error&) {
        fail("symmetry " + std::to_string(si) + " maps representative " + std::to_string(k) +
             " off the lattice");
        continue;
      }
      const auto& image_cls = lat.vertex_classes[static_cast<std::size_t>(image_class)];
      // Image of each outgoing edge must be an outgoing edge of the image
      // class with the same edge class index.
      for (const StepRule& s : cls.steps) {
        const IntVec from = apply_affine(sym, cls.representative);
        const IntVec to = apply_affine(sym, add(cls.representative, s.offset));
        const IntVec image_offset = sub(to, from);
        bool found = false;
        for (const StepRule& t : image_cls.steps) {
          if (t.offset == image_offset) {
            found = true;
            if (t.edge_class != s.edge_class) {
              fail("symmetry " + std::to_string(si) + " maps an edge of class " +
                   lat.edge_class_labels[static_cast<std::size_t>(s.edge_class)] + " to class " +
                   lat.edge_class_labels[static_cast<std::size_t>(t.edge_class)] +
                   " (not weight-preserving)");
            }
            break;
          }
        }
        if (!found) {
          fail("symmetry " + std::to_string(si) + " maps step " + vec_to_string(s.offset) +
               " of class " + std::to_string(k) + " to a non-edge");
        }
      }
    }
  }

  // Closure of the symmetry set under composition, modulo translations.
  for (std::size_t a = 0; a < lat.symmetries.size(); ++a) {
    for (std::size_t b = 0; b < lat.symmetries.size(); ++b) {
      const SymmetryRep& sa = lat.symmetries[a];
      const SymmetryRep& sb = lat.symmetries[b];
      // Composite a(b(v)) = (La Lb) v + (La sb + sa).
      SymmetryRep comp;
      comp.linear.assign(static_cast<std::size_t>(lat.dim), IntVec(static_cast<std::size_t>(lat.dim), 0));
      for (int i = 0; i < lat.dim; ++i) {
        for (int j = 0; j < lat.dim; ++j) {
          long long acc = 0;
          for (int k = 0; k < lat.dim; ++k) {
            acc += static_cast<long long>(sa.linear[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]) *
                   sb.linear[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
          }
          comp.linear[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = static_cast<int>(acc);
        }
      }
      comp.shift = apply_affine(sa, sb.shift);
      bool matched = false;
      for (const SymmetryRep& sc : lat.symmetries) {
        if (sc.linear == comp.linear && on_translation_lattice(lat, sub(comp.shift, sc.shift))) {
          matched = true;
          break;
        }
      }
      if (!matched) {
        fail("symmetry composition " + std::to_string(a) + " o " + std::to_string(b) +
             " is not in the list (modulo translations)");
      }
    }
  }

  // Strong connectivity of the quotient graph on the K vertex classes.
  const int K = lat.num_vertex_classes();
  std::vector<std::vector<bool>> reach(static_cast<std::size_t>(K),
                                       std::vector<bool>(static_cast<std::size_t>(K), false));
  for (int k = 0; k < K; ++k) {
    reach[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] = true;
    const auto& cls = lat.vertex_classes[static_cast<std::size_t>(k)];
    for (const StepRule& s : cls.steps) {
      try {
        const int to = classify_vertex(lat, add(cls.representative, s.offset));
        reach[static_cast<std::size_t>(k)][static_cast<std::size_t>(to)] = true;
      } catch (const Error&) {
        // already reported above
      }
    }
  }
  for (int mid = 0; mid < K; ++mid) {
    for (int i = 0; i < K; ++i) {
      for (int j = 0; j < K; ++j) {
        if (reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(mid)] &&
            reach[static_cast<std::size_t>(mid)][static_cast<std::size_t>(j)]) {
          reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
        }
      }
    }
  }
  for (int i = 0; i < K; ++i) {
    for (int j = 0; j < K; ++j) {
      if (!reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) {
        fail("quotient graph is not strongly connected: class " + std::to_string(i) +
             " cannot reach class " + std::to_string(j));
      }
    }
  }

  return report;
}

}  // namespace sawbound
