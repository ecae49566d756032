#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "sawbound/errors.hpp"
#include "sawbound/gmatrix.hpp"
#include "sawbound/spectral.hpp"

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

// Square lattice with a reduced symmetry list; refines the walk partition
// without changing the dominant eigenvalue at the all-ones point.
LatticeSpec square_with_symmetries(bool identity_only) {
  LatticeSpec lat = builtin_lattice("square", "general");
  SymmetryRep id = identity_symmetry(2);
  SymmetryRep neg;
  neg.linear = {{-1, 0}, {0, -1}};
  neg.shift = {0, 0};
  lat.symmetries = identity_only ? std::vector<SymmetryRep>{id}
                                 : std::vector<SymmetryRep>{id, neg};
  return lat;
}

}  // namespace

TEST_CASE("square (1,2) matrix is [[x,2y],[2x,y]]") {
  const GMatrix g = build_gmatrix(builtin_lattice("square", "general"), 1, 2, WalkMode::kSaw);
  REQUIRE(g.t() == 2);
  CHECK(g.entry(0, 0) == Poly::from_monomial(Monomial({1, 0}), 1));
  CHECK(g.entry(0, 1) == Poly::from_monomial(Monomial({0, 1}), 2));
  CHECK(g.entry(1, 0) == Poly::from_monomial(Monomial({1, 0}), 2));
  CHECK(g.entry(1, 1) == Poly::from_monomial(Monomial({0, 1}), 1));

  // Three non-backtracking continuations per row at the all-ones point.
  for (int r = 0; r < 2; ++r) {
    BigInt row_sum = 0;
    for (int s = 0; s < 2; ++s) row_sum += g.entry(r, s).coefficient_sum();
    CHECK(row_sum == 3);
  }
}

TEST_CASE("m=0 rows sum the single-step weights by target class") {
  const GMatrix sq = build_gmatrix(builtin_lattice("square", "general"), 0, 1, WalkMode::kSaw);
  REQUIRE(sq.t() == 1);
  Poly expected(2);
  expected.add_term(Monomial({1, 0}), 2);
  expected.add_term(Monomial({0, 1}), 2);
  CHECK(sq.entry(0, 0) == expected);

  const GMatrix hex = build_gmatrix(builtin_lattice("hexagonal", "general"), 0, 1, WalkMode::kSaw);
  REQUIRE(hex.t() == 2);
  Poly all_three(3);
  all_three.add_term(Monomial({1, 0, 0}), 1);
  all_three.add_term(Monomial({0, 1, 0}), 1);
  all_three.add_term(Monomial({0, 0, 1}), 1);
  CHECK(hex.entry(0, 0).is_zero());
  CHECK(hex.entry(0, 1) == all_three);
  CHECK(hex.entry(1, 0) == all_three);
  CHECK(hex.entry(1, 1).is_zero());
}

TEST_CASE("entry monomials are homogeneous of degree n-m") {
  struct Case {
    const char* lattice;
    const char* scheme;
    WalkMode mode;
    int m, n;
  };
  const Case cases[] = {
      {"square", "general", WalkMode::kSaw, 1, 4},
      {"square", "general", WalkMode::kSat, 1, 3},
      {"cubic", "xy-equal", WalkMode::kSaw, 2, 3},
      {"triangular", "xz", WalkMode::kSat, 1, 3},
      {"hexagonal", "general", WalkMode::kSaw, 1, 3},
      {"hexagonal", "xy-equal", WalkMode::kSat, 2, 4},
  };
  for (const Case& c : cases) {
    const GMatrix g = build_gmatrix(builtin_lattice(c.lattice, c.scheme), c.m, c.n, c.mode);
    for (const Poly& entry : g.entries) {
      for (const auto& [mono, coeff] : entry.terms()) {
        CHECK(mono.degree() == c.n - c.m);
        CHECK(coeff > 0);
      }
    }
  }
}

TEST_CASE("row sums at the all-ones point count the extensions") {
  // (3,4) has n - m < m, so the classified tail reaches into the prefix.
  const LatticeSpec square = builtin_lattice("square", "general");
  {
    const GMatrix g = build_gmatrix(square, 3, 4, WalkMode::kSaw);
    const auto all = enumerate_walks(square, 4, WalkMode::kSaw);
    for (int r = 0; r < g.t(); ++r) {
      const Walk& rep = g.partition.classes[r].canonical_rep;
      std::int64_t extensions = 0;
      for (const Walk& w : all) {
        if (w.start_class != rep.start_class) continue;
        if (std::equal(rep.steps.begin(), rep.steps.end(), w.steps.begin())) extensions += 1;
      }
      BigInt row_sum = 0;
      for (int s = 0; s < g.t(); ++s) row_sum += g.entry(r, s).coefficient_sum();
      CHECK(row_sum == extensions);
    }
  }

  const LatticeSpec lat = builtin_lattice("hexagonal", "general");
  for (const auto [m, n] : {std::pair{1, 3}, std::pair{2, 4}}) {
    const GMatrix g = build_gmatrix(lat, m, n, WalkMode::kSaw);
    const auto all = enumerate_walks(lat, n, WalkMode::kSaw);
    for (int r = 0; r < g.t(); ++r) {
      const Walk& rep = g.partition.classes[r].canonical_rep;
      std::int64_t extensions = 0;
      for (const Walk& w : all) {
        if (w.start_class != rep.start_class) continue;
        if (std::equal(rep.steps.begin(), rep.steps.end(), w.steps.begin())) extensions += 1;
      }
      BigInt row_sum = 0;
      for (int s = 0; s < g.t(); ++s) row_sum += g.entry(r, s).coefficient_sum();
      CHECK(row_sum == extensions);
    }
  }
}

TEST_CASE("chaining bound: G(1,3) <= G(1,2)^2 entry-wise at positive points") {
  const LatticeSpec lat = builtin_lattice("square", "general");
  const GMatrix g2 = build_gmatrix(lat, 1, 2, WalkMode::kSaw);
  const GMatrix g3 = build_gmatrix(lat, 1, 3, WalkMode::kSaw);
  Rng rng{1234};
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<double> z = {rng.unit(), rng.unit()};
    const DenseMatrix a2 = eval_at(g2, z);
    const DenseMatrix a3 = eval_at(g3, z);
    for (int r = 0; r < 2; ++r) {
      for (int s = 0; s < 2; ++s) {
        double squared = 0;
        for (int u = 0; u < 2; ++u) squared += a2.at(r, u) * a2.at(u, s);
        CHECK(a3.at(r, s) <= squared * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("refining the partition preserves the eigenvalue at the ones point") {
  const std::vector<double> ones = {1.0, 1.0};
  for (const auto [m, n] : {std::pair{1, 2}, std::pair{1, 3}}) {
    const GMatrix full = build_gmatrix(builtin_lattice("square", "general"), m, n, WalkMode::kSaw);
    const GMatrix pair_sym = build_gmatrix(square_with_symmetries(false), m, n, WalkMode::kSaw);
    const GMatrix trivial = build_gmatrix(square_with_symmetries(true), m, n, WalkMode::kSaw);
    CHECK(trivial.t() >= full.t());

    const CertifiedBound a = dominant_eigenvalue(eval_at(full, ones));
    const CertifiedBound b = dominant_eigenvalue(eval_at(pair_sym, ones));
    const CertifiedBound c = dominant_eigenvalue(eval_at(trivial, ones));
    CHECK(std::abs(a.value - b.value) <= a.width() + b.width() + 1e-9);
    CHECK(std::abs(a.value - c.value) <= a.width() + c.width() + 1e-9);
  }
}

TEST_CASE("matrix_info summarizes the build") {
  const GMatrix g = build_gmatrix(builtin_lattice("square", "general"), 1, 2, WalkMode::kSaw);
  const MatrixInfo info = matrix_info(g);
  CHECK(info.t == 2);
  CHECK(info.nonzero_entries == 4);
  CHECK(info.entry_degree == 1);
  CHECK(info.class_sizes == std::vector<std::int64_t>{2, 2});

  const GMatrix g3 = build_gmatrix(builtin_lattice("square", "general"), 1, 3, WalkMode::kSaw);
  CHECK(matrix_info(g3).entry_degree == 2);
}

TEST_CASE("build preconditions and budget") {
  const LatticeSpec lat = builtin_lattice("square", "general");
  CHECK_THROWS_AS(build_gmatrix(lat, 2, 1, WalkMode::kSaw), PreconditionError);
  CHECK_THROWS_AS(build_gmatrix(lat, 2, 2, WalkMode::kSaw), PreconditionError);
  CHECK_THROWS_AS(build_gmatrix(lat, 1, 8, WalkMode::kSaw, /*budget=*/50), BudgetExceededError);
}

TEST_CASE("threaded build matches the sequential build") {
  const LatticeSpec lat = builtin_lattice("cubic", "general");
  const GMatrix seq = build_gmatrix(lat, 1, 3, WalkMode::kSaw, kDefaultBuildBudget, 1);
  const GMatrix par = build_gmatrix(lat, 1, 3, WalkMode::kSaw, kDefaultBuildBudget, 4);
  CHECK(seq == par);
}

TEST_CASE("save/load round-trip is structurally exact") {
  for (const auto& [name, scheme, mode, m, n] :
       {std::tuple{"square", "general", WalkMode::kSaw, 1, 3},
        std::tuple{"hexagonal", "general", WalkMode::kSat, 1, 3}}) {
    const GMatrix g = build_gmatrix(builtin_lattice(name, scheme), m, n, mode);
    std::ostringstream out;
    save_gmatrix(g, out);
    std::istringstream in(out.str());
    const GMatrix loaded = load_gmatrix(in);
    CHECK(loaded == g);
    CHECK(matrix_info(loaded).nonzero_entries == matrix_info(g).nonzero_entries);

    std::ostringstream out2;
    save_gmatrix(loaded, out2);
    CHECK(out.str() == out2.str());
  }
}

TEST_CASE("loader rejects damaged files") {
  const GMatrix g = build_gmatrix(builtin_lattice("square", "general"), 1, 3, WalkMode::kSaw);
  std::ostringstream out;
  save_gmatrix(g, out);
  const std::string text = out.str();

  SUBCASE("truncation") {
    std::istringstream in(text.substr(0, text.size() * 2 / 3));
    CHECK_THROWS_AS(load_gmatrix(in), ParseError);
  }
  SUBCASE("edited coefficient fails the checksum") {
    std::string bad = text;
    const auto pos = bad.find("2 * x");
    REQUIRE(pos != std::string::npos);
    bad[pos] = '3';
    std::istringstream in(bad);
    CHECK_THROWS_AS(load_gmatrix(in), ParseError);
  }
  SUBCASE("version bump is rejected") {
    std::string bad = text;
    const auto pos = bad.find("sawbound-gmatrix 1");
    bad.replace(pos, 18, "sawbound-gmatrix 9");
    std::istringstream in(bad);
    CHECK_THROWS_AS(load_gmatrix(in), ParseError);
  }
  SUBCASE("not a matrix file") {
    std::istringstream in(std::string("hello\n"));
    CHECK_THROWS_AS(load_gmatrix(in), ParseError);
  }
}
