#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "oracle_enum.hpp"
#include "sawbound/errors.hpp"
#include "sawbound/walks.hpp"

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

std::vector<double> random_weights(Rng& rng, int d) {
  std::vector<double> z(d);
  for (double& zi : z) zi = rng.unit();
  return z;
}

}  // namespace

TEST_CASE("square walk counts match the reference enumerator") {
  const LatticeSpec lat = builtin_lattice("square", "general");
  const auto oracle_lat = oracle::square_general();
  const std::int64_t expected[] = {4, 12, 36, 100, 284, 780};
  for (int n = 1; n <= 6; ++n) {
    const auto walks = enumerate_walks(lat, n, WalkMode::kSaw);
    const std::int64_t reference = oracle::count_walks(oracle_lat, {0, 0}, n, false);
    CHECK(static_cast<std::int64_t>(walks.size()) == reference);
    CHECK(reference == expected[n - 1]);
  }
}

TEST_CASE("hexagonal walk counts match the reference enumerator per class") {
  const LatticeSpec lat = builtin_lattice("hexagonal", "general");
  const auto oracle_lat = oracle::hexagonal_general();
  for (int n = 1; n <= 6; ++n) {
    const auto walks = enumerate_walks(lat, n, WalkMode::kSaw);
    std::int64_t per_class[2] = {0, 0};
    for (const Walk& w : walks) per_class[w.start_class] += 1;
    CHECK(per_class[0] == oracle::count_walks(oracle_lat, {0, 0}, n, false));
    CHECK(per_class[1] == oracle::count_walks(oracle_lat, {1, 0}, n, false));
  }
  CHECK(enumerate_walks(lat, 2, WalkMode::kSaw).size() == 12);
}

TEST_CASE("trail counts match the reference enumerator") {
  const LatticeSpec lat = builtin_lattice("square", "general");
  const auto oracle_lat = oracle::square_general();
  for (int n = 1; n <= 6; ++n) {
    const auto trails = enumerate_walks(lat, n, WalkMode::kSat);
    CHECK(static_cast<std::int64_t>(trails.size()) ==
          oracle::count_walks(oracle_lat, {0, 0}, n, true));
  }
}

TEST_CASE("every SAW is an SAT") {
  for (const auto& [name, scheme] : builtin_lattice_names()) {
    const LatticeSpec lat = builtin_lattice(name, scheme);
    for (int n = 1; n <= 4; ++n) {
      const auto saws = enumerate_walks(lat, n, WalkMode::kSaw);
      const auto sats = enumerate_walks(lat, n, WalkMode::kSat);
      CHECK(saws.size() <= sats.size());
      std::set<WalkKey> sat_keys;
      std::map<WalkKey, int> sat_multi;
      for (const Walk& w : sats) sat_multi[walk_key(w)] += 1;
      for (const Walk& w : saws) {
        CHECK(sat_multi.count(walk_key(w)) == 1);
      }
    }
  }
}

TEST_CASE("m=0 yields one single-vertex walk per class") {
  const LatticeSpec hex = builtin_lattice("hexagonal", "general");
  const auto walks = enumerate_walks(hex, 0, WalkMode::kSaw);
  REQUIRE(walks.size() == 2);
  CHECK(walks[0].steps.empty());
  CHECK(walks[0].start_class == 0);
  CHECK(walks[1].start_class == 1);

  const Partition part = partition_walks(hex, 0, WalkMode::kSaw);
  REQUIRE(part.t() == 2);
  CHECK(part.classes[0].size == 1);
  CHECK(part.classes[1].size == 1);
  CHECK(part.classes[0].rep_weight == Monomial::unit(3));
}

TEST_CASE("canonical keys identify symmetric walks") {
  const LatticeSpec square = builtin_lattice("square", "general");
  Walk east{0, {{{1, 0}, 0}}};
  Walk west{0, {{{-1, 0}, 0}}};
  Walk north{0, {{{0, 1}, 1}}};
  CHECK(canonical_key(square, east) == canonical_key(square, west));
  CHECK(canonical_key(square, east) != canonical_key(square, north));

  const LatticeSpec tri = builtin_lattice("triangular", "xz");
  Walk e1{0, {{{1, 0}, 0}}};
  Walk e2{0, {{{0, 1}, 0}}};
  CHECK(canonical_key(tri, e1) == canonical_key(tri, e2));
}

TEST_CASE("canonical_form is idempotent and symmetry-invariant") {
  Rng rng{31337};
  for (const auto& [name, scheme] : builtin_lattice_names()) {
    const LatticeSpec lat = builtin_lattice(name, scheme);
    for (const Walk& w : enumerate_walks(lat, 3, WalkMode::kSaw)) {
      const Walk canon = canonical_form(lat, w);
      CHECK(canonical_form(lat, canon) == canon);
      for (const SymmetryRep& sym : lat.symmetries) {
        CHECK(canonical_key(lat, apply_symmetry(lat, sym, w)) == canonical_key(lat, w));
      }
    }
  }
}

TEST_CASE("partition shapes for one-step walks") {
  const Partition square = partition_walks(builtin_lattice("square", "general"), 1, WalkMode::kSaw);
  REQUIRE(square.t() == 2);
  CHECK(square.classes[0].size == 2);
  CHECK(square.classes[1].size == 2);

  const Partition cubic = partition_walks(builtin_lattice("cubic", "general"), 1, WalkMode::kSaw);
  REQUIRE(cubic.t() == 3);
  for (const auto& cls : cubic.classes) CHECK(cls.size == 2);

  // Orbits are {+-(1,1)} and {+-e1, +-e2}; the diagonal pair sorts first
  // because its canonical key (-1,-1) precedes (-1,0).
  const Partition tri = partition_walks(builtin_lattice("triangular", "xz"), 1, WalkMode::kSaw);
  REQUIRE(tri.t() == 2);
  CHECK(tri.classes[0].size == 2);
  CHECK(tri.classes[1].size == 4);

  const Partition hex = partition_walks(builtin_lattice("hexagonal", "general"), 1, WalkMode::kSaw);
  REQUIRE(hex.t() == 3);
  for (const auto& cls : hex.classes) CHECK(cls.size == 2);
}

TEST_CASE("partition classes are weight-homogeneous and cover everything") {
  for (const auto& [name, scheme] : builtin_lattice_names()) {
    const LatticeSpec lat = builtin_lattice(name, scheme);
    for (int m = 1; m <= 3; ++m) {
      const auto walks = enumerate_walks(lat, m, WalkMode::kSaw);
      const Partition part = partition_walks(lat, m, WalkMode::kSaw);
      std::int64_t covered = 0;
      for (const auto& cls : part.classes) covered += cls.size;
      CHECK(covered == static_cast<std::int64_t>(walks.size()));

      std::map<WalkKey, const PartitionClass*> by_key;
      for (const auto& cls : part.classes) by_key[walk_key(cls.canonical_rep)] = &cls;
      for (const Walk& w : walks) {
        const auto it = by_key.find(canonical_key(lat, w));
        REQUIRE(it != by_key.end());
        CHECK(weight_monomial(w, lat.num_edge_classes) == it->second->rep_weight);
      }
      // Classes are listed in ascending canonical-key order.
      for (int i = 0; i + 1 < part.t(); ++i) {
        CHECK(walk_key(part.classes[i].canonical_rep) <
              walk_key(part.classes[i + 1].canonical_rep));
      }
    }
  }
}

TEST_CASE("weight exponents") {
  Walk walk{0, {{{1, 0}, 0}, {{0, 1}, 1}, {{1, 0}, 0}}};
  CHECK(weight_exponents(walk, 2) == IntVec{2, 1});
  CHECK(weight_exponents(Walk{0, {}}, 2) == IntVec{0, 0});

  // Hexagonal (0,0) -> (1,0) -> (1,-1): an x edge then a (0,-1) edge, which
  // carries the class of direction (0,1).
  const LatticeSpec hex = builtin_lattice("hexagonal", "general");
  Walk hw{0, {{{1, 0}, 0}, {{0, -1}, 1}}};
  CHECK(walk_valid(hex, hw, WalkMode::kSaw));
  CHECK(weight_exponents(hw, 3) == IntVec{1, 1, 0});
}

TEST_CASE("weighted counts match the reference enumerator bit for bit") {
  Rng rng{424242};
  struct Pair {
    LatticeSpec lat;
    oracle::Lattice ref;
  };
  std::vector<Pair> pairs;
  pairs.push_back({builtin_lattice("square", "general"), oracle::square_general()});
  pairs.push_back({builtin_lattice("hexagonal", "general"), oracle::hexagonal_general()});
  pairs.push_back({builtin_lattice("hexagonal", "xy-equal"), oracle::hexagonal_xy_equal()});
  pairs.push_back({builtin_lattice("triangular", "xz"), oracle::triangular_xz()});
  pairs.push_back({builtin_lattice("cubic", "xy-equal"), oracle::cubic_xy_equal()});

  for (const Pair& p : pairs) {
    for (int trial = 0; trial < 3; ++trial) {
      const auto z = random_weights(rng, p.lat.num_edge_classes);
      for (int n = 1; n <= 5; ++n) {
        for (int k = 0; k < p.lat.num_vertex_classes(); ++k) {
          for (WalkMode mode : {WalkMode::kSaw, WalkMode::kSat}) {
            const double got = weighted_count(p.lat, n, k, mode, z);
            const double want = oracle::weighted_sum(p.ref, p.ref.reps[k], n,
                                                     mode == WalkMode::kSat, z);
            CHECK(got == want);  // identical summation order, exact match
          }
        }
      }
    }
  }
}

TEST_CASE("weighted count closed form for two square steps") {
  const LatticeSpec lat = builtin_lattice("square", "general");
  Rng rng{7};
  for (int trial = 0; trial < 10; ++trial) {
    const double x = rng.unit(), y = rng.unit();
    const double z[] = {x, y};
    const double expected = 2 * x * x + 8 * x * y + 2 * y * y;
    CHECK(weighted_count(lat, 2, 0, WalkMode::kSaw, z) ==
          doctest::Approx(expected).epsilon(1e-13));
  }
  const double ones[] = {1.0, 1.0};
  CHECK(weighted_count(lat, 1, 0, WalkMode::kSaw, ones) == 4.0);
  CHECK(weighted_count(lat, 3, 0, WalkMode::kSaw, ones) == 36.0);
}

TEST_CASE("weighted submultiplicativity at random weights") {
  Rng rng{99};
  for (const char* name : {"square", "hexagonal"}) {
    const LatticeSpec lat = builtin_lattice(name, "general");
    for (int trial = 0; trial < 5; ++trial) {
      const auto z = random_weights(rng, lat.num_edge_classes);
      for (int n1 = 1; n1 <= 5; ++n1) {
        for (int n2 = 1; n1 + n2 <= 6; ++n2) {
          double max_n2 = 0;
          for (int k = 0; k < lat.num_vertex_classes(); ++k) {
            max_n2 = std::max(max_n2, weighted_count(lat, n2, k, WalkMode::kSaw, z));
          }
          for (int k = 0; k < lat.num_vertex_classes(); ++k) {
            const double lhs = weighted_count(lat, n1 + n2, k, WalkMode::kSaw, z);
            const double rhs = weighted_count(lat, n1, k, WalkMode::kSaw, z) * max_n2;
            CHECK(lhs <= rhs * (1 + 1e-9));
          }
        }
      }
    }
  }
}

TEST_CASE("enumeration budget is enforced") {
  const LatticeSpec lat = builtin_lattice("square", "general");
  CHECK_THROWS_AS(enumerate_walks(lat, 6, WalkMode::kSaw, 10), BudgetExceededError);
  const double ones[] = {1.0, 1.0};
  CHECK_THROWS_AS(weighted_count(lat, 6, 0, WalkMode::kSaw, ones, 10), BudgetExceededError);
}

TEST_CASE("weighted_count rejects bad arguments") {
  const LatticeSpec lat = builtin_lattice("square", "general");
  const double ones[] = {1.0, 1.0};
  const double bad[] = {1.0, 0.0};
  CHECK_THROWS_AS(weighted_count(lat, 0, 0, WalkMode::kSaw, ones), PreconditionError);
  CHECK_THROWS_AS(weighted_count(lat, 1, 5, WalkMode::kSaw, ones), PreconditionError);
  CHECK_THROWS_AS(weighted_count(lat, 1, 0, WalkMode::kSaw, bad), PreconditionError);
}

TEST_CASE("walk dump format") {
  Walk walk{1, {{{1, 0}, 0}, {{0, -1}, 1}}};
  CHECK(format_walk(walk) == "1 (1,0,0) (0,-1,1)");
  std::ostringstream out;
  const std::vector<Walk> walks = {walk, Walk{0, {}}};
  dump_walks(out, walks);
  CHECK(out.str() == "1 (1,0,0) (0,-1,1)\n0\n");
}
