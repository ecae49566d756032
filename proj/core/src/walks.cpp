#include "sawbound/walks.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "sawbound/errors.hpp"

namespace sawbound {

namespace {

IntVec add(const IntVec& a, const IntVec& b) {
  IntVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

struct VecHash {
  std::size_t operator()(const IntVec& v) const {
    std::size_t h = 14695981039346656037ULL;
    for (int x : v) {
      h ^= static_cast<std::size_t>(static_cast<unsigned>(x));
      h *= 1099511628211ULL;
    }
    return h;
  }
};

// Undirected edge as an ordered vertex pair.
struct EdgeKey {
  IntVec a, b;

  EdgeKey(IntVec u, IntVec v) {
    if (v < u) std::swap(u, v);
    a = std::move(u);
    b = std::move(v);
  }
  bool operator==(const EdgeKey&) const = default;
};

struct EdgeHash {
  std::size_t operator()(const EdgeKey& e) const {
    VecHash h;
    return h(e.a) * 1099511628211ULL ^ h(e.b);
  }
};

using VertexSet = std::unordered_set<IntVec, VecHash>;
using EdgeSet = std::unordered_set<EdgeKey, EdgeHash>;

// Class-to-class transitions per step rule, so traversal never needs to
// classify coordinates in the hot path.
struct Navigator {
  const LatticeSpec* lattice;
  std::vector<std::vector<int>> step_target_class;  // [class][rule index]

  explicit Navigator(const LatticeSpec& lat) : lattice(&lat) {
    step_target_class.resize(lat.vertex_classes.size());
    for (int k = 0; k < lat.num_vertex_classes(); ++k) {
      const auto& cls = lat.vertex_classes[static_cast<std::size_t>(k)];
      auto& row = step_target_class[static_cast<std::size_t>(k)];
      row.reserve(cls.steps.size());
      for (const StepRule& rule : cls.steps) {
        row.push_back(classify_vertex(lat, add(cls.representative, rule.offset)));
      }
    }
  }
};

// Shared self-avoidance bookkeeping for one traversal.
struct Avoidance {
  WalkMode mode;
  VertexSet visited;
  EdgeSet used_edges;

  explicit Avoidance(WalkMode m) : mode(m) {}

  void seed(const std::vector<IntVec>& vertices) {
    if (mode == WalkMode::kSaw) {
      for (const IntVec& v : vertices) visited.insert(v);
    } else {
      for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
        used_edges.insert(EdgeKey(vertices[i], vertices[i + 1]));
      }
    }
  }

  bool try_push(const IntVec& from, const IntVec& to) {
    if (mode == WalkMode::kSaw) return visited.insert(to).second;
    return used_edges.insert(EdgeKey(from, to)).second;
  }

  void pop(const IntVec& from, const IntVec& to) {
    if (mode == WalkMode::kSaw) {
      visited.erase(to);
    } else {
      used_edges.erase(EdgeKey(from, to));
    }
  }
};

void spend(std::uint64_t& budget) {
  if (budget == 0) throw BudgetExceededError("walk enumeration budget exceeded");
  --budget;
}

}  // namespace

std::string_view to_string(WalkMode mode) {
  return mode == WalkMode::kSaw ? "saw" : "sat";
}

WalkMode walk_mode_from_string(std::string_view s) {
  if (s == "saw") return WalkMode::kSaw;
  if (s == "sat") return WalkMode::kSat;
  throw PreconditionError("unknown walk mode: " + std::string(s));
}

std::vector<IntVec> walk_vertices(const LatticeSpec& lattice, const Walk& walk) {
  std::vector<IntVec> verts;
  verts.reserve(walk.steps.size() + 1);
  verts.push_back(lattice.vertex_classes[static_cast<std::size_t>(walk.start_class)].representative);
  for (const WalkStep& s : walk.steps) verts.push_back(add(verts.back(), s.offset));
  return verts;
}

bool walk_valid(const LatticeSpec& lattice, const Walk& walk, WalkMode mode) {
  if (walk.start_class < 0 || walk.start_class >= lattice.num_vertex_classes()) return false;
  const auto verts = walk_vertices(lattice, walk);
  for (std::size_t i = 0; i < walk.steps.size(); ++i) {
    int cls = 0;
    try {
      cls = classify_vertex(lattice, verts[i]);
    } catch (const Error&) {
      return false;
    }
    const auto& rules = lattice.vertex_classes[static_cast<std::size_t>(cls)].steps;
    const WalkStep& s = walk.steps[i];
    const bool found = std::any_of(rules.begin(), rules.end(), [&s](const StepRule& r) {
      return r.offset == s.offset && r.edge_class == s.edge_class;
    });
    if (!found) return false;
  }
  if (mode == WalkMode::kSaw) {
    VertexSet seen;
    for (const IntVec& v : verts) {
      if (!seen.insert(v).second) return false;
    }
  } else {
    EdgeSet seen;
    for (std::size_t i = 0; i + 1 < verts.size(); ++i) {
      if (!seen.insert(EdgeKey(verts[i], verts[i + 1])).second) return false;
    }
  }
  return true;
}

WalkKey walk_key(const Walk& walk) {
  WalkKey key;
  key.start_class = walk.start_class;
  key.offsets.reserve(walk.steps.size() * (walk.steps.empty() ? 0 : walk.steps[0].offset.size()));
  for (const WalkStep& s : walk.steps) {
    key.offsets.insert(key.offsets.end(), s.offset.begin(), s.offset.end());
  }
  return key;
}

Walk apply_symmetry(const LatticeSpec& lattice, const SymmetryRep& sym, const Walk& walk) {
  const auto verts = walk_vertices(lattice, walk);
  const IntVec image_start = apply_affine(sym, verts[0]);
  Walk out;
  out.start_class = classify_vertex(lattice, image_start);  // throws if off lattice
  out.steps.reserve(walk.steps.size());
  IntVec prev = image_start;
  for (std::size_t i = 0; i < walk.steps.size(); ++i) {
    IntVec next = apply_affine(sym, verts[i + 1]);
    IntVec offset(next.size());
    for (std::size_t j = 0; j < next.size(); ++j) offset[j] = next[j] - prev[j];
    out.steps.push_back({std::move(offset), walk.steps[i].edge_class});
    prev = std::move(next);
  }
  return out;
}

WalkKey canonical_key(const LatticeSpec& lattice, const Walk& walk) {
  return walk_key(canonical_form(lattice, walk));
}

Walk canonical_form(const LatticeSpec& lattice, const Walk& walk) {
  bool have = false;
  Walk best;
  WalkKey best_key;
  for (const SymmetryRep& sym : lattice.symmetries) {
    Walk image = apply_symmetry(lattice, sym, walk);
    WalkKey key = walk_key(image);
    if (!have || key < best_key) {
      have = true;
      best = std::move(image);
      best_key = std::move(key);
    }
  }
  if (!have) throw PreconditionError("lattice has no symmetries");
  return best;
}

std::vector<Walk> enumerate_walks(const LatticeSpec& lattice, int m, WalkMode mode,
                                  std::uint64_t budget) {
  if (m < 0) throw PreconditionError("walk length must be nonnegative");
  const Navigator nav(lattice);

  struct Item {
    Walk walk;
    std::vector<IntVec> verts;
    int end_class;
  };

  std::vector<Item> level;
  for (int k = 0; k < lattice.num_vertex_classes(); ++k) {
    Item item;
    item.walk.start_class = k;
    item.verts = {lattice.vertex_classes[static_cast<std::size_t>(k)].representative};
    item.end_class = k;
    level.push_back(std::move(item));
  }

  for (int step = 0; step < m; ++step) {
    std::vector<Item> next_level;
    for (const Item& item : level) {
      const auto& rules = lattice.vertex_classes[static_cast<std::size_t>(item.end_class)].steps;
      const auto& targets = nav.step_target_class[static_cast<std::size_t>(item.end_class)];
      Avoidance avoid(mode);
      avoid.seed(item.verts);
      for (std::size_t ri = 0; ri < rules.size(); ++ri) {
        spend(budget);
        IntVec target = add(item.verts.back(), rules[ri].offset);
        if (!avoid.try_push(item.verts.back(), target)) continue;
        avoid.pop(item.verts.back(), target);
        Item child;
        child.walk = item.walk;
        child.walk.steps.push_back({rules[ri].offset, rules[ri].edge_class});
        child.verts = item.verts;
        child.verts.push_back(std::move(target));
        child.end_class = targets[ri];
        next_level.push_back(std::move(child));
      }
    }
    level = std::move(next_level);
  }

  std::vector<Walk> out;
  out.reserve(level.size());
  for (Item& item : level) out.push_back(std::move(item.walk));
  return out;
}

IntVec weight_exponents(const Walk& walk, int num_edge_classes) {
  IntVec e(static_cast<std::size_t>(num_edge_classes), 0);
  for (const WalkStep& s : walk.steps) {
    if (s.edge_class < 0 || s.edge_class >= num_edge_classes) {
      throw PreconditionError("walk step edge class out of range");
    }
    e[static_cast<std::size_t>(s.edge_class)] += 1;
  }
  return e;
}

Monomial weight_monomial(const Walk& walk, int num_edge_classes) {
  return Monomial(weight_exponents(walk, num_edge_classes));
}

namespace {

// Depth-first weighted traversal; weights are accumulated one completed
// walk at a time, children in rule order. This order is part of the
// weighted_count contract.
struct WeightedDfs {
  const LatticeSpec* lattice;
  const Navigator* nav;
  std::span<const double> z;
  int target_depth;
  Avoidance avoid;
  std::uint64_t* budget;
  double total = 0;

  WeightedDfs(const LatticeSpec& lat, const Navigator& n, std::span<const double> zz,
              int depth, WalkMode mode, std::uint64_t* b)
      : lattice(&lat), nav(&n), z(zz), target_depth(depth), avoid(mode), budget(b) {}

  void run(const IntVec& v, int cls, int depth, double weight) {
    if (depth == target_depth) {
      total += weight;
      return;
    }
    const auto& rules = lattice->vertex_classes[static_cast<std::size_t>(cls)].steps;
    const auto& targets = nav->step_target_class[static_cast<std::size_t>(cls)];
    for (std::size_t ri = 0; ri < rules.size(); ++ri) {
      spend(*budget);
      IntVec target = add(v, rules[ri].offset);
      if (!avoid.try_push(v, target)) continue;
      run(target, targets[ri], depth + 1,
          weight * z[static_cast<std::size_t>(rules[ri].edge_class)]);
      avoid.pop(v, target);
    }
  }
};

}  // namespace

double weighted_count(const LatticeSpec& lattice, int n, int k, WalkMode mode,
                      std::span<const double> z, std::uint64_t budget) {
  if (n < 1) throw PreconditionError("weighted_count requires n >= 1");
  if (k < 0 || k >= lattice.num_vertex_classes()) {
    throw PreconditionError("vertex class index out of range");
  }
  if (static_cast<int>(z.size()) != lattice.num_edge_classes) {
    throw PreconditionError("weight vector dimension mismatch");
  }
  for (double zi : z) {
    if (!(zi > 0)) throw PreconditionError("weights must be strictly positive");
  }
  const Navigator nav(lattice);
  WeightedDfs dfs(lattice, nav, z, n, mode, &budget);
  const IntVec& start = lattice.vertex_classes[static_cast<std::size_t>(k)].representative;
  dfs.avoid.seed({start});
  dfs.run(start, k, 0, 1.0);
  return dfs.total;
}

Partition partition_walks(const LatticeSpec& lattice, int m, WalkMode mode,
                          std::uint64_t budget) {
  Partition part;
  part.m = m;
  part.mode = mode;

  const Monomial unit = Monomial::unit(lattice.num_edge_classes);
  if (m == 0) {
    // One class per vertex-class representative, each a 0-step walk of
    // weight 1. The finer-than-orbit split is deliberate.
    for (int k = 0; k < lattice.num_vertex_classes(); ++k) {
      PartitionClass cls;
      cls.canonical_rep.start_class = k;
      cls.size = 1;
      cls.rep_weight = unit;
      part.classes.push_back(std::move(cls));
    }
    return part;
  }

  const auto walks = enumerate_walks(lattice, m, mode, budget);
  std::map<WalkKey, PartitionClass> classes;
  for (const Walk& w : walks) {
    Walk canon = canonical_form(lattice, w);
    WalkKey key = walk_key(canon);
    auto it = classes.find(key);
    if (it == classes.end()) {
      PartitionClass cls;
      cls.rep_weight = weight_monomial(canon, lattice.num_edge_classes);
      cls.canonical_rep = std::move(canon);
      cls.size = 1;
      classes.emplace(std::move(key), std::move(cls));
    } else {
      it->second.size += 1;
    }
  }
  part.classes.reserve(classes.size());
  for (auto& [key, cls] : classes) part.classes.push_back(std::move(cls));
  return part;
}

std::string format_walk(const Walk& walk) {
  std::ostringstream out;
  out << walk.start_class;
  for (const WalkStep& s : walk.steps) {
    out << " (";
    for (std::size_t i = 0; i < s.offset.size(); ++i) out << s.offset[i] << ',';
    out << s.edge_class << ')';
  }
  return out.str();
}

void dump_walks(std::ostream& out, std::span<const Walk> walks) {
  for (const Walk& w : walks) out << format_walk(w) << '\n';
}

}  // namespace sawbound
