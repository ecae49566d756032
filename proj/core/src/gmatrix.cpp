#include "sawbound/gmatrix.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "sawbound/errors.hpp"
#include "sawbound/parallel.hpp"

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

// Tail classifier: raw walk key of every m-step walk -> partition class.
// Precomputed once so the DFS never symmetrizes tails.
struct TailClassifier {
  int m;
  std::map<WalkKey, int> by_raw_key;

  TailClassifier(const LatticeSpec& lattice, const Partition& partition,
                 std::uint64_t budget)
      : m(partition.m) {
    if (m == 0) return;  // classified by start class directly
    std::map<WalkKey, int> canon_to_index;
    for (int i = 0; i < partition.t(); ++i) {
      canon_to_index[walk_key(partition.classes[static_cast<std::size_t>(i)].canonical_rep)] = i;
    }
    for (const Walk& w : enumerate_walks(lattice, m, partition.mode, budget)) {
      const auto it = canon_to_index.find(canonical_key(lattice, w));
      if (it == canon_to_index.end()) {
        throw PreconditionError("partition does not cover an enumerated walk");
      }
      by_raw_key[walk_key(w)] = it->second;
    }
  }

  int classify(const Walk& tail) const {
    if (m == 0) return tail.start_class;
    const auto it = by_raw_key.find(walk_key(tail));
    if (it == by_raw_key.end()) throw PreconditionError("tail is not a known m-step walk");
    return it->second;
  }
};

void spend(std::atomic<std::uint64_t>& budget) {
  // Relaxed is fine: the budget is a resource guard, not a synchronization
  // point, and a small overshoot across workers is acceptable.
  if (budget.fetch_sub(1, std::memory_order_relaxed) == 0) {
    budget.store(0);
    throw BudgetExceededError("matrix build budget exceeded");
  }
}

// One row of the matrix: all n-step extensions of the class representative,
// explicit-stack depth-first.
void build_row(const LatticeSpec& lattice, const Partition& partition,
               const TailClassifier& tails, int r, int n, WalkMode mode,
               std::atomic<std::uint64_t>& budget, std::vector<Poly>& row_out) {
  const int m = partition.m;
  const int d = lattice.num_edge_classes;
  const Walk& rep = partition.classes[static_cast<std::size_t>(r)].canonical_rep;

  // Absolute path vertices and per-step metadata; slots [0, m) hold the
  // representative prefix, slots [m, n) the DFS extension.
  std::vector<IntVec> verts = walk_vertices(lattice, rep);
  verts.resize(static_cast<std::size_t>(n) + 1);
  std::vector<int> step_class(static_cast<std::size_t>(n), 0);   // edge class per step
  std::vector<int> vertex_class(static_cast<std::size_t>(n) + 1, 0);
  std::vector<const StepRule*> step_rule(static_cast<std::size_t>(n), nullptr);

  vertex_class[0] = rep.start_class;
  for (int i = 0; i < m; ++i) {
    step_class[static_cast<std::size_t>(i)] = rep.steps[static_cast<std::size_t>(i)].edge_class;
    vertex_class[static_cast<std::size_t>(i) + 1] =
        classify_vertex(lattice, verts[static_cast<std::size_t>(i) + 1]);
  }

  IntVec exponents(static_cast<std::size_t>(d), 0);
  for (int i = 0; i < m; ++i) exponents[static_cast<std::size_t>(step_class[static_cast<std::size_t>(i)])] += 1;

  std::unordered_set<IntVec, VecHash> visited;
  std::unordered_set<EdgeKey, EdgeHash> used_edges;
  if (mode == WalkMode::kSaw) {
    for (int i = 0; i <= m; ++i) visited.insert(verts[static_cast<std::size_t>(i)]);
  } else {
    for (int i = 0; i < m; ++i) {
      used_edges.insert(EdgeKey(verts[static_cast<std::size_t>(i)], verts[static_cast<std::size_t>(i) + 1]));
    }
  }

  Walk tail;
  tail.steps.resize(static_cast<std::size_t>(m));

  auto record_completion = [&]() {
    tail.start_class = vertex_class[static_cast<std::size_t>(n - m)];
    for (int i = 0; i < m; ++i) {
      const int src = n - m + i;
      tail.steps[static_cast<std::size_t>(i)].offset = step_rule[static_cast<std::size_t>(src)]
          ? step_rule[static_cast<std::size_t>(src)]->offset
          : rep.steps[static_cast<std::size_t>(src)].offset;
      tail.steps[static_cast<std::size_t>(i)].edge_class = step_class[static_cast<std::size_t>(src)];
    }
    const int s = tails.classify(tail);
    row_out[static_cast<std::size_t>(s)].add_term(Monomial(exponents), BigInt(1));
  };

  if (m == n) return;  // callers reject this; defensive

  // frame[depth] = index of the next rule to try at that depth
  std::vector<std::size_t> next_rule(static_cast<std::size_t>(n), 0);
  int depth = m;
  next_rule[static_cast<std::size_t>(depth)] = 0;

  auto push_step = [&](const StepRule& rule, int target_class, IntVec&& target) {
    verts[static_cast<std::size_t>(depth) + 1] = std::move(target);
    vertex_class[static_cast<std::size_t>(depth) + 1] = target_class;
    step_class[static_cast<std::size_t>(depth)] = rule.edge_class;
    step_rule[static_cast<std::size_t>(depth)] = &rule;
    exponents[static_cast<std::size_t>(rule.edge_class)] += 1;
    ++depth;
    if (depth < n) next_rule[static_cast<std::size_t>(depth)] = 0;
  };

  auto pop_step = [&]() {
    --depth;
    const IntVec& from = verts[static_cast<std::size_t>(depth)];
    const IntVec& to = verts[static_cast<std::size_t>(depth) + 1];
    if (mode == WalkMode::kSaw) {
      visited.erase(to);
    } else {
      used_edges.erase(EdgeKey(from, to));
    }
    exponents[static_cast<std::size_t>(step_class[static_cast<std::size_t>(depth)])] -= 1;
  };

  // Class transition table, so the loop never classifies coordinates.
  std::vector<std::vector<int>> transitions(lattice.vertex_classes.size());
  for (int k = 0; k < lattice.num_vertex_classes(); ++k) {
    const auto& cls = lattice.vertex_classes[static_cast<std::size_t>(k)];
    auto& row = transitions[static_cast<std::size_t>(k)];
    for (const StepRule& rule : cls.steps) {
      row.push_back(classify_vertex(lattice, add(cls.representative, rule.offset)));
    }
  }

  while (true) {
    if (depth == n) {
      record_completion();
      pop_step();
      continue;
    }
    const int cls = vertex_class[static_cast<std::size_t>(depth)];
    const auto& rules = lattice.vertex_classes[static_cast<std::size_t>(cls)].steps;
    std::size_t ri = next_rule[static_cast<std::size_t>(depth)];
    bool descended = false;
    while (ri < rules.size()) {
      spend(budget);
      IntVec target = add(verts[static_cast<std::size_t>(depth)], rules[ri].offset);
      bool free = false;
      if (mode == WalkMode::kSaw) {
        free = visited.insert(target).second;
      } else {
        free = used_edges.insert(EdgeKey(verts[static_cast<std::size_t>(depth)], target)).second;
      }
      if (free) {
        next_rule[static_cast<std::size_t>(depth)] = ri + 1;
        push_step(rules[ri], transitions[static_cast<std::size_t>(cls)][ri], std::move(target));
        descended = true;
        break;
      }
      ++ri;
    }
    if (descended) continue;
    next_rule[static_cast<std::size_t>(depth)] = rules.size();
    if (depth == m) break;  // exhausted the root
    pop_step();
  }
}

constexpr std::string_view kMagic = "sawbound-gmatrix";
constexpr int kFormatVersion = 1;

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (char c : data) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

GMatrix build_gmatrix(const LatticeSpec& lattice, int m, int n, WalkMode mode,
                      std::uint64_t budget, int threads) {
  if (m < 0 || m >= n) throw PreconditionError("build_gmatrix requires 0 <= m < n");

  GMatrix g;
  g.lattice_name = lattice.name;
  g.scheme = lattice.scheme;
  g.mode = mode;
  g.m = m;
  g.n = n;
  g.labels = lattice.edge_class_labels;
  g.partition = partition_walks(lattice, m, mode, budget);
  if (g.partition.t() == 0) throw PreconditionError("empty partition");

  const TailClassifier tails(lattice, g.partition, budget);
  const int t = g.t();
  g.entries.assign(static_cast<std::size_t>(t) * static_cast<std::size_t>(t),
                   Poly(lattice.num_edge_classes));

  std::atomic<std::uint64_t> shared_budget{budget};
  parallel_for(t, threads, [&](std::int64_t r) {
    std::vector<Poly> row(static_cast<std::size_t>(t), Poly(lattice.num_edge_classes));
    build_row(lattice, g.partition, tails, static_cast<int>(r), n, mode, shared_budget, row);
    const Monomial& rep_weight = g.partition.classes[static_cast<std::size_t>(r)].rep_weight;
    for (int s = 0; s < t; ++s) {
      g.entry(static_cast<int>(r), s) = row[static_cast<std::size_t>(s)].div_monomial(rep_weight);
    }
  });
  return g;
}

MatrixInfo matrix_info(const GMatrix& g) {
  MatrixInfo info;
  info.lattice_name = g.lattice_name;
  info.scheme = g.scheme;
  info.mode = g.mode;
  info.m = g.m;
  info.n = g.n;
  info.t = g.t();
  info.entry_degree = g.entry_degree();
  info.nonzero_pattern.resize(g.entries.size());
  for (std::size_t i = 0; i < g.entries.size(); ++i) {
    info.nonzero_pattern[i] = g.entries[i].is_zero() ? 0 : 1;
    info.nonzero_entries += info.nonzero_pattern[i];
  }
  for (const PartitionClass& cls : g.partition.classes) info.class_sizes.push_back(cls.size);
  return info;
}

void save_gmatrix(const GMatrix& g, std::ostream& out) {
  std::ostringstream body;
  body << kMagic << ' ' << kFormatVersion << '\n';
  body << "lattice " << g.lattice_name << '\n';
  body << "scheme " << g.scheme << '\n';
  body << "mode " << to_string(g.mode) << '\n';
  body << "m " << g.m << '\n';
  body << "n " << g.n << '\n';
  body << "d " << g.nvars() << '\n';
  body << "t " << g.t() << '\n';
  body << "labels";
  for (const auto& l : g.labels) body << ' ' << l;
  body << '\n';
  body << "partition\n";
  for (int i = 0; i < g.t(); ++i) {
    const PartitionClass& cls = g.partition.classes[static_cast<std::size_t>(i)];
    body << "class " << i << " size " << cls.size << '\n';
    body << "weight " << cls.rep_weight.to_string(g.labels) << '\n';
    body << "rep " << cls.canonical_rep.start_class << " steps "
         << cls.canonical_rep.steps.size();
    for (const WalkStep& s : cls.canonical_rep.steps) {
      body << " :";
      for (int c : s.offset) body << ' ' << c;
      body << ' ' << s.edge_class;
    }
    body << '\n';
  }
  body << "entries\n";
  for (int r = 0; r < g.t(); ++r) {
    for (int s = 0; s < g.t(); ++s) {
      body << "entry " << r << ' ' << s << " = " << g.entry(r, s).to_string(g.labels) << '\n';
    }
  }
  const std::string payload = body.str();
  out << payload;
  char checksum[32];
  std::snprintf(checksum, sizeof(checksum), "%016llx",
                static_cast<unsigned long long>(fnv1a64(payload)));
  out << "checksum fnv1a64 " << checksum << '\n';
}

namespace {

std::string read_line_or_throw(std::istream& in, std::string_view context) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError("unexpected end of matrix file while reading " + std::string(context));
  }
  return line;
}

std::vector<std::string> tokens_of(const std::string& line) {
  std::istringstream ls(line);
  std::vector<std::string> tokens;
  std::string tok;
  while (ls >> tok) tokens.push_back(tok);
  return tokens;
}

int int_field(const std::string& line, std::string_view key) {
  auto tokens = tokens_of(line);
  if (tokens.size() != 2 || tokens[0] != key) {
    throw ParseError("expected '" + std::string(key) + " <int>', got: " + line);
  }
  try {
    return std::stoi(tokens[1]);
  } catch (const std::exception&) {
    throw ParseError("bad integer in matrix file: " + line);
  }
}

std::string string_field(const std::string& line, std::string_view key) {
  auto tokens = tokens_of(line);
  if (tokens.size() != 2 || tokens[0] != key) {
    throw ParseError("expected '" + std::string(key) + " <value>', got: " + line);
  }
  return tokens[1];
}

}  // namespace

GMatrix load_gmatrix(std::istream& in) {
  // The payload is re-serialized line by line to recompute the checksum, so
  // any edit to the content is caught even if it parses.
  std::ostringstream payload;
  auto next_line = [&](std::string_view context) {
    std::string line = read_line_or_throw(in, context);
    payload << line << '\n';
    return line;
  };

  GMatrix g;
  {
    auto header = tokens_of(next_line("header"));
    if (header.size() != 2 || header[0] != kMagic) throw ParseError("not a gmatrix file");
    int version = 0;
    try {
      version = std::stoi(header[1]);
    } catch (const std::exception&) {
      throw ParseError("bad gmatrix format version");
    }
    if (version != kFormatVersion) {
      throw ParseError("unsupported gmatrix format version " + header[1]);
    }
  }
  g.lattice_name = string_field(next_line("lattice"), "lattice");
  g.scheme = string_field(next_line("scheme"), "scheme");
  g.mode = walk_mode_from_string(string_field(next_line("mode"), "mode"));
  g.m = int_field(next_line("m"), "m");
  g.n = int_field(next_line("n"), "n");
  const int d = int_field(next_line("d"), "d");
  const int t = int_field(next_line("t"), "t");
  if (d <= 0 || t <= 0 || g.m < 0 || g.n <= g.m) throw ParseError("inconsistent matrix header");
  {
    auto tokens = tokens_of(next_line("labels"));
    if (tokens.size() != static_cast<std::size_t>(d) + 1 || tokens[0] != "labels") {
      throw ParseError("bad labels line");
    }
    g.labels.assign(tokens.begin() + 1, tokens.end());
  }
  if (next_line("partition") != "partition") throw ParseError("expected 'partition'");
  g.partition.m = g.m;
  g.partition.mode = g.mode;
  for (int i = 0; i < t; ++i) {
    auto cls_tokens = tokens_of(next_line("class"));
    PartitionClass cls;
    try {
      if (cls_tokens.size() != 4 || cls_tokens[0] != "class" || cls_tokens[2] != "size" ||
          std::stoi(cls_tokens[1]) != i) {
        throw ParseError("bad partition class line");
      }
      cls.size = std::stoll(cls_tokens[3]);
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception&) {
      throw ParseError("bad partition class line");
    }

    const std::string weight_line = next_line("weight");
    if (weight_line.rfind("weight ", 0) != 0) throw ParseError("expected 'weight'");
    {
      Poly w = Poly::parse("1 * " + weight_line.substr(7), g.labels);
      if (w.term_count() != 1) throw ParseError("bad weight monomial");
      cls.rep_weight = w.terms()[0].first;
    }

    std::istringstream rep_line(next_line("rep"));
    std::string kw;
    int start_class = 0;
    std::size_t nsteps = 0;
    rep_line >> kw >> start_class;
    if (kw != "rep") throw ParseError("expected 'rep'");
    rep_line >> kw >> nsteps;
    if (kw != "steps") throw ParseError("expected 'steps'");
    if (static_cast<int>(nsteps) != g.m) throw ParseError("rep step count mismatch");
    cls.canonical_rep.start_class = start_class;
    for (std::size_t s = 0; s < nsteps; ++s) {
      rep_line >> kw;
      if (kw != ":") throw ParseError("expected ':' in rep walk");
      // Offsets have the lattice dimension, which the file does not repeat;
      // recover it from the token count: every step is D ints plus a class.
      // Read greedily: collect ints until the next ':' or end, the last one
      // is the edge class.
      std::vector<int> nums;
      while (true) {
        auto pos = rep_line.tellg();
        std::string tok;
        if (!(rep_line >> tok)) break;
        if (tok == ":") {
          rep_line.seekg(pos);
          break;
        }
        try {
          nums.push_back(std::stoi(tok));
        } catch (const std::exception&) {
          throw ParseError("bad integer in rep walk");
        }
      }
      if (nums.size() < 2) throw ParseError("rep step too short");
      WalkStep step;
      step.edge_class = nums.back();
      nums.pop_back();
      step.offset = IntVec(nums.begin(), nums.end());
      cls.canonical_rep.steps.push_back(std::move(step));
    }
    g.partition.classes.push_back(std::move(cls));
  }
  if (next_line("entries") != "entries") throw ParseError("expected 'entries'");
  g.entries.assign(static_cast<std::size_t>(t) * static_cast<std::size_t>(t), Poly(d));
  for (int r = 0; r < t; ++r) {
    for (int s = 0; s < t; ++s) {
      const std::string line = next_line("entry");
      std::ostringstream prefix;
      prefix << "entry " << r << ' ' << s << " = ";
      if (line.rfind(prefix.str(), 0) != 0) {
        throw ParseError("bad or out-of-order entry line: " + line);
      }
      g.entry(r, s) = Poly::parse(line.substr(prefix.str().size()), g.labels);
    }
  }

  // Trailing checksum line is not part of the payload.
  const std::string checksum_line = read_line_or_throw(in, "checksum");
  auto tokens = tokens_of(checksum_line);
  if (tokens.size() != 3 || tokens[0] != "checksum" || tokens[1] != "fnv1a64") {
    throw ParseError("missing checksum line");
  }
  char expected[32];
  std::snprintf(expected, sizeof(expected), "%016llx",
                static_cast<unsigned long long>(fnv1a64(payload.str())));
  if (tokens[2] != expected) throw ParseError("matrix file checksum mismatch");
  return g;
}

void save_gmatrix_file(const GMatrix& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write matrix file: " + path);
  save_gmatrix(g, out);
  if (!out.good()) throw ParseError("write failed: " + path);
}

GMatrix load_gmatrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open matrix file: " + path);
  return load_gmatrix(in);
}

}  // namespace sawbound
