#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "sawbound/errors.hpp"
#include "sawbound/lattice.hpp"

namespace sawbound {

namespace {

constexpr std::string_view kMagic = "sawbound-lattice";
constexpr int kFormatVersion = 1;

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next line split into tokens; throws on EOF.
  std::vector<std::string> next(std::string_view context) {
    std::string line;
    while (std::getline(in_, line)) {
      std::istringstream ls(line);
      std::vector<std::string> tokens;
      std::string tok;
      while (ls >> tok) tokens.push_back(tok);
      if (!tokens.empty()) return tokens;
    }
    throw ParseError("unexpected end of file while reading " + std::string(context));
  }

  // Next line that must start with `key`; returns the remaining tokens.
  std::vector<std::string> expect(std::string_view key) {
    auto tokens = next(key);
    if (tokens[0] != key) {
      throw ParseError("expected '" + std::string(key) + "', got '" + tokens[0] + "'");
    }
    tokens.erase(tokens.begin());
    return tokens;
  }

 private:
  std::istream& in_;
};

int to_int(const std::string& s) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw ParseError("trailing characters in integer: " + s);
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("bad integer: " + s);
  }
}

IntVec to_vec(const std::vector<std::string>& tokens, std::size_t start, std::size_t count) {
  if (tokens.size() != start + count) throw ParseError("wrong vector arity");
  IntVec v;
  v.reserve(count);
  for (std::size_t i = 0; i < count; ++i) v.push_back(to_int(tokens[start + i]));
  return v;
}

void write_vec(std::ostream& out, const IntVec& v) {
  for (std::size_t i = 0; i < v.size(); ++i) out << ' ' << v[i];
}

}  // namespace

void save_lattice(const LatticeSpec& lat, std::ostream& out) {
  out << kMagic << ' ' << kFormatVersion << '\n';
  out << "name " << lat.name << '\n';
  out << "scheme " << lat.scheme << '\n';
  out << "D " << lat.dim << '\n';
  out << "d " << lat.num_edge_classes << '\n';
  out << "K " << lat.num_vertex_classes() << '\n';
  out << "labels";
  for (const auto& l : lat.edge_class_labels) out << ' ' << l;
  out << '\n';
  for (const IntVec& b : lat.translation_basis) {
    out << "basis";
    write_vec(out, b);
    out << '\n';
  }
  for (int k = 0; k < lat.num_vertex_classes(); ++k) {
    const auto& cls = lat.vertex_classes[static_cast<std::size_t>(k)];
    out << "class " << k << '\n';
    out << "rep";
    write_vec(out, cls.representative);
    out << '\n';
    out << "steps " << cls.steps.size() << '\n';
    for (const StepRule& s : cls.steps) {
      out << "step";
      write_vec(out, s.offset);
      out << ' ' << s.edge_class << '\n';
    }
  }
  out << "symmetries " << lat.symmetries.size() << '\n';
  for (const SymmetryRep& sym : lat.symmetries) {
    out << "symmetry\n";
    for (const IntVec& row : sym.linear) {
      out << "linear";
      write_vec(out, row);
      out << '\n';
    }
    out << "shift";
    write_vec(out, sym.shift);
    out << '\n';
  }
  out << "end\n";
}

LatticeSpec load_lattice(std::istream& in) {
  LineReader reader(in);
  LatticeSpec lat;

  auto header = reader.next("header");
  if (header.size() != 2 || header[0] != kMagic) throw ParseError("not a lattice file");
  if (to_int(header[1]) != kFormatVersion) {
    throw ParseError("unsupported lattice format version " + header[1]);
  }

  auto name = reader.expect("name");
  if (name.size() != 1) throw ParseError("name must be a single token");
  lat.name = name[0];
  auto scheme = reader.expect("scheme");
  if (scheme.size() != 1) throw ParseError("scheme must be a single token");
  lat.scheme = scheme[0];

  auto dim_tokens = reader.expect("D");
  if (dim_tokens.size() != 1) throw ParseError("D must be a single integer");
  lat.dim = to_int(dim_tokens[0]);
  if (lat.dim <= 0 || lat.dim > 16) throw ParseError("unreasonable embedding dimension");
  const auto dsz = static_cast<std::size_t>(lat.dim);

  auto d_tokens = reader.expect("d");
  if (d_tokens.size() != 1) throw ParseError("d must be a single integer");
  lat.num_edge_classes = to_int(d_tokens[0]);
  if (lat.num_edge_classes <= 0) throw ParseError("d must be positive");

  auto k_tokens = reader.expect("K");
  if (k_tokens.size() != 1) throw ParseError("K must be a single integer");
  const int K = to_int(k_tokens[0]);
  if (K <= 0) throw ParseError("K must be positive");

  auto labels = reader.expect("labels");
  if (static_cast<int>(labels.size()) != lat.num_edge_classes) {
    throw ParseError("label count does not match d");
  }
  lat.edge_class_labels = labels;

  for (int i = 0; i < lat.dim; ++i) {
    auto row = reader.expect("basis");
    lat.translation_basis.push_back(to_vec(row, 0, dsz));
  }

  for (int k = 0; k < K; ++k) {
    auto cls_tokens = reader.expect("class");
    if (cls_tokens.size() != 1 || to_int(cls_tokens[0]) != k) {
      throw ParseError("classes must appear in order 0..K-1");
    }
    VertexClassSpec cls;
    cls.representative = to_vec(reader.expect("rep"), 0, dsz);
    auto steps_tokens = reader.expect("steps");
    if (steps_tokens.size() != 1) throw ParseError("steps must be a single count");
    const int nsteps = to_int(steps_tokens[0]);
    if (nsteps <= 0) throw ParseError("each class needs at least one step");
    for (int s = 0; s < nsteps; ++s) {
      auto step_tokens = reader.expect("step");
      if (step_tokens.size() != dsz + 1) throw ParseError("step arity mismatch");
      StepRule rule;
      rule.offset.reserve(dsz);
      for (std::size_t i = 0; i < dsz; ++i) rule.offset.push_back(to_int(step_tokens[i]));
      rule.edge_class = to_int(step_tokens[dsz]);
      cls.steps.push_back(std::move(rule));
    }
    lat.vertex_classes.push_back(std::move(cls));
  }

  auto sym_tokens = reader.expect("symmetries");
  if (sym_tokens.size() != 1) throw ParseError("symmetries must be a single count");
  const int nsyms = to_int(sym_tokens[0]);
  if (nsyms <= 0) throw ParseError("need at least the identity symmetry");
  for (int s = 0; s < nsyms; ++s) {
    auto tag = reader.next("symmetry");
    if (tag.size() != 1 || tag[0] != "symmetry") throw ParseError("expected 'symmetry'");
    SymmetryRep sym;
    for (int i = 0; i < lat.dim; ++i) {
      sym.linear.push_back(to_vec(reader.expect("linear"), 0, dsz));
    }
    sym.shift = to_vec(reader.expect("shift"), 0, dsz);
    lat.symmetries.push_back(std::move(sym));
  }

  auto end = reader.next("end");
  if (end.size() != 1 || end[0] != "end") throw ParseError("expected 'end'");
  return lat;
}

LatticeSpec load_lattice_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open lattice file: " + path);
  return load_lattice(in);
}

void save_lattice_file(const LatticeSpec& lat, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write lattice file: " + path);
  save_lattice(lat, out);
  if (!out.good()) throw ParseError("write failed: " + path);
}

}  // namespace sawbound
