#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "sawbound/cluster.hpp"
#include "sawbound/errors.hpp"
#include "sawbound/gmatrix.hpp"
#include "sawbound/lattice.hpp"
#include "sawbound/parallel.hpp"
#include "sawbound/scan.hpp"
#include "sawbound/spectral.hpp"
#include "sawbound/walks.hpp"

namespace sawbound::cli {

namespace {

using nlohmann::json;

// Argument combinations the parser accepts but the operations reject up
// front (usage problems, exit code 2, as opposed to domain failures).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> parse_doubles(const std::string& csv, std::string_view what) {
  std::vector<double> out;
  std::istringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("bad number '" + item + "' in " + std::string(what));
    }
  }
  if (out.empty()) throw UsageError(std::string(what) + " must not be empty");
  return out;
}

std::vector<int> parse_ints(const std::string& csv, std::string_view what) {
  std::vector<int> out;
  for (double v : parse_doubles(csv, what)) {
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) throw UsageError(std::string(what) + " must be integers");
    out.push_back(i);
  }
  return out;
}

// Options shared by every subcommand that needs a lattice and matrix shape.
struct MatrixOpts {
  std::string lattice = "square";
  std::string scheme = "general";
  std::string lattice_file;
  std::string mode_str = "saw";
  std::string matrix_file;
  int m = 1;
  int n = 2;
  std::uint64_t budget = kDefaultBuildBudget;
  int threads = 0;  // 0 = default_thread_count()

  int resolved_threads() const { return threads > 0 ? threads : default_thread_count(); }

  WalkMode mode() const {
    try {
      return walk_mode_from_string(mode_str);
    } catch (const Error&) {
      throw UsageError("mode must be 'saw' or 'sat'");
    }
  }

  LatticeSpec load_lattice_spec() const {
    if (!lattice_file.empty()) {
      LatticeSpec spec = load_lattice_file(lattice_file);
      const LatticeCheckReport report = check_lattice(spec);
      if (!report.ok()) {
        std::string msg = "lattice file failed validation:";
        for (const std::string& v : report.violations) msg += "\n  " + v;
        throw PreconditionError(msg);
      }
      return spec;
    }
    return builtin_lattice(lattice, scheme);
  }

  GMatrix obtain_matrix() const {
    if (!matrix_file.empty()) return load_gmatrix_file(matrix_file);
    if (m < 0 || m >= n) throw UsageError("require 0 <= m < n");
    return build_gmatrix(load_lattice_spec(), m, n, mode(), budget, resolved_threads());
  }
};

void add_lattice_options(CLI::App* cmd, MatrixOpts& opts) {
  cmd->add_option("--lattice", opts.lattice, "builtin lattice name");
  cmd->add_option("--scheme", opts.scheme, "builtin weighting scheme");
  cmd->add_option("--lattice-file", opts.lattice_file,
                  "custom lattice definition file (overrides --lattice/--scheme)");
  cmd->add_option("--mode", opts.mode_str, "walk mode: saw or sat");
}

void add_shape_options(CLI::App* cmd, MatrixOpts& opts) {
  cmd->add_option("-m,--prefix-steps", opts.m, "prefix length m");
  cmd->add_option("-n,--walk-steps", opts.n, "walk length n");
  cmd->add_option("--budget", opts.budget, "enumeration node budget");
  cmd->add_option("--threads", opts.threads, "worker cap (default: SAWBOUND_THREADS or cores)");
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw PreconditionError("cannot write output file: " + path);
  return f;
}

void print_bound(std::ostream& out, const CertifiedBound& b, bool as_json) {
  if (as_json) {
    out << json{{"bound", b.value},
                {"bracketLow", b.lower},
                {"bracketHigh", b.upper},
                {"iterations", b.iterations},
                {"tolerance", b.tolerance}}
               .dump(2)
        << '\n';
  } else {
    out << "bound,bracketLow,bracketHigh,iterations\n";
    out << fmt_double(b.value) << ',' << fmt_double(b.lower) << ',' << fmt_double(b.upper)
        << ',' << b.iterations << '\n';
  }
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"rigorous upper bounds for weighted self-avoiding walks and trails"};
  app.name("sawbound");
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "machine-readable JSON output");

  MatrixOpts opts;
  double tol = kDefaultEigenTolerance;
  std::string z_csv = "1,1";
  std::string x_csv;
  std::string output_path;
  std::uint64_t seed = 12345;

  CLI::App* lattices_cmd = app.add_subcommand("lattices", "list builtin lattices");

  CLI::App* walks_cmd = app.add_subcommand("walks", "enumerate m-step walks");
  walks_cmd->require_subcommand(1);
  CLI::App* walks_count = walks_cmd->add_subcommand("count", "count walks per start class");
  CLI::App* walks_dump = walks_cmd->add_subcommand("dump", "dump walks, one per line");
  for (CLI::App* cmd : {walks_count, walks_dump}) {
    add_lattice_options(cmd, opts);
    cmd->add_option("-m,--prefix-steps", opts.m, "walk length m");
    cmd->add_option("--budget", opts.budget, "enumeration node budget");
    cmd->add_option("-o,--output", output_path, "output file (default stdout)");
  }

  CLI::App* matrix_cmd = app.add_subcommand("matrix", "build or inspect transfer matrices");
  matrix_cmd->require_subcommand(1);
  CLI::App* matrix_build = matrix_cmd->add_subcommand("build", "build and save a matrix");
  add_lattice_options(matrix_build, opts);
  add_shape_options(matrix_build, opts);
  matrix_build->add_option("-o,--output", output_path, "matrix file to write")->required();
  CLI::App* matrix_info_cmd = matrix_cmd->add_subcommand("info", "summarize a matrix");
  matrix_info_cmd->add_option("file", opts.matrix_file, "matrix file")->required();

  CLI::App* bound_cmd = app.add_subcommand("bound", "certified connective-constant bound at z");
  add_lattice_options(bound_cmd, opts);
  add_shape_options(bound_cmd, opts);
  bound_cmd->add_option("--matrix", opts.matrix_file, "load matrix instead of building");
  bound_cmd->add_option("-z,--weights", z_csv, "comma-separated weights in label order");
  bound_cmd->add_option("--tol", tol, "relative eigenvalue tolerance");

  CLI::App* scan_cmd = app.add_subcommand("scan", "parameter-space exploration");
  scan_cmd->require_subcommand(1);
  CLI::App* scan_grid = scan_cmd->add_subcommand("grid", "bound on a weight grid");
  std::string min_csv = "0.1,0.1", max_csv = "1,1", samples_csv = "100,100";
  add_lattice_options(scan_grid, opts);
  add_shape_options(scan_grid, opts);
  scan_grid->add_option("--matrix", opts.matrix_file, "load matrix instead of building");
  scan_grid->add_option("--min", min_csv, "per-axis minima");
  scan_grid->add_option("--max", max_csv, "per-axis maxima");
  scan_grid->add_option("--samples", samples_csv, "per-axis sample counts");
  scan_grid->add_option("--tol", tol, "relative eigenvalue tolerance");
  scan_grid->add_option("-o,--output", output_path, "CSV output file (default stdout)");

  CLI::App* scan_frontier = scan_cmd->add_subcommand("frontier", "lambda=1 frontier sweep");
  int rays = 64;
  add_lattice_options(scan_frontier, opts);
  add_shape_options(scan_frontier, opts);
  scan_frontier->add_option("--matrix", opts.matrix_file, "load matrix instead of building");
  scan_frontier->add_option("--rays", rays, "rays per angular axis");
  scan_frontier->add_option("--tol", tol, "relative eigenvalue tolerance");
  scan_frontier->add_option("-o,--output", output_path, "CSV output file (default stdout)");

  CLI::App* domain_cmd = app.add_subcommand("domain", "convergence-domain membership");
  add_lattice_options(domain_cmd, opts);
  add_shape_options(domain_cmd, opts);
  domain_cmd->add_option("--matrix", opts.matrix_file, "load matrix instead of building");
  domain_cmd->add_option("-x,--point", x_csv, "query point (may be negative)")->required();
  domain_cmd->add_option("--tol", tol, "relative eigenvalue tolerance");

  CLI::App* validate_cmd = app.add_subcommand("validate", "closed-form/scaling/reciprocal checks");
  std::int64_t trials = 100;
  std::string row_override;
  add_lattice_options(validate_cmd, opts);
  add_shape_options(validate_cmd, opts);
  validate_cmd->add_option("--matrix", opts.matrix_file, "load matrix instead of building");
  validate_cmd->add_option("--trials", trials, "randomized trials");
  validate_cmd->add_option("--seed", seed, "random seed (recorded in the report)");
  validate_cmd->add_option("--row", row_override, "closed-form row id override");

  CLI::App* kp_cmd = app.add_subcommand("kp", "cluster-expansion convergence certificates");
  kp_cmd->require_subcommand(1);
  double kp_epsilon = 0, kp_alpha = 0, kp_t = 0.1;
  int kp_length = 8, max_blocks = kDefaultMaxBlocks;
  std::string f_coeffs_csv = "0.5";
  std::string cert_path;
  CLI::App* kp_check_cmd = kp_cmd->add_subcommand("check", "check one (epsilon, alpha) pair");
  kp_check_cmd->add_option("--epsilon", kp_epsilon, "horizontal edge weight")->required();
  kp_check_cmd->add_option("--alpha", kp_alpha, "vertical edge weight")->required();
  kp_check_cmd->add_option("--kpt", kp_t, "criterion constant t");
  kp_check_cmd->add_option("-L,--exact-length", kp_length, "exact enumeration length");
  kp_check_cmd->add_option("--max-blocks", max_blocks, "tail block search cap");
  kp_check_cmd->add_option("-m,--prefix-steps", opts.m, "prefix length m");
  kp_check_cmd->add_option("-n,--walk-steps", opts.n, "walk length n");
  kp_check_cmd->add_option("--cert", cert_path, "write certificate file");

  CLI::App* kp_eps_cmd = kp_cmd->add_subcommand("epsilon0", "bisect the certified epsilon range");
  kp_eps_cmd->add_option("--f-coeffs", f_coeffs_csv, "polynomial f coefficients, constant first");
  kp_eps_cmd->add_option("--kpt", kp_t, "criterion constant t");
  kp_eps_cmd->add_option("-L,--exact-length", kp_length, "exact enumeration length");
  kp_eps_cmd->add_option("-m,--prefix-steps", opts.m, "prefix length m");
  kp_eps_cmd->add_option("-n,--walk-steps", opts.n, "walk length n");
  kp_eps_cmd->add_option("--cert", cert_path, "write certificate file");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }

  try {
    std::ostream* sink = &out;
    std::ofstream file_sink;
    if (!output_path.empty()) {
      file_sink = open_output(output_path);
      sink = &file_sink;
    }

    if (lattices_cmd->parsed()) {
      if (as_json) {
        json list = json::array();
        for (const auto& [name, scheme] : builtin_lattice_names()) {
          const LatticeSpec lat = builtin_lattice(name, scheme);
          list.push_back({{"lattice", name},
                          {"scheme", scheme},
                          {"D", lat.dim},
                          {"d", lat.num_edge_classes},
                          {"K", lat.num_vertex_classes()},
                          {"labels", lat.edge_class_labels}});
        }
        out << list.dump(2) << '\n';
      } else {
        out << "lattice,scheme,D,d,K,labels\n";
        for (const auto& [name, scheme] : builtin_lattice_names()) {
          const LatticeSpec lat = builtin_lattice(name, scheme);
          out << name << ',' << scheme << ',' << lat.dim << ',' << lat.num_edge_classes << ','
              << lat.num_vertex_classes() << ',';
          for (std::size_t i = 0; i < lat.edge_class_labels.size(); ++i) {
            if (i) out << ';';
            out << lat.edge_class_labels[i];
          }
          out << '\n';
        }
      }
      return 0;
    }

    if (walks_count->parsed() || walks_dump->parsed()) {
      if (opts.m < 0) throw UsageError("m must be nonnegative");
      const LatticeSpec lat = opts.load_lattice_spec();
      const auto walks = enumerate_walks(lat, opts.m, opts.mode(), opts.budget);
      if (walks_dump->parsed()) {
        dump_walks(*sink, walks);
        return 0;
      }
      std::vector<std::int64_t> per_class(static_cast<std::size_t>(lat.num_vertex_classes()), 0);
      for (const Walk& w : walks) per_class[static_cast<std::size_t>(w.start_class)] += 1;
      if (as_json) {
        *sink << json{{"m", opts.m},
                      {"mode", std::string(to_string(opts.mode()))},
                      {"perClass", per_class},
                      {"total", walks.size()}}
                     .dump(2)
              << '\n';
      } else {
        *sink << "class,count\n";
        for (std::size_t k = 0; k < per_class.size(); ++k) {
          *sink << k << ',' << per_class[k] << '\n';
        }
        *sink << "total," << walks.size() << '\n';
      }
      return 0;
    }

    if (matrix_build->parsed()) {
      if (opts.m < 0 || opts.m >= opts.n) throw UsageError("require 0 <= m < n");
      const GMatrix g = build_gmatrix(opts.load_lattice_spec(), opts.m, opts.n, opts.mode(),
                                      opts.budget, opts.resolved_threads());
      save_gmatrix_file(g, output_path);
      out << "wrote " << output_path << " (t=" << g.t() << ")\n";
      return 0;
    }

    if (matrix_info_cmd->parsed()) {
      const MatrixInfo info = matrix_info(load_gmatrix_file(opts.matrix_file));
      if (as_json) {
        out << json{{"lattice", info.lattice_name},
                    {"scheme", info.scheme},
                    {"mode", std::string(to_string(info.mode))},
                    {"m", info.m},
                    {"n", info.n},
                    {"t", info.t},
                    {"entryDegree", info.entry_degree},
                    {"nonzeroEntries", info.nonzero_entries},
                    {"classSizes", info.class_sizes}}
                   .dump(2)
            << '\n';
      } else {
        out << "lattice," << info.lattice_name << '\n';
        out << "scheme," << info.scheme << '\n';
        out << "mode," << to_string(info.mode) << '\n';
        out << "m," << info.m << '\n';
        out << "n," << info.n << '\n';
        out << "t," << info.t << '\n';
        out << "entryDegree," << info.entry_degree << '\n';
        out << "nonzeroEntries," << info.nonzero_entries << '\n';
        out << "classSizes,";
        for (std::size_t i = 0; i < info.class_sizes.size(); ++i) {
          if (i) out << ';';
          out << info.class_sizes[i];
        }
        out << '\n';
      }
      return 0;
    }

    if (bound_cmd->parsed()) {
      if (opts.matrix_file.empty() && (opts.m < 0 || opts.m >= opts.n)) {
        throw UsageError("require 0 <= m < n");
      }
      const GMatrix g = opts.obtain_matrix();
      const std::vector<double> z = parse_doubles(z_csv, "-z");
      if (static_cast<int>(z.size()) != g.nvars()) {
        throw UsageError("-z needs one weight per edge class (" + std::to_string(g.nvars()) +
                         " expected)");
      }
      for (double zi : z) {
        if (!(zi > 0)) throw UsageError("-z weights must be strictly positive");
      }
      print_bound(out, mu_upper_bound(g, z, tol), as_json);
      return 0;
    }

    if (scan_grid->parsed()) {
      const GMatrix g = opts.obtain_matrix();
      const auto mins = parse_doubles(min_csv, "--min");
      const auto maxs = parse_doubles(max_csv, "--max");
      const auto samples = parse_ints(samples_csv, "--samples");
      if (static_cast<int>(mins.size()) != g.nvars() || maxs.size() != mins.size() ||
          samples.size() != mins.size()) {
        throw UsageError("--min/--max/--samples need one entry per edge class");
      }
      GridSpec spec;
      for (std::size_t i = 0; i < mins.size(); ++i) {
        spec.axes.push_back({mins[i], maxs[i], samples[i]});
      }
      const auto rows = grid_scan(g, spec, tol, opts.resolved_threads());
      write_grid_csv(*sink, g, rows);
      return 0;
    }

    if (scan_frontier->parsed()) {
      const GMatrix g = opts.obtain_matrix();
      const auto dirs = direction_grid(g.nvars(), rays);
      const auto points = ray_frontier(g, dirs, tol, opts.resolved_threads());
      write_frontier_csv(*sink, g, points);
      return 0;
    }

    if (domain_cmd->parsed()) {
      const GMatrix g = opts.obtain_matrix();
      const std::vector<double> x = parse_doubles(x_csv, "-x");
      if (static_cast<int>(x.size()) != g.nvars()) {
        throw UsageError("-x needs one coordinate per edge class");
      }
      const Containment c = domain_contains(g, x, tol);
      if (as_json) {
        out << json{{"point", x}, {"containment", std::string(to_string(c))}}.dump(2) << '\n';
      } else {
        out << to_string(c) << '\n';
      }
      return 0;
    }

    if (validate_cmd->parsed()) {
      const GMatrix g = opts.obtain_matrix();
      std::optional<std::string> row;
      if (!row_override.empty()) row = row_override;
      const ValidationReport report = validate(g, trials, seed, row);
      if (as_json) {
        json checks = json::array();
        for (const ValidationCheck& c : report.checks) {
          checks.push_back({{"name", c.name},
                            {"trials", c.trials},
                            {"failures", c.failures},
                            {"pass", c.pass},
                            {"detail", c.detail}});
        }
        out << json{{"seed", report.seed},
                    {"trials", report.trials},
                    {"checks", checks},
                    {"pass", report.pass()}}
                   .dump(2)
            << '\n';
      } else {
        write_validation_report(out, report);
      }
      return report.pass() ? 0 : 1;
    }

    if (kp_check_cmd->parsed()) {
      if (opts.m < 0 || opts.m >= opts.n) throw UsageError("require 0 <= m < n");
      const GMatrix g = build_gmatrix(builtin_lattice("square", "general"), opts.m, opts.n,
                                      WalkMode::kSat, opts.budget);
      const KPCertificate cert = kp_check({kp_epsilon, kp_alpha, kp_t}, g, kp_length);
      if (!cert_path.empty()) {
        auto f = open_output(cert_path);
        write_kp_certificate(f, cert);
      }
      if (as_json) {
        out << json{{"epsilon", kp_epsilon},
                    {"alpha", kp_alpha},
                    {"kpT", kp_t},
                    {"z", cert.z},
                    {"L", cert.max_exact_length},
                    {"exactPartial", cert.bound.exact_partial},
                    {"tailBound", cert.bound.tail_bound},
                    {"total", cert.bound.total},
                    {"converged", cert.bound.converged},
                    {"verdict", std::string(to_string(cert.verdict))},
                    {"note", cert.note}}
                   .dump(2)
            << '\n';
      } else {
        write_kp_certificate(out, cert);
      }
      return cert.verdict == KPVerdict::kIndeterminate ? 1 : 0;
    }

    if (kp_eps_cmd->parsed()) {
      if (opts.m < 0 || opts.m >= opts.n) throw UsageError("require 0 <= m < n");
      const GMatrix g = build_gmatrix(builtin_lattice("square", "general"), opts.m, opts.n,
                                      WalkMode::kSat, opts.budget);
      const auto coeffs = parse_doubles(f_coeffs_csv, "--f-coeffs");
      const EpsilonSearchResult result = find_epsilon0(coeffs, kp_t, g, kp_length);
      if (!cert_path.empty()) {
        auto f = open_output(cert_path);
        write_epsilon_certificate(f, result);
      }
      if (as_json) {
        json probes = json::array();
        for (const EpsilonProbe& p : result.probes) {
          probes.push_back({{"epsilon", p.epsilon},
                            {"alpha", p.alpha},
                            {"total", p.total},
                            {"verdict", std::string(to_string(p.verdict))}});
        }
        out << json{{"found", result.found},
                    {"epsilon0", result.epsilon0},
                    {"kpT", result.kp_t},
                    {"L", result.max_exact_length},
                    {"probes", probes}}
                   .dump(2)
            << '\n';
      } else {
        write_epsilon_certificate(out, result);
      }
      return result.found ? 0 : 1;
    }

    err << "error: no subcommand dispatched\n";
    return 2;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace sawbound::cli
