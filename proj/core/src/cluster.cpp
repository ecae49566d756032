#include "sawbound/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "rounding.hpp"
#include "sawbound/errors.hpp"
#include "sawbound/spectral.hpp"
#include "sawbound/walks.hpp"

namespace sawbound {

namespace {

using internal::add_up;
using internal::div_up;
using internal::exp_up;
using internal::mul_up;
using internal::sub_down;
using internal::up;

constexpr double kZeroLift = 1e-30;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

DenseMatrix mat_mul_up(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix r = DenseMatrix::zero(a.n);
  for (int i = 0; i < a.n; ++i) {
    for (int k = 0; k < a.n; ++k) {
      const double aik = a.at(i, k);
      if (aik == 0) continue;
      for (int j = 0; j < a.n; ++j) {
        r.at(i, j) = add_up(r.at(i, j), mul_up(aik, b.at(k, j)));
      }
    }
  }
  return r;
}

double max_row_sum_up(const DenseMatrix& a) {
  double best = 0;
  for (int i = 0; i < a.n; ++i) {
    double sum = 0;
    for (int j = 0; j < a.n; ++j) sum = add_up(sum, a.at(i, j));
    best = std::max(best, sum);
  }
  return best;
}

// Upper bound on c_l(z) from the plain enumeration value: inflate by the
// worst-case relative rounding of `walks` completed products of <= l
// factors summed recursively.
double enumeration_upper(double plain_value, double walk_count, int length) {
  const double ops = walk_count + static_cast<double>(length) + 8.0;
  return up(plain_value * (1.0 + ops * std::numeric_limits<double>::epsilon()));
}

}  // namespace

CertifiedAnchoredBound anchored_sat_bound(const GMatrix& g, std::array<double, 2> z,
                                          int max_exact_length, int max_blocks) {
  if (g.lattice_name != "square") {
    throw PreconditionError("anchored trail bound is defined on the square lattice");
  }
  if (g.mode != WalkMode::kSat) {
    throw PreconditionError("anchored trail bound requires a trail-mode matrix");
  }
  if (g.nvars() != 2) throw PreconditionError("anchored trail bound takes two weights");
  if (max_exact_length < 1) throw PreconditionError("exact enumeration length must be >= 1");
  if (max_blocks < 1) throw PreconditionError("max_blocks must be >= 1");
  for (double zi : z) {
    if (!(zi > 0)) throw PreconditionError("weights must be strictly positive");
  }
  if (!is_primitive(structure_matrix(g))) {
    throw NotPrimitiveError("matrix is not primitive");
  }
  {
    const CertifiedBound lam = dominant_eigenvalue(eval_at(g, z));
    if (!(lam.upper < 1.0)) {
      throw PreconditionError("certified eigenvalue upper bound is not below 1 at z");
    }
  }

  const LatticeSpec lattice = builtin_lattice(g.lattice_name, g.scheme);
  const int m = g.m;
  const int delta = g.entry_degree();
  const int L = max_exact_length;
  const std::vector<double> zv{z[0], z[1]};
  const std::vector<double> ones{1.0, 1.0};

  CertifiedAnchoredBound out;
  out.max_exact_length = L;

  // Exact partial sum, lengths ascending, each length a depth-first
  // enumeration in rule order. Plain arithmetic by contract; its rounding
  // is charged to the tail below.
  double exact = 0;
  double total_walks = 0;
  for (int l = 1; l <= L; ++l) {
    exact += weighted_count(lattice, l, 0, WalkMode::kSat, zv);
    total_walks += weighted_count(lattice, l, 0, WalkMode::kSat, ones);
  }
  out.exact_partial = exact;

  double tail = up(exact * ((total_walks + static_cast<double>(L) + 8.0) *
                            std::numeric_limits<double>::epsilon()));

  // Lengths between L and m + delta - 1 are below where the matrix chain
  // starts; bound them by direct enumeration too.
  const int l_eff = std::max(L, m + delta - 1);
  for (int l = L + 1; l <= l_eff; ++l) {
    const double plain = weighted_count(lattice, l, 0, WalkMode::kSat, zv);
    const double count = weighted_count(lattice, l, 0, WalkMode::kSat, ones);
    tail = add_up(tail, enumeration_upper(plain, count, l));
  }

  // M = max_r |P_r(m)| w(gamma_r(m)) at z, rounded up.
  double big_m = 0;
  for (const PartitionClass& cls : g.partition.classes) {
    double w = up(static_cast<double>(cls.size));
    for (int i = 0; i < 2; ++i) {
      for (int e = 0; e < cls.rep_weight.exponent(i); ++e) {
        w = mul_up(w, z[static_cast<std::size_t>(i)]);
      }
    }
    big_m = std::max(big_m, w);
  }

  // S = sum_{j<delta} c_j(z) (c_0 = 1), rounded up; lengths not hit by the
  // block chain are filled through c_{m+q delta + j} <= c_{m+q delta} c_j.
  double s_small = 1.0;
  for (int j = 1; j < delta; ++j) {
    const double plain = weighted_count(lattice, j, 0, WalkMode::kSat, zv);
    const double count = weighted_count(lattice, j, 0, WalkMode::kSat, ones);
    s_small = add_up(s_small, enumeration_upper(plain, count, j));
  }

  // Up-rounded powers of the numeric matrix; q0 = first block count whose
  // max row sum drops below 1.
  const DenseMatrix a = eval_at_upper(g, zv);
  std::vector<DenseMatrix> powers;  // powers[q-1] = A^q
  powers.push_back(a);
  int q0 = 0;
  double rho = 0;
  for (int q = 1; q <= max_blocks; ++q) {
    if (q > static_cast<int>(powers.size())) powers.push_back(mat_mul_up(powers.back(), a));
    const double r = max_row_sum_up(powers[static_cast<std::size_t>(q) - 1]);
    if (r < 1.0) {
      q0 = q;
      rho = r;
      break;
    }
  }
  if (q0 == 0) {
    out.converged = false;
    out.tail_bound = std::numeric_limits<double>::infinity();
    out.total = std::numeric_limits<double>::infinity();
    return out;
  }

  // Smallest q >= 1 with m + q delta >= l_eff + 2 - delta; the chain then
  // covers every length >= l_eff + 1 and starts no later than l_eff + 1.
  int q_start = 1;
  while (m + q_start * delta < l_eff + 2 - delta) ++q_start;

  // Heads A^{q_start} .. A^{q_start+q0-1}; every later block factors
  // through one of them times a power of rho.
  double heads = 0;
  for (int b = 0; b < q0; ++b) {
    const int q = q_start + b;
    while (static_cast<int>(powers.size()) < q) powers.push_back(mat_mul_up(powers.back(), a));
    heads = add_up(heads, max_row_sum_up(powers[static_cast<std::size_t>(q) - 1]));
  }

  const double t_dim = static_cast<double>(g.t());
  double chain = mul_up(big_m, t_dim);
  chain = mul_up(chain, s_small);
  chain = mul_up(chain, heads);
  chain = div_up(chain, sub_down(1.0, rho));
  tail = add_up(tail, chain);

  out.tail_bound = tail;
  // The inflation folded into tail_bound dominates the rounding of this
  // final add, so the sum stays a rigorous upper bound.
  out.total = out.exact_partial + out.tail_bound;
  out.converged = true;
  return out;
}

std::string_view to_string(KPVerdict v) {
  switch (v) {
    case KPVerdict::kCertified:
      return "certified";
    case KPVerdict::kRejected:
      return "rejected";
    default:
      return "indeterminate";
  }
}

KPCertificate kp_check(const KPInstance& instance, const GMatrix& g, int max_exact_length) {
  if (!(instance.kp_t > 0)) throw PreconditionError("kp_t must be positive");

  KPCertificate cert;
  cert.instance = instance;
  cert.max_exact_length = max_exact_length;

  const double boost = exp_up(instance.kp_t);
  cert.z = {std::max(mul_up(std::abs(instance.epsilon), boost), kZeroLift),
            std::max(mul_up(std::abs(instance.alpha), boost), kZeroLift)};

  try {
    cert.bound = anchored_sat_bound(g, cert.z, max_exact_length);
  } catch (const Error& e) {
    cert.verdict = KPVerdict::kIndeterminate;
    cert.note = e.what();
    return cert;
  }
  if (!cert.bound.converged) {
    cert.verdict = KPVerdict::kIndeterminate;
    cert.note = "tail construction did not converge";
    return cert;
  }
  cert.verdict =
      cert.bound.total <= instance.kp_t ? KPVerdict::kCertified : KPVerdict::kRejected;
  return cert;
}

void write_kp_certificate(std::ostream& out, const KPCertificate& cert) {
  out << "kp-certificate 1\n";
  out << "epsilon " << fmt_double(cert.instance.epsilon) << '\n';
  out << "alpha " << fmt_double(cert.instance.alpha) << '\n';
  out << "kpT " << fmt_double(cert.instance.kp_t) << '\n';
  out << "z " << fmt_double(cert.z[0]) << ' ' << fmt_double(cert.z[1]) << '\n';
  out << "L " << cert.max_exact_length << '\n';
  out << "exactPartial " << fmt_double(cert.bound.exact_partial) << '\n';
  out << "tailBound " << fmt_double(cert.bound.tail_bound) << '\n';
  out << "total " << fmt_double(cert.bound.total) << '\n';
  out << "converged " << (cert.bound.converged ? 1 : 0) << '\n';
  out << "verdict " << to_string(cert.verdict) << '\n';
  if (!cert.note.empty()) out << "note " << cert.note << '\n';
}

EpsilonSearchResult find_epsilon0(std::span<const double> f_coeffs, double kp_t,
                                  const GMatrix& g, int max_exact_length) {
  if (!(kp_t > 0)) throw PreconditionError("kp_t must be positive");
  if (f_coeffs.empty()) throw PreconditionError("f needs at least a constant coefficient");
  const double f0 = f_coeffs[0];
  if (!(std::abs(f0) < 1.0)) {
    throw PreconditionError("hypothesis |f(0)| < 1 fails");
  }
  if (!(mul_up(std::abs(f0), exp_up(kp_t)) < 1.0)) {
    throw PreconditionError("hypothesis |f(0)| e^t < 1 fails");
  }

  auto f = [&f_coeffs](double eps) {
    double v = 0;
    for (std::size_t i = f_coeffs.size(); i-- > 0;) v = v * eps + f_coeffs[i];
    return v;
  };

  EpsilonSearchResult result;
  result.kp_t = kp_t;
  result.max_exact_length = max_exact_length;

  auto probe = [&](double eps) {
    const KPInstance inst{eps, f(eps), kp_t};
    const KPCertificate cert = kp_check(inst, g, max_exact_length);
    result.probes.push_back({eps, inst.alpha, cert.bound.total, cert.verdict});
    if (cert.verdict == KPVerdict::kCertified && eps > result.epsilon0) {
      result.found = true;
      result.epsilon0 = eps;
    }
    return cert.verdict == KPVerdict::kCertified;
  };

  double lo = 0.0;   // largest certified point so far (0 = none)
  double hi = 1.0;   // search cap
  if (probe(hi)) return result;
  for (int iter = 0; iter < 60 && hi - lo > 1e-12 * std::max(1.0, hi); ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= 0 || mid >= hi) break;
    if (probe(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return result;
}

void write_epsilon_certificate(std::ostream& out, const EpsilonSearchResult& result) {
  out << "epsilon0-certificate 1\n";
  out << "kpT " << fmt_double(result.kp_t) << '\n';
  out << "L " << result.max_exact_length << '\n';
  out << "found " << (result.found ? 1 : 0) << '\n';
  out << "epsilon0 " << fmt_double(result.epsilon0) << '\n';
  out << "probes " << result.probes.size() << '\n';
  for (const EpsilonProbe& p : result.probes) {
    out << "probe " << fmt_double(p.epsilon) << ' ' << fmt_double(p.alpha) << ' '
        << fmt_double(p.total) << ' ' << to_string(p.verdict) << '\n';
  }
}

}  // namespace sawbound
