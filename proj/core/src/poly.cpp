#include "sawbound/poly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "sawbound/errors.hpp"

namespace sawbound {

namespace {

// z^e by repeated multiplication; exponents are small, and a fixed order of
// operations keeps evaluation deterministic.
double int_pow(double base, int exp) {
  double r = 1.0;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

Monomial::Monomial(std::vector<int> exponents) : e_(std::move(exponents)) {
  for (int e : e_) {
    if (e < 0) throw PreconditionError("monomial exponents must be nonnegative");
  }
}

Monomial Monomial::unit(int nvars) {
  return Monomial(std::vector<int>(static_cast<std::size_t>(nvars), 0));
}

int Monomial::degree() const {
  return std::accumulate(e_.begin(), e_.end(), 0);
}

bool Monomial::divides(const Monomial& other) const {
  if (e_.size() != other.e_.size()) return false;
  for (std::size_t i = 0; i < e_.size(); ++i) {
    if (e_[i] > other.e_[i]) return false;
  }
  return true;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  if (a.nvars() != b.nvars()) throw PreconditionError("monomial variable count mismatch");
  std::vector<int> e(a.e_.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = a.e_[i] + b.e_[i];
  return Monomial(std::move(e));
}

Monomial Monomial::divided_by(const Monomial& by) const {
  if (!by.divides(*this)) throw ExactDivisionError("monomial does not divide");
  std::vector<int> e(e_.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = e_[i] - by.e_[i];
  return Monomial(std::move(e));
}

double Monomial::eval(std::span<const double> z) const {
  double r = 1.0;
  for (std::size_t i = 0; i < e_.size(); ++i) r *= int_pow(z[i], e_[i]);
  return r;
}

std::string Monomial::to_string(std::span<const std::string> labels) const {
  std::ostringstream out;
  for (std::size_t i = 0; i < e_.size(); ++i) {
    if (i > 0) out << " * ";
    out << labels[i] << '^' << e_[i];
  }
  return out.str();
}

std::strong_ordering Monomial::operator<=>(const Monomial& other) const {
  const int da = degree();
  const int db = other.degree();
  if (da != db) return da <=> db;
  return e_ <=> other.e_;
}

Poly Poly::from_monomial(Monomial m, BigInt coeff) {
  Poly p(m.nvars());
  p.add_term(m, coeff);
  return p;
}

void Poly::add_term(const Monomial& m, const BigInt& c) {
  if (m.nvars() != nvars_) throw PreconditionError("term variable count mismatch");
  if (c == 0) return;
  auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                             [](const Term& t, const Monomial& key) { return t.first < key; });
  if (it != terms_.end() && it->first == m) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  } else {
    terms_.insert(it, Term{m, c});
  }
}

Poly operator+(const Poly& a, const Poly& b) {
  if (a.nvars_ != b.nvars_) throw PreconditionError("polynomial variable count mismatch");
  Poly r(a.nvars_);
  r.terms_.reserve(a.terms_.size() + b.terms_.size());
  auto ia = a.terms_.begin();
  auto ib = b.terms_.begin();
  while (ia != a.terms_.end() && ib != b.terms_.end()) {
    if (ia->first < ib->first) {
      r.terms_.push_back(*ia++);
    } else if (ib->first < ia->first) {
      r.terms_.push_back(*ib++);
    } else {
      BigInt c = ia->second + ib->second;
      if (c != 0) r.terms_.push_back(Poly::Term{ia->first, std::move(c)});
      ++ia;
      ++ib;
    }
  }
  r.terms_.insert(r.terms_.end(), ia, a.terms_.end());
  r.terms_.insert(r.terms_.end(), ib, b.terms_.end());
  return r;
}

Poly Poly::mul_monomial(const Monomial& m, const BigInt& c) const {
  Poly r(nvars_);
  if (c == 0) return r;
  r.terms_.reserve(terms_.size());
  for (const Term& t : terms_) {
    r.terms_.push_back(Term{t.first * m, t.second * c});
  }
  // Shifting by a fixed monomial preserves the graded-lex order.
  return r;
}

Poly Poly::div_monomial(const Monomial& m) const {
  Poly r(nvars_);
  r.terms_.reserve(terms_.size());
  for (const Term& t : terms_) {
    if (!m.divides(t.first)) {
      throw ExactDivisionError("polynomial term not divisible by monomial");
    }
    r.terms_.push_back(Term{t.first.divided_by(m), t.second});
  }
  return r;
}

double Poly::eval(std::span<const double> z) const {
  if (static_cast<int>(z.size()) != nvars_) {
    throw PreconditionError("evaluation point dimension mismatch");
  }
  double sum = 0.0;
  for (const Term& t : terms_) {
    sum += t.second.convert_to<double>() * t.first.eval(z);
  }
  if (!std::isfinite(sum)) throw EvalOverflowError("polynomial evaluation overflowed");
  return sum;
}

BigInt Poly::coefficient_sum() const {
  BigInt s = 0;
  for (const Term& t : terms_) s += t.second;
  return s;
}

int Poly::degree() const {
  if (terms_.empty()) return -1;
  return terms_.back().first.degree();
}

std::string Poly::to_string(std::span<const std::string> labels) const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const Term& t : terms_) {
    if (!first) out << " + ";
    first = false;
    out << t.second.str() << " * " << t.first.to_string(labels);
  }
  return out.str();
}

Poly Poly::parse(std::string_view text, std::span<const std::string> labels) {
  const int nvars = static_cast<int>(labels.size());
  Poly p(nvars);
  if (text == "0") return p;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t next = text.find(" + ", pos);
    std::string_view termstr =
        text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);

    std::istringstream in{std::string(termstr)};
    std::string coeff_str;
    in >> coeff_str;
    if (coeff_str.empty()) throw ParseError("empty polynomial term");
    BigInt coeff;
    try {
      coeff = BigInt(coeff_str);
    } catch (const std::exception&) {
      throw ParseError("bad polynomial coefficient: " + coeff_str);
    }
    std::vector<int> exps(static_cast<std::size_t>(nvars), 0);
    for (int i = 0; i < nvars; ++i) {
      std::string star, factor;
      in >> star >> factor;
      if (star != "*") throw ParseError("malformed polynomial term: " + std::string(termstr));
      const std::string& label = labels[static_cast<std::size_t>(i)];
      if (factor.size() < label.size() + 2 || factor.compare(0, label.size(), label) != 0 ||
          factor[label.size()] != '^') {
        throw ParseError("unexpected variable in polynomial term: " + factor);
      }
      exps[static_cast<std::size_t>(i)] = std::stoi(factor.substr(label.size() + 1));
    }
    std::string rest;
    if (in >> rest) throw ParseError("trailing content in polynomial term");
    p.add_term(Monomial(std::move(exps)), coeff);

    if (next == std::string_view::npos) break;
    pos = next + 3;
  }
  return p;
}

}  // namespace sawbound
