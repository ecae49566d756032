#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sawbound {

using BigInt = boost::multiprecision::cpp_int;

/// Exponent vector of a power product in d weight variables.
/// Ordered graded-lexicographically: first by total degree, then
/// lexicographically on the exponent vector. This order is the canonical
/// term order used everywhere (storage, printing, serialization).
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<int> exponents);

  // The monomial 1 in `nvars` variables.
  static Monomial unit(int nvars);

  int nvars() const { return static_cast<int>(e_.size()); }
  int degree() const;
  int exponent(int i) const { return e_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& exponents() const { return e_; }

  // Does this monomial divide `other` (exponent-wise <=)?
  bool divides(const Monomial& other) const;

  friend Monomial operator*(const Monomial& a, const Monomial& b);
  // Exact quotient; caller must ensure `by.divides(*this)`.
  Monomial divided_by(const Monomial& by) const;

  double eval(std::span<const double> z) const;

  // "x^2 * y^0": every variable is printed with its exponent.
  std::string to_string(std::span<const std::string> labels) const;

  std::strong_ordering operator<=>(const Monomial& other) const;
  bool operator==(const Monomial& other) const { return e_ == other.e_; }

 private:
  std::vector<int> e_;
};

/// Sparse multivariate polynomial with exact integer coefficients.
/// Terms are kept sorted in the canonical graded-lex order with no zero
/// coefficients stored. Only the operations the matrix pipeline needs are
/// exposed; in particular there is no general poly*poly product.
class Poly {
 public:
  using Term = std::pair<Monomial, BigInt>;

  Poly() = default;
  explicit Poly(int nvars) : nvars_(nvars) {}

  static Poly zero(int nvars) { return Poly(nvars); }
  static Poly from_monomial(Monomial m, BigInt coeff);

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }
  const std::vector<Term>& terms() const { return terms_; }

  // Adds c * m, merging with an existing term and dropping zeros.
  void add_term(const Monomial& m, const BigInt& c);

  friend Poly operator+(const Poly& a, const Poly& b);

  // this * (c * m), term-wise exponent shift and coefficient scale.
  Poly mul_monomial(const Monomial& m, const BigInt& c = BigInt(1)) const;

  // Exact division by a monomial. Throws ExactDivisionError if any term is
  // not divisible; a failure here signals a prefix-bookkeeping bug upstream.
  Poly div_monomial(const Monomial& m) const;

  // Evaluation at a strictly positive point, terms accumulated in canonical
  // order. Throws EvalOverflowError if the value overflows to infinity.
  double eval(std::span<const double> z) const;

  // Value at the all-ones point, exactly.
  BigInt coefficient_sum() const;

  int degree() const;  // -1 for the zero polynomial

  // Canonical text form: terms in graded-lex order, "c * x^e * y^e ..."
  // joined by " + "; the zero polynomial prints as "0".
  std::string to_string(std::span<const std::string> labels) const;

  // Inverse of to_string for the same label set.
  static Poly parse(std::string_view text, std::span<const std::string> labels);

  bool operator==(const Poly& other) const = default;

 private:
  int nvars_ = 0;
  std::vector<Term> terms_;
};

}  // namespace sawbound
