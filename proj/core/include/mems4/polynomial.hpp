#pragma once

#include <string>
#include <vector>

#include "mems4/rational.hpp"

namespace mems4 {

/// Dense polynomial with exact rational coefficients, ascending degree.
/// Trailing zeros are stripped, so the zero polynomial has no coefficients.
class RationalPolynomial {
 public:
  RationalPolynomial() = default;
  explicit RationalPolynomial(std::vector<Rational> ascending);

  static RationalPolynomial constant(const Rational& c);
  static RationalPolynomial monomial(const Rational& c, unsigned degree);
  /// a + b x
  static RationalPolynomial linear(const Rational& a, const Rational& b);

  const std::vector<Rational>& coefficients() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  Rational coefficient(unsigned k) const;
  Rational leading() const;

  Rational operator()(const Rational& x) const;
  long double eval_extended(long double x) const;

  RationalPolynomial derivative() const;
  RationalPolynomial pow(unsigned k) const;
  /// p(a + b x)
  RationalPolynomial compose_linear(const Rational& a, const Rational& b) const;
  /// Same roots, leading coefficient 1.
  RationalPolynomial monic() const;

  RationalPolynomial operator-() const;
  friend RationalPolynomial operator+(const RationalPolynomial& a, const RationalPolynomial& b);
  friend RationalPolynomial operator-(const RationalPolynomial& a, const RationalPolynomial& b);
  friend RationalPolynomial operator*(const RationalPolynomial& a, const RationalPolynomial& b);
  friend RationalPolynomial operator*(const Rational& s, const RationalPolynomial& a);
  friend bool operator==(const RationalPolynomial& a, const RationalPolynomial& b) { return a.c_ == b.c_; }

  std::string to_string(const std::string& var = "x") const;

 private:
  void trim();
  std::vector<Rational> c_;
};

struct DivMod {
  RationalPolynomial quotient;
  RationalPolynomial remainder;
};

/// Euclidean division; throws std::domain_error for a zero divisor.
DivMod divmod(const RationalPolynomial& a, const RationalPolynomial& b);

/// Monic gcd (zero if both are zero).
RationalPolynomial gcd(const RationalPolynomial& a, const RationalPolynomial& b);

/// p / gcd(p, p'), monic: the same distinct roots, all simple.
RationalPolynomial square_free_part(const RationalPolynomial& p);

/// Sturm chain of a square-free polynomial. Each remainder is rescaled to a
/// monic polynomial with the sign the classical chain prescribes, which keeps
/// coefficient growth in check without changing any sign variation count.
class SturmSequence {
 public:
  explicit SturmSequence(const RationalPolynomial& square_free);

  const std::vector<RationalPolynomial>& chain() const { return chain_; }
  /// Sign variations of the chain at x, zeros skipped.
  int variations(const Rational& x) const;
  /// Distinct roots in the half-open interval (a, b].
  int count_half_open(const Rational& a, const Rational& b) const;
  /// Distinct roots in the open interval (a, b).
  int count_open(const Rational& a, const Rational& b) const;

 private:
  std::vector<RationalPolynomial> chain_;
};

/// A real root of a square-free polynomial: either exactly `lo` (exact) or
/// the unique root strictly inside (lo, hi).
struct RootCell {
  Rational lo;
  Rational hi;
  bool exact = false;
};

/// Isolates every root of the square-free q in the open interval (a, b),
/// sorted increasingly, with pairwise separated cells: for consecutive cells
/// hi_k < lo_{k+1}, and a < lo_0, hi_last < b.
std::vector<RootCell> isolate_roots(const RationalPolynomial& q, const Rational& a, const Rational& b);

}  // namespace mems4
