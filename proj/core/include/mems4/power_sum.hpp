#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mems4/rational.hpp"

namespace mems4 {

/// coeff * r^exponent
struct PowerTerm {
  Rational coeff;
  Rational exponent;
};

/// A finite sum of rational multiples of rational powers of the radius.
///
/// Terms are kept sorted by exponent with no duplicates and no zero
/// coefficients, so two sums denoting the same function compare equal.
class PowerSum {
 public:
  PowerSum() = default;
  explicit PowerSum(std::vector<PowerTerm> terms);

  static PowerSum constant(const Rational& c);
  static PowerSum monomial(const Rational& coeff, const Rational& exponent);

  const std::vector<PowerTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Coefficient of r^exponent (0 when absent).
  Rational coefficient(const Rational& exponent) const;
  Rational min_exponent() const;
  Rational max_exponent() const;
  /// lcm of all exponent denominators; 1 for the zero sum.
  BigInt exponent_denominator_lcm() const;

  PowerSum operator-() const;
  PowerSum& operator+=(const PowerSum& other);
  PowerSum& operator-=(const PowerSum& other);
  PowerSum& operator*=(const Rational& scale);
  friend PowerSum operator+(PowerSum a, const PowerSum& b) { return a += b; }
  friend PowerSum operator-(PowerSum a, const PowerSum& b) { return a -= b; }
  friend PowerSum operator*(PowerSum a, const Rational& s) { return a *= s; }
  friend PowerSum operator*(const Rational& s, PowerSum a) { return a *= s; }
  friend PowerSum operator*(const PowerSum& a, const PowerSum& b);
  friend bool operator==(const PowerSum& a, const PowerSum& b);

  PowerSum pow(unsigned k) const;
  /// d/dr, termwise.
  PowerSum derivative() const;
  /// Multiplies by r^shift.
  PowerSum shifted(const Rational& shift) const;

  double operator()(double r) const;
  long double eval_extended(long double r) const;
  /// Exact value at rational r when every r^s is rational, else std::nullopt.
  std::optional<Rational> evaluate_exact(const Rational& r) const;
  /// Sum of the coefficients, i.e. the value at r = 1.
  Rational value_at_one() const;

  std::string to_string(const std::string& var = "r") const;

 private:
  void normalize();
  std::vector<PowerTerm> terms_;
};

}  // namespace mems4
