#pragma once

#include <stdexcept>

#include "mems4/power_sum.hpp"
#include "mems4/rational.hpp"

namespace mems4 {

/// Space dimension N >= 1.
class Dimension {
 public:
  explicit Dimension(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  }
  int value() const { return n_; }
  friend bool operator==(Dimension a, Dimension b) { return a.n_ == b.n_; }
  friend auto operator<=>(Dimension a, Dimension b) { return a.n_ <=> b.n_; }

 private:
  int n_;
};

/// Clamped boundary data u = alpha, du/dr = beta at r = 1.
struct BoundaryPair {
  Rational alpha = 0;
  Rational beta = 0;
};

/// Everything that depends on N alone.
struct Constants {
  Rational lambda_bar;
  Rational hardy;
  Dimension dimension;
};

/// 8(3N-2)(3N-8)/81: the parameter for which 1 - r^{4/3} is an exact solution.
Rational lambda_bar(Dimension n);

/// N^2 (N-4)^2 / 16, the optimal Hardy-Rellich constant.
Rational hardy_constant(Dimension n);

/// 32(10N - N^2 - 12)/27, the first of the two classical lower bounds on the
/// pull-in voltage (the second coincides with lambda_bar).
Rational classical_lower_bound(Dimension n);

Constants constants(Dimension n);

/// s(s+N-2): Laplacian of r^s is this times r^{s-2}.
Rational laplacian_power_coeff(const Rational& s, Dimension n);

/// s(s+N-2)(s-2)(s+N-4): bilaplacian of r^s is this times r^{s-4} for r > 0.
Rational bilaplacian_power_coeff(const Rational& s, Dimension n);

PowerSum apply_laplacian(const PowerSum& ps, Dimension n);
PowerSum apply_bilaplacian(const PowerSum& ps, Dimension n);

/// The biharmonic quadratic (alpha - beta/2) + (beta/2) r^2 carrying the
/// boundary data; subtracting it homogenizes the clamped conditions.
PowerSum phi_harmonic(const BoundaryPair& bp);

/// beta <= 0 and alpha - beta/2 < 1.
bool is_admissible(const BoundaryPair& bp);

/// 1 - r^{4/3}.
PowerSum singular_profile();

/// 1 - 3m/(3m-4) r^{4/3} + 4/(3m-4) r^m. Throws std::invalid_argument for
/// m <= 0 or m == 4/3.
PowerSum w_m(const Rational& m);

/// Whether w_m at this m lies inside the values the singularity argument
/// actually uses (m = 2 and m = 3).
bool w_m_within_known_claims(const Rational& m);

/// (lambda_star / lambda_bar)^{1/3}, exact when the ratio is a rational cube,
/// otherwise by rational bisection to the given relative precision.
/// Throws std::domain_error when lambda_bar(N) <= 0 or lambda_star <= 0.
Rational c0_constant(const Rational& lambda_star, Dimension n,
                     const Rational& rel_precision = Rational(1, 1000000000000));

/// w(r) -> r1^{-4/3} (w(r1 r) - 1) + 1. Requires every needed power of r1 to
/// be rational; throws std::domain_error otherwise.
PowerSum dilate(const PowerSum& w, const Rational& r1);

/// Boundary data of the dilated function: alpha' = r1^{-4/3}(alpha - 1) + 1,
/// beta' = r1^{-1/3} beta. Same exactness requirement as dilate().
BoundaryPair dilate_boundary(const BoundaryPair& bp, const Rational& r1);

}  // namespace mems4
