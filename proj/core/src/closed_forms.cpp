#include "mems4/closed_forms.hpp"

namespace mems4 {

namespace {

const Rational kFourThirds(4, 3);

Rational exact_power_or_throw(const Rational& base, const Rational& exponent) {
  auto p = exact_power(base, exponent);
  if (!p) {
    throw std::domain_error("dilation factor " + base.get_str() + "^(" + exponent.get_str() +
                            ") is irrational");
  }
  return *p;
}

}  // namespace

Rational lambda_bar(Dimension n) {
  const long N = n.value();
  return make_rational(8 * (3 * N - 2) * (3 * N - 8), 81);
}

Rational hardy_constant(Dimension n) {
  const long N = n.value();
  return make_rational(N * N * (N - 4) * (N - 4), 16);
}

Rational classical_lower_bound(Dimension n) {
  const long N = n.value();
  return make_rational(32 * (10 * N - N * N - 12), 27);
}

Constants constants(Dimension n) { return {lambda_bar(n), hardy_constant(n), n}; }

Rational laplacian_power_coeff(const Rational& s, Dimension n) {
  return s * (s + n.value() - 2);
}

Rational bilaplacian_power_coeff(const Rational& s, Dimension n) {
  return laplacian_power_coeff(s, n) * laplacian_power_coeff(s - 2, n);
}

PowerSum apply_laplacian(const PowerSum& ps, Dimension n) {
  std::vector<PowerTerm> out;
  for (const auto& t : ps.terms()) {
    out.push_back({t.coeff * laplacian_power_coeff(t.exponent, n), t.exponent - 2});
  }
  return PowerSum(std::move(out));
}

PowerSum apply_bilaplacian(const PowerSum& ps, Dimension n) {
  std::vector<PowerTerm> out;
  for (const auto& t : ps.terms()) {
    out.push_back({t.coeff * bilaplacian_power_coeff(t.exponent, n), t.exponent - 4});
  }
  return PowerSum(std::move(out));
}

PowerSum phi_harmonic(const BoundaryPair& bp) {
  return PowerSum({{bp.alpha - bp.beta / 2, Rational(0)}, {bp.beta / 2, Rational(2)}});
}

bool is_admissible(const BoundaryPair& bp) { return bp.beta <= 0 && bp.alpha - bp.beta / 2 < 1; }

PowerSum singular_profile() { return PowerSum({{Rational(1), Rational(0)}, {Rational(-1), kFourThirds}}); }

PowerSum w_m(const Rational& m) {
  if (m <= 0) throw std::invalid_argument("w_m requires m > 0");
  if (m == kFourThirds) throw std::invalid_argument("w_m has a coefficient pole at m = 4/3");
  const Rational denom = 3 * m - 4;
  return PowerSum({{Rational(1), Rational(0)}, {-3 * m / denom, kFourThirds}, {4 / denom, m}});
}

bool w_m_within_known_claims(const Rational& m) { return m == 2 || m == 3; }

Rational c0_constant(const Rational& lambda_star, Dimension n, const Rational& rel_precision) {
  const Rational lb = lambda_bar(n);
  if (lb <= 0) throw std::domain_error("C0 needs lambda_bar(N) > 0, i.e. N >= 3");
  if (lambda_star <= 0) throw std::domain_error("C0 needs a positive lambda*");
  if (rel_precision <= 0) throw std::invalid_argument("precision must be positive");
  const Rational ratio = lambda_star / lb;
  if (auto exact = exact_power(ratio, Rational(1, 3))) return *exact;

  Rational lo = 0;
  Rational hi = ratio > 1 ? ratio : Rational(1);
  while (hi - lo > rel_precision * lo || lo == 0) {
    Rational mid = (lo + hi) / 2;
    if (mid * mid * mid < ratio) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  Rational out = (lo + hi) / 2;
  out.canonicalize();
  return out;
}

PowerSum dilate(const PowerSum& w, const Rational& r1) {
  if (r1 <= 0 || r1 >= 1) throw std::invalid_argument("dilation radius must lie in (0,1)");
  std::vector<PowerTerm> out;
  for (const auto& t : w.terms()) {
    out.push_back({t.coeff * exact_power_or_throw(r1, t.exponent - kFourThirds), t.exponent});
  }
  const Rational shift = 1 - exact_power_or_throw(r1, -kFourThirds);
  out.push_back({shift, Rational(0)});
  return PowerSum(std::move(out));
}

BoundaryPair dilate_boundary(const BoundaryPair& bp, const Rational& r1) {
  if (r1 <= 0 || r1 >= 1) throw std::invalid_argument("dilation radius must lie in (0,1)");
  return {exact_power_or_throw(r1, -kFourThirds) * (bp.alpha - 1) + 1,
          exact_power_or_throw(r1, Rational(-1, 3)) * bp.beta};
}

}  // namespace mems4
