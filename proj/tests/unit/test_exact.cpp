#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mems4/polynomial.hpp"
#include "mems4/power_sum.hpp"
#include "mems4/rational.hpp"

using namespace mems4;

TEST_CASE("rational parsing is exact") {
  CHECK(parse_rational("0.1") == Rational(1, 10));
  CHECK(parse_rational("-2.5e-3") == Rational(-1, 400));
  CHECK(parse_rational("7/21") == Rational(1, 3));
  CHECK(parse_rational("12") == Rational(12));
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational(""), std::invalid_argument);
}

TEST_CASE("fraction strings round-trip") {
  for (const Rational& q : {Rational(3), Rational(-5, 7), Rational(0), parse_rational("123456789012345678901/3")}) {
    CHECK(parse_fraction_string(fraction_string(q)) == q);
  }
  CHECK(fraction_string(Rational(3)) == "3/1");
}

TEST_CASE("to_double rounds to nearest") {
  // 1/3 is not representable; nearest double is the one the compiler produces.
  CHECK(to_double(Rational(1, 3)) == 1.0 / 3.0);
  CHECK(to_double(Rational(-2, 3)) == -2.0 / 3.0);
  CHECK(to_double(from_double(0.1)) == 0.1);
}

TEST_CASE("exact powers") {
  CHECK(exact_power(Rational(1, 8), Rational(4, 3)) == Rational(1, 16));
  CHECK(exact_power(Rational(4), Rational(-1, 2)) == Rational(1, 2));
  CHECK_FALSE(exact_power(Rational(2), Rational(1, 2)).has_value());
  CHECK(ipow(Rational(2, 3), -2) == Rational(9, 4));
}

TEST_CASE("power sums normalize") {
  const PowerSum a = PowerSum::monomial(2, Rational(4, 3)) + PowerSum::monomial(-2, Rational(8, 6));
  CHECK(a.is_zero());
  const PowerSum w = PowerSum::constant(1) - PowerSum::monomial(1, Rational(4, 3));
  CHECK(w.value_at_one() == 0);
  CHECK(w.derivative() == PowerSum::monomial(Rational(-4, 3), Rational(1, 3)));
  CHECK(w.exponent_denominator_lcm() == 3);
  CHECK(w.evaluate_exact(Rational(1, 8)) == Rational(15, 16));
  CHECK_FALSE(w.evaluate_exact(Rational(1, 2)).has_value());
  CHECK(w(0.5) == doctest::Approx(1 - std::pow(0.5, 4.0 / 3)));
  CHECK((w * w) == w.pow(2));
  CHECK(w.shifted(2).coefficient(Rational(10, 3)) == -1);
}

TEST_CASE("polynomial arithmetic and division") {
  const RationalPolynomial x = RationalPolynomial::monomial(1, 1);
  const RationalPolynomial p = (x - RationalPolynomial::constant(1)) * (x - RationalPolynomial::constant(Rational(1, 2)));
  CHECK(p.degree() == 2);
  CHECK(p(Rational(1)) == 0);
  CHECK(p(Rational(1, 2)) == 0);
  const auto dm = divmod(p, x - RationalPolynomial::constant(1));
  CHECK(dm.remainder.is_zero());
  CHECK(dm.quotient == x - RationalPolynomial::constant(Rational(1, 2)));
  CHECK_THROWS_AS(divmod(p, RationalPolynomial()), std::domain_error);
  CHECK(RationalPolynomial().degree() == -1);
  CHECK(p.compose_linear(1, 2)(Rational(0)) == p(Rational(1)));
}

TEST_CASE("square-free part removes repeated roots") {
  const RationalPolynomial x = RationalPolynomial::monomial(1, 1);
  const RationalPolynomial a = x - RationalPolynomial::constant(Rational(1, 3));
  const RationalPolynomial p = a.pow(3) * (x + RationalPolynomial::constant(2));
  const RationalPolynomial q = square_free_part(p);
  CHECK(q.degree() == 2);
  CHECK(q(Rational(1, 3)) == 0);
  CHECK(q(Rational(-2)) == 0);
  CHECK(q.leading() == 1);
}

TEST_CASE("Sturm counts match known roots") {
  // Roots 1/5, 1/2, 3/4 and 2.
  const RationalPolynomial x = RationalPolynomial::monomial(1, 1);
  RationalPolynomial p = RationalPolynomial::constant(1);
  for (const Rational& r : {Rational(1, 5), Rational(1, 2), Rational(3, 4), Rational(2)}) {
    p = p * (x - RationalPolynomial::constant(r));
  }
  const SturmSequence s(p);
  CHECK(s.count_open(0, 1) == 3);
  CHECK(s.count_open(Rational(1, 2), 1) == 1);
  CHECK(s.count_half_open(0, Rational(1, 2)) == 2);
  CHECK(s.count_open(0, Rational(1, 2)) == 1);
  CHECK(s.count_open(-10, 10) == 4);

  const auto cells = isolate_roots(p, 0, 1);
  REQUIRE(cells.size() == 3);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k + 1 < cells.size()) CHECK(cells[k].hi < cells[k + 1].lo);
    CHECK(cells[k].lo > 0);
    CHECK(cells[k].hi < 1);
  }
}

TEST_CASE("root isolation on an irrational pair") {
  // x^2 - 1/2: single root 1/sqrt(2) in (0,1).
  const RationalPolynomial p({Rational(-1, 2), 0, 1});
  const auto cells = isolate_roots(p, 0, 1);
  REQUIRE(cells.size() == 1);
  CHECK_FALSE(cells[0].exact);
  CHECK(sign(p(cells[0].lo)) != sign(p(cells[0].hi)));
  CHECK(to_double(cells[0].lo) < 1 / std::sqrt(2.0));
  CHECK(to_double(cells[0].hi) > 1 / std::sqrt(2.0));
}

TEST_CASE("root isolation property: random products of linear factors") {
  // Deterministic pseudo-random rational roots in (0,1).
  unsigned state = 12345;
  auto next = [&] {
    state = state * 1103515245u + 12345u;
    return (state >> 8) % 997;
  };
  const RationalPolynomial x = RationalPolynomial::monomial(1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    RationalPolynomial p = RationalPolynomial::constant(1);
    std::vector<Rational> roots;
    const int k = 1 + static_cast<int>(next() % 6);
    for (int i = 0; i < k; ++i) {
      Rational r(static_cast<long>(1 + next()), 999);
      r.canonicalize();
      if (std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
      p = p * (x - RationalPolynomial::constant(r));
    }
    const auto cells = isolate_roots(square_free_part(p), 0, 1);
    CHECK(cells.size() == roots.size());
    for (const auto& r : roots) {
      const bool covered = std::any_of(cells.begin(), cells.end(), [&](const RootCell& c) {
        return c.exact ? c.lo == r : (c.lo < r && r < c.hi);
      });
      CHECK(covered);
    }
  }
}
