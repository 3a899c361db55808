#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "../support/oracles.hpp"
#include "mems4/radial_operator.hpp"

using namespace mems4;

namespace {

double constant_load_error(std::size_t n, int dim) {
  const OperatorMatrix op = assemble_bilaplacian(build_grid(n, 1.5, Dimension(dim)));
  const std::vector<double> f(n, 1.0);
  const auto u = op.solve(f);
  double err = 0;
  for (std::size_t i = 0; i < n; ++i) {
    err = std::max(err, std::abs(u[i] - oracle::constant_load(1.0, dim, op.grid().node(i))));
  }
  return err;
}

}  // namespace

TEST_CASE("grid shape") {
  const auto g = build_grid(64, 1.5, Dimension(3));
  CHECK(g->size() == 64);
  CHECK(g->node(0) > 0);
  CHECK(g->node(63) < 1);
  for (std::size_t i = 1; i < g->size(); ++i) CHECK(g->node(i) > g->node(i - 1));
  // Cell measures add up to the ball measure / |S^{N-1}|.
  double total = g->boundary_weight();
  for (double w : g->weights()) total += w;
  CHECK(total == doctest::Approx(1.0 / 3.0).epsilon(1e-13));

  const RadialGrid fine = g->refined();
  CHECK(fine.size() == 129);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(fine.node(2 * i + 1) == doctest::Approx(g->node(i)).epsilon(1e-14));

  CHECK_THROWS_AS(build_grid(8, 1.5, Dimension(3)), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(64, 0.5, Dimension(3)), std::invalid_argument);
}

TEST_CASE("stiffness is symmetric positive definite and pentadiagonal") {
  const OperatorMatrix op = assemble_bilaplacian(build_grid(40, 1.3, Dimension(5)));
  const auto& k = op.stiffness();
  CHECK(k.bandwidth() == 2);
  BandedLDLT f(k);
  CHECK(f.negative_pivots() == 0);
  CHECK_FALSE(f.breakdown());
}

TEST_CASE("constant load converges at second order to the closed form") {
  for (int dim : {1, 2, 3, 9}) {
    const double e1 = constant_load_error(128, dim);
    const double e2 = constant_load_error(257, dim);
    CAPTURE(dim);
    CHECK(e1 < 1e-4);
    const double order = std::log2(e1 / e2);
    CHECK(order > 1.6);
    CHECK(order < 2.4);
  }
}

TEST_CASE("discrete bilaplacian of 1 - r^(4/3) approximates lambda_bar r^(-8/3)") {
  for (int dim : {3, 9, 17}) {
    const Dimension d(dim);
    const OperatorMatrix op = assemble_bilaplacian(build_grid(512, 1.5, d), {0, Rational(-4, 3)});
    const auto a = op.apply_profile(singular_profile());
    const double lb = to_double(lambda_bar(d));
    double err = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double r = op.grid().node(i);
      if (r < 0.1 || r > 0.9) continue;
      const double exact = lb * std::pow(r, -8.0 / 3.0);
      err = std::max(err, std::abs(a[i] - exact) / exact);
    }
    CAPTURE(dim);
    CHECK(err < 1e-2);
  }
}

TEST_CASE("apply_field matches apply on homogeneous data") {
  const OperatorMatrix op = assemble_bilaplacian(build_grid(32, 1.0, Dimension(2)));
  std::vector<double> v(32);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::cos(op.grid().node(i));
  const auto a = op.apply(v);
  const auto b = op.apply_field(v);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]));
  // solve inverts apply
  const auto back = op.solve(a);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(back[i] == doctest::Approx(v[i]).epsilon(1e-9));
}

TEST_CASE("Green matrix: positivity and weighted symmetry") {
  for (int dim : {1, 3, 9, 17}) {
    const OperatorMatrix op = assemble_bilaplacian(build_grid(64, 1.5, Dimension(dim)));
    const DenseMatrix g = green_matrix(op);
    const BoggioCheck b = boggio_check(g);
    CAPTURE(dim);
    CHECK(b.holds);
    CHECK(weighted_asymmetry(g, op.weights()) < 1e-10);
  }
}

TEST_CASE("first eigenvalue against the characteristic equations") {
  const double beam = oracle::beam_nu1();
  const double disc = oracle::disc_nu1();
  CHECK(beam == doctest::Approx(31.2852).epsilon(1e-5));
  CHECK(disc == doctest::Approx(104.363).epsilon(1e-5));

  const auto e1 = nu1(assemble_bilaplacian(build_grid(512, 1.5, Dimension(1))));
  CHECK(e1.converged);
  CHECK(std::abs(e1.value - beam) / beam < 2e-3);
  const auto e2 = nu1(assemble_bilaplacian(build_grid(512, 1.5, Dimension(2))));
  CHECK(e2.converged);
  CHECK(std::abs(e2.value - disc) / disc < 1e-2);
}

TEST_CASE("shifted eigenvalue equals nu1 minus a constant weight") {
  const OperatorMatrix op = assemble_bilaplacian(build_grid(128, 1.5, Dimension(3)));
  const double base = nu1(op).value;
  const std::vector<double> c(128, 7.0);
  const auto shifted = smallest_weighted_eigenvalue(op, c);
  CHECK(shifted.value == doctest::Approx(base - 7.0).epsilon(1e-8));
  CHECK(rayleigh_quotient(op, c, shifted.eigenfunction.values) == doctest::Approx(shifted.value).epsilon(1e-8));
}

TEST_CASE("banded LDLT counts negative eigenvalues") {
  BandedSymmetric a(4, 1);
  const double d[] = {2, -3, 5, -1};
  a.add_to_diagonal(d);
  BandedLDLT f(a);
  CHECK(f.negative_pivots() == 2);
  const double rhs[] = {2, -3, 5, -1};
  const auto x = f.solve(rhs);
  for (double v : x) CHECK(v == doctest::Approx(1.0));
}
