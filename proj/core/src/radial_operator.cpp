#include "mems4/radial_operator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mems4 {

RadialGrid::RadialGrid(std::size_t n_nodes, double gamma, Dimension dim) : gamma_(gamma), dim_(dim) {
  if (n_nodes < kMinNodes) throw std::invalid_argument("grid needs at least 16 interior nodes");
  if (!(gamma >= 1.0)) throw std::invalid_argument("grid grading exponent must be >= 1");
  const double h = 1.0 / static_cast<double>(n_nodes + 1);
  nodes_.resize(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) nodes_[i] = std::pow(static_cast<double>(i + 1) * h, gamma);

  const double N = dim.value();
  auto measure = [N](double a, double b) { return (std::pow(b, N) - std::pow(a, N)) / N; };
  weights_.resize(n_nodes);
  double left = 0.0;
  for (std::size_t i = 0; i < n_nodes; ++i) {
    const double right = 0.5 * (nodes_[i] + (i + 1 < n_nodes ? nodes_[i + 1] : 1.0));
    weights_[i] = measure(left, right);
    left = right;
  }
  boundary_weight_ = measure(left, 1.0);
}

RadialGrid RadialGrid::refined() const { return RadialGrid(2 * size() + 1, gamma_, dim_); }

GridPtr build_grid(std::size_t n_nodes, double gamma, Dimension dim) {
  return std::make_shared<const RadialGrid>(n_nodes, gamma, dim);
}

double RadialField::max() const {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

namespace {

// Flux-form radial Laplacian rows for nodes 1..n+1, in scalar type T. The
// double instance drives the solver; the long double instance evaluates the
// same discrete operator on closed-form profiles with less cancellation.
template <class T>
struct LaplacianStencil {
  std::vector<T> lower, diag, upper, weight;

  explicit LaplacianStencil(const RadialGrid& g) {
    const std::size_t n = g.size();
    const T N = static_cast<T>(g.dimension().value());
    auto r = [&](std::size_t i) -> T { return i < n ? static_cast<T>(g.node(i)) : T(1); };
    auto measure = [N](T a, T b) { return (std::pow(b, N) - std::pow(a, N)) / N; };

    std::vector<T> mid(n), flux(n);
    for (std::size_t i = 0; i < n; ++i) {
      mid[i] = (r(i) + r(i + 1)) / 2;
      flux[i] = std::pow(mid[i], N - 1) / (r(i + 1) - r(i));
    }
    weight.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) weight[i] = measure(i > 0 ? mid[i - 1] : T(0), i < n ? mid[i] : T(1));

    lower.assign(n + 1, T(0));
    diag.assign(n + 1, T(0));
    upper.assign(n + 1, T(0));
    for (std::size_t i = 0; i < n; ++i) {
      const T left = i > 0 ? flux[i - 1] : T(0);
      lower[i] = left / weight[i];
      upper[i] = i + 1 < n ? flux[i] / weight[i] : T(0);
      diag[i] = -(left + flux[i]) / weight[i];
    }
    // boundary node: u = 0 there and zero flux through r = 1
    lower[n] = flux[n - 1] / weight[n];
  }

  std::vector<T> apply(std::span<const T> v) const {
    const std::size_t n = v.size();
    std::vector<T> out(n + 1, T(0));
    for (std::size_t i = 0; i <= n; ++i) {
      T s = 0;
      if (i > 0) s += lower[i] * v[i - 1];
      if (i < n) s += diag[i] * v[i];
      if (i + 1 < n) s += upper[i] * v[i + 1];
      out[i] = s;
    }
    return out;
  }

  // (L^T Omega L v)_i / omega_i, which in the interior equals L(Lv).
  std::vector<T> bilaplacian(std::span<const T> v) const {
    const std::size_t n = v.size();
    const auto lap = apply(v);
    std::vector<T> out(n, T(0));
    for (std::size_t j = 0; j < n; ++j) {
      T s = 0;
      for (std::size_t i = (j > 0 ? j - 1 : 0); i <= std::min(j + 1, n); ++i) {
        T lij = i == j ? diag[i] : (i + 1 == j ? upper[i] : lower[i]);
        s += weight[i] * lij * lap[i];
      }
      out[j] = s / weight[j];
    }
    return out;
  }
};

}  // namespace

OperatorMatrix::OperatorMatrix(GridPtr grid, BoundaryPair bp) : grid_(std::move(grid)), bp_(std::move(bp)) {
  const auto& g = *grid_;
  const std::size_t n = g.size();
  const double N = g.dimension().value();
  const LaplacianStencil<double> stencil(g);
  lap_lower_ = stencil.lower;
  lap_diag_ = stencil.diag;
  lap_upper_ = stencil.upper;
  const auto w = g.weights();

  stiffness_ = BandedSymmetric(n, 2);
  auto row_weight = [&](std::size_t i) { return i < n ? w[i] : g.boundary_weight(); };
  for (std::size_t i = 0; i <= n; ++i) {
    struct Entry {
      std::size_t col;
      double val;
    };
    Entry entries[3];
    std::size_t count = 0;
    if (i > 0) entries[count++] = {i - 1, lap_lower_[i]};
    if (i < n) entries[count++] = {i, lap_diag_[i]};
    if (i + 1 < n) entries[count++] = {i + 1, lap_upper_[i]};
    const double om = row_weight(i);
    for (std::size_t a = 0; a < count; ++a) {
      for (std::size_t b = a; b < count; ++b) {
        const double v = om * entries[a].val * entries[b].val;
        if (a == b) {
          stiffness_.add(entries[a].col, entries[a].col, v);
        } else {
          stiffness_.add(entries[a].col, entries[b].col, v);
        }
      }
    }
  }
  factor_ = std::make_shared<const BandedLDLT>(stiffness_);
  if (factor_->negative_pivots() != 0 || factor_->breakdown()) {
    throw std::logic_error("clamped bilaplacian is not positive definite");
  }

  const PowerSum phi = phi_harmonic(bp_);
  phi_.resize(n);
  for (std::size_t i = 0; i < n; ++i) phi_[i] = phi(g.node(i));
  phi_laplacian_ = N * to_double(bp_.beta);
}

std::vector<double> OperatorMatrix::apply(std::span<const double> v) const {
  auto y = stiffness_.multiply(v);
  const auto w = weights();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] /= w[i];
  return y;
}

std::vector<double> OperatorMatrix::apply_field(std::span<const double> u) const {
  if (u.size() != phi_.size()) throw std::invalid_argument("field length mismatch");
  std::vector<double> v(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) v[i] = u[i] - phi_[i];
  return apply(v);
}

std::vector<double> OperatorMatrix::laplacian(std::span<const double> v) const {
  const std::size_t n = grid_->size();
  if (v.size() != n) throw std::invalid_argument("field length mismatch");
  std::vector<double> out(n + 1, 0.0);
  for (std::size_t i = 0; i <= n; ++i) {
    double s = 0.0;
    if (i > 0) s += lap_lower_[i] * v[i - 1];
    if (i < n) s += lap_diag_[i] * v[i];
    if (i + 1 < n) s += lap_upper_[i] * v[i + 1];
    out[i] = s;
  }
  return out;
}

std::vector<double> OperatorMatrix::solve(std::span<const double> f) const {
  const auto w = weights();
  if (f.size() != w.size()) throw std::invalid_argument("load length mismatch");
  std::vector<double> b(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) b[i] = w[i] * f[i];
  return factor_->solve(b);
}

double OperatorMatrix::bending_energy(std::span<const double> v) const {
  const auto lap = laplacian(v);
  const auto w = weights();
  double e = 0.0;
  for (std::size_t i = 0; i < lap.size(); ++i) {
    const double d = lap[i] + phi_laplacian_;
    e += (i < w.size() ? w[i] : grid_->boundary_weight()) * d * d;
  }
  return e;
}

std::vector<double> OperatorMatrix::apply_profile(const PowerSum& u) const {
  const auto& g = *grid_;
  const PowerSum v = u - phi_harmonic(bp_);
  std::vector<long double> samples(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) samples[i] = v.eval_extended(g.node(i));
  const auto out = LaplacianStencil<long double>(g).bilaplacian(samples);
  return {out.begin(), out.end()};
}

OperatorMatrix assemble_bilaplacian(GridPtr grid, const BoundaryPair& bp) {
  return OperatorMatrix(std::move(grid), bp);
}

DenseMatrix green_matrix(const OperatorMatrix& op) {
  const std::size_t n = op.grid().size();
  DenseMatrix g{n, std::vector<double>(n * n, 0.0)};
  std::vector<double> load(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    load[j] = 1.0;
    const auto col = op.solve(load);
    load[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) g.data[i * n + j] = col[i];
  }
  return g;
}

BoggioCheck boggio_check(const DenseMatrix& g, double eps_pos) {
  const auto [mn, mx] = std::minmax_element(g.data.begin(), g.data.end());
  BoggioCheck out{*mn, *mx, eps_pos * *mx, false};
  out.holds = out.min_entry >= -out.tolerance;
  return out;
}

double weighted_asymmetry(const DenseMatrix& g, std::span<const double> weights) {
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) {
    for (std::size_t j = 0; j < g.n; ++j) {
      const double a = g(i, j) / weights[j];
      const double b = g(j, i) / weights[i];
      diff = std::max(diff, std::abs(a - b));
      scale = std::max(scale, std::abs(a));
    }
  }
  return scale > 0 ? diff / scale : 0.0;
}

namespace {

BandedSymmetric shifted_matrix(const OperatorMatrix& op, std::span<const double> weight, double sigma) {
  BandedSymmetric a = op.stiffness();
  const auto w = op.weights();
  std::vector<double> diag(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) diag[i] = -w[i] * ((weight.empty() ? 0.0 : weight[i]) + sigma);
  a.add_to_diagonal(diag);
  return a;
}

double weighted_norm(std::span<const double> x, std::span<const double> w) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * x[i] * x[i];
  return std::sqrt(s);
}

EigenResult smallest_eigenvalue_impl(const OperatorMatrix& op, std::span<const double> weight,
                                     const EigenOptions& opts) {
  const std::size_t n = op.grid().size();
  const auto w = op.weights();
  EigenResult out;
  out.eigenfunction.grid = op.grid_ptr();

  auto count_below = [&](double sigma) { return BandedLDLT(shifted_matrix(op, weight, sigma)).negative_pivots(); };

  // Shift strictly below the smallest eigenvalue so inverse iteration
  // targets it; Sylvester inertia certifies the shift.
  double sigma = 0.0;
  if (count_below(0.0) > 0) {
    double wmax = 0.0;
    for (double c : weight) wmax = std::max(wmax, c);
    double lo = -(wmax + 1.0);
    double hi = 0.0;
    for (int k = 0; k < 200 && count_below(lo) > 0; ++k) lo *= 2.0;
    for (int k = 0; k < 60; ++k) {
      const double mid = 0.5 * (lo + hi);
      if (count_below(mid) > 0) {
        hi = mid;
      } else {
        lo = mid;
      }
      if (hi - lo <= 1e-3 * std::abs(lo)) break;
    }
    sigma = lo;
    std::ostringstream os;
    os << "indefinite at 0; shift " << sigma << " certified below the spectrum";
    out.log.push_back(os.str());
  }
  BandedLDLT factor(shifted_matrix(op, weight, sigma));

  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = op.grid().node(i);
    x[i] = (1.0 - r * r) * (1.0 - r * r);
  }
  double nx = weighted_norm(x, w);
  for (auto& xi : x) xi /= nx;

  double mu_prev = rayleigh_quotient(op, weight, x);
  for (int it = 1; it <= opts.max_iterations; ++it) {
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = w[i] * x[i];
    x = factor.solve(b);
    nx = weighted_norm(x, w);
    for (auto& xi : x) xi /= nx;
    const double mu = rayleigh_quotient(op, weight, x);
    out.iterations = it;
    if (std::abs(mu - mu_prev) <= opts.rel_tol * std::max(1.0, std::abs(mu))) {
      out.value = mu;
      out.converged = true;
      break;
    }
    mu_prev = mu;
    out.value = mu;
  }
  if (!out.converged) {
    std::ostringstream os;
    os << "inverse iteration did not converge in " << opts.max_iterations << " steps; last " << out.value;
    out.log.push_back(os.str());
  }
  // fix the sign so the eigenfunction is positive at the center
  if (x.front() < 0) {
    for (auto& xi : x) xi = -xi;
  }
  out.eigenfunction.values = std::move(x);
  return out;
}

}  // namespace

double rayleigh_quotient(const OperatorMatrix& op, std::span<const double> weight, std::span<const double> x) {
  // x^T K x as the sum of squares sum_i omega_i (Lx)_i^2 avoids the
  // cancellation of forming K x first.
  const auto lap = op.laplacian(x);
  const auto w = op.weights();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < lap.size(); ++i) {
    num += (i < w.size() ? w[i] : op.grid().boundary_weight()) * lap[i] * lap[i];
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    num -= (weight.empty() ? 0.0 : weight[i]) * w[i] * x[i] * x[i];
    den += w[i] * x[i] * x[i];
  }
  return num / den;
}

EigenResult nu1(const OperatorMatrix& op, const EigenOptions& opts) { return smallest_eigenvalue_impl(op, {}, opts); }

EigenResult smallest_weighted_eigenvalue(const OperatorMatrix& op, std::span<const double> weight,
                                         const EigenOptions& opts) {
  if (weight.size() != op.grid().size()) throw std::invalid_argument("weight length mismatch");
  for (double c : weight) {
    if (!std::isfinite(c) || c < 0) throw std::invalid_argument("stability weight must be finite and nonnegative");
  }
  return smallest_eigenvalue_impl(op, weight, opts);
}

}  // namespace mems4
