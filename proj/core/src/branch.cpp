#include "mems4/branch.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mems4 {

std::string to_string(DivergenceReason r) {
  switch (r) {
    case DivergenceReason::touchdown: return "touchdown";
    case DivergenceReason::unstable_linearization: return "unstable-linearization";
    case DivergenceReason::newton_stalled: return "newton-stalled";
  }
  return "unknown";
}

std::string to_string(PullInMethod m) {
  return m == PullInMethod::bisection_on_convergence ? "bisection-on-convergence" : "mu1-extrapolation";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::regular_consistent: return "regular-consistent";
    case Verdict::singular_consistent: return "singular-consistent";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string to_string(KnownRegime k) {
  switch (k) {
    case KnownRegime::regular: return "regular";
    case KnownRegime::singular: return "singular";
    case KnownRegime::open: return "open";
  }
  return "open";
}

KnownRegime known_regime(Dimension n) {
  if (n.value() <= 8) return KnownRegime::regular;
  if (n.value() >= 17) return KnownRegime::singular;
  return KnownRegime::open;
}

namespace {

struct Workspace {
  const OperatorMatrix& op;
  double lambda;
  std::span<const double> phi;
  std::span<const double> w;

  Workspace(const OperatorMatrix& o, double l) : op(o), lambda(l), phi(o.phi()), w(o.weights()) {}

  double u(const std::vector<double>& v, std::size_t i) const { return v[i] + phi[i]; }

  // lambda/(1-u)^2; nullopt when some node reaches the ceiling.
  std::optional<std::vector<double>> load(const std::vector<double>& v, double ceiling) const {
    std::vector<double> f(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double ui = u(v, i);
      if (!(ui < ceiling)) return std::nullopt;
      const double gap = 1.0 - ui;
      f[i] = lambda / (gap * gap);
    }
    return f;
  }

  // sup |v - G load(v)|
  double fixed_point_defect(const std::vector<double>& v, const std::vector<double>& f) const {
    const auto next = op.solve(f);
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) d = std::max(d, std::abs(next[i] - v[i]));
    return d;
  }
};

double max_of(const std::vector<double>& v, std::span<const double> phi) {
  double m = -1e300;
  for (std::size_t i = 0; i < v.size(); ++i) m = std::max(m, v[i] + phi[i]);
  return m;
}

RadialField as_field(const OperatorMatrix& op, const std::vector<double>& v) {
  RadialField f{op.grid_ptr(), v};
  const auto phi = op.phi();
  for (std::size_t i = 0; i < v.size(); ++i) f.values[i] += phi[i];
  return f;
}

DivergenceReport diverged(const OperatorMatrix& op, double lambda, DivergenceReason why, const std::vector<double>& v,
                          int iterations, std::string detail) {
  return {lambda, why, as_field(op, v), iterations, std::move(detail)};
}

std::vector<double> stability_weight(const OperatorMatrix& op, double lambda, const std::vector<double>& u) {
  (void)op;
  std::vector<double> c(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double gap = 1.0 - u[i];
    c[i] = 2.0 * lambda / (gap * gap * gap);
  }
  return c;
}

BranchPoint finish_point(const OperatorMatrix& op, double lambda, const std::vector<double>& v, double residual,
                         int mono, int newton, double defect, const SolverOptions& opts) {
  BranchPoint p;
  p.lambda = lambda;
  p.field = as_field(op, v);
  p.max_value = p.field.max();
  p.residual = residual;
  p.monotone_iterations = mono;
  p.newton_iterations = newton;
  p.monotone_defect = defect;
  p.energy_h2 = op.bending_energy(v);
  const auto w = op.weights();
  double cubed = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) cubed += w[i] / std::pow(1.0 - p.field.values[i], 3);
  cubed += op.grid().boundary_weight() / std::pow(1.0 - to_double(op.boundary().alpha), 3);
  p.energy_cubed = cubed;
  if (opts.compute_mu1) {
    const auto weight = stability_weight(op, lambda, p.field.values);
    p.mu1 = smallest_weighted_eigenvalue(op, weight).value;
  }
  return p;
}

// Newton on K v = W lambda/(1 - v - Phi)^2 from v. Returns the converged
// shifted field or a divergence.
std::variant<std::vector<double>, DivergenceReport> newton(const Workspace& ws, std::vector<double> v,
                                                           const SolverOptions& opts, int& iterations,
                                                           double& residual) {
  const auto& op = ws.op;
  const std::size_t n = v.size();
  const double ceiling = 1.0 - opts.ceiling_eps;
  for (int it = 1; it <= opts.max_newton; ++it) {
    iterations = it;
    auto f = ws.load(v, ceiling);
    if (!f) return diverged(op, ws.lambda, DivergenceReason::touchdown, v, it, "Newton iterate reached the ceiling");

    // Step from the fixed-point defect g = G f - v: (K - W D) step = K g.
    // Forming W f - K v directly loses ~|v|/h^4 to rounding.
    std::vector<double> g = op.solve(*f);
    for (std::size_t i = 0; i < n; ++i) g[i] -= v[i];
    const std::vector<double> rhs = op.stiffness().multiply(g);
    BandedSymmetric jac = op.stiffness();
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double gap = 1.0 - ws.u(v, i);
      diag[i] = -ws.w[i] * 2.0 * ws.lambda / (gap * gap * gap);
    }
    jac.add_to_diagonal(diag);
    BandedLDLT factor(jac);
    if (factor.breakdown()) {
      return diverged(op, ws.lambda, DivergenceReason::unstable_linearization, v, it, "singular linearization");
    }
    const auto step = factor.solve(rhs);

    double scale = 1.0;
    std::vector<double> trial(n);
    bool accepted = false;
    for (int halving = 0; halving < 12; ++halving, scale *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = v[i] + scale * step[i];
      if (max_of(trial, ws.phi) < ceiling) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      return diverged(op, ws.lambda, DivergenceReason::touchdown, v, it, "damped Newton step still reaches the ceiling");
    }
    double step_norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) step_norm = std::max(step_norm, std::abs(trial[i] - v[i]));
    v.swap(trial);

    if (step_norm <= opts.tol) {
      auto fv = ws.load(v, ceiling);
      if (!fv) return diverged(op, ws.lambda, DivergenceReason::touchdown, v, it, "converged onto the ceiling");
      residual = ws.fixed_point_defect(v, *fv);
      if (residual <= opts.tol) {
        // Convex overshoot can put intermediate iterates above the branch; only
        // the limit has to be linearly stable.
        BandedSymmetric jl = op.stiffness();
        std::vector<double> dl(n);
        for (std::size_t i = 0; i < n; ++i) {
          const double gap = 1.0 - ws.u(v, i);
          dl[i] = -ws.w[i] * 2.0 * ws.lambda / (gap * gap * gap);
        }
        jl.add_to_diagonal(dl);
        const BandedLDLT fl(jl);
        if (fl.negative_pivots() > 0) {
          std::ostringstream os;
          os << fl.negative_pivots() << " negative pivot(s) at the Newton limit";
          return diverged(op, ws.lambda, DivergenceReason::unstable_linearization, v, it, os.str());
        }
        return v;
      }
    }
  }
  std::ostringstream os;
  os << "no convergence in " << opts.max_newton << " Newton steps";
  return diverged(op, ws.lambda, DivergenceReason::newton_stalled, v, opts.max_newton, os.str());
}

}  // namespace

SolveOutcome minimal_solution(const OperatorMatrix& op, double lambda, const SolverOptions& opts,
                              const std::vector<double>* subsolution) {
  if (!is_admissible(op.boundary())) throw std::invalid_argument("boundary pair is not admissible");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be finite and >= 0");

  const std::size_t n = op.grid().size();
  const Workspace ws(op, lambda);
  const double ceiling = 1.0 - opts.ceiling_eps;
  std::vector<double> v = subsolution ? *subsolution : std::vector<double>(n, 0.0);
  if (v.size() != n) throw std::invalid_argument("warm start length mismatch");

  int mono = 0;
  double defect = 0.0;
  double prev_inc = -1.0;
  for (; mono < opts.monotone_sweeps; ++mono) {
    auto f = ws.load(v, ceiling);
    if (!f) return diverged(op, lambda, DivergenceReason::touchdown, v, mono, "monotone iterate reached the ceiling");
    auto next = op.solve(*f);
    double inc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = next[i] - v[i];
      inc = std::max(inc, std::abs(d));
      defect = std::min(defect, d);
    }
    v.swap(next);
    if (inc <= opts.tol) {
      auto fv = ws.load(v, ceiling);
      if (!fv) return diverged(op, lambda, DivergenceReason::touchdown, v, mono + 1, "converged onto the ceiling");
      const double residual = ws.fixed_point_defect(v, *fv);
      if (residual <= opts.tol) return finish_point(op, lambda, v, residual, mono + 1, 0, defect, opts);
    }
    if (prev_inc > 0 && inc > opts.stall_ratio * prev_inc) {
      ++mono;
      break;
    }
    prev_inc = inc;
  }

  int newton_its = 0;
  double residual = 0.0;
  auto result = newton(ws, v, opts, newton_its, residual);
  if (auto* d = std::get_if<DivergenceReport>(&result)) {
    d->iterations += mono;
    return *d;
  }
  return finish_point(op, lambda, std::get<std::vector<double>>(result), residual, mono, newton_its, defect, opts);
}

SolveOutcome minimal_solution(double lambda, const BoundaryPair& bp, GridPtr grid, double tol) {
  const auto op = assemble_bilaplacian(std::move(grid), bp);
  SolverOptions opts;
  opts.tol = tol;
  return minimal_solution(op, lambda, opts);
}

namespace {

std::vector<double> shifted_values(const OperatorMatrix& op, const BranchPoint& p) {
  std::vector<double> v = p.field.values;
  const auto phi = op.phi();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= phi[i];
  return v;
}

}  // namespace

BranchRun continue_branch(const OperatorMatrix& op, const std::vector<double>& lambdas, const SolverOptions& opts) {
  BranchRun run;
  const Workspace* unused = nullptr;
  (void)unused;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    const double lambda = lambdas[k];
    if (k > 0 && !(lambda > lambdas[k - 1])) throw std::invalid_argument("lambda grid must be increasing");

    std::optional<SolveOutcome> outcome;
    const auto& pts = run.points;
    if (pts.size() >= 2) {
      const auto& a = pts[pts.size() - 2];
      const auto& b = pts[pts.size() - 1];
      const auto va = shifted_values(op, a);
      const auto vb = shifted_values(op, b);
      const double t = (lambda - b.lambda) / (b.lambda - a.lambda);
      std::vector<double> guess(va.size());
      for (std::size_t i = 0; i < guess.size(); ++i) guess[i] = vb[i] + t * (vb[i] - va[i]);

      const Workspace ws(op, lambda);
      int its = 0;
      double residual = 0.0;
      auto r = newton(ws, guess, opts, its, residual);
      if (auto* v = std::get_if<std::vector<double>>(&r)) {
        auto p = finish_point(op, lambda, *v, residual, 0, its, 0.0, opts);
        // An extrapolated start may land on another branch; only keep the
        // stable (hence minimal) solution, and it must dominate the previous one.
        bool above_previous = true;
        for (std::size_t i = 0; i < vb.size(); ++i) {
          if ((*v)[i] < vb[i] - opts.tol) above_previous = false;
        }
        if ((!opts.compute_mu1 || p.mu1 > 0.0) && above_previous) outcome = std::move(p);
      }
    }
    if (!outcome) {
      if (pts.empty()) {
        outcome = minimal_solution(op, lambda, opts);
      } else {
        const auto prev = shifted_values(op, pts.back());
        outcome = minimal_solution(op, lambda, opts, &prev);
      }
    }
    if (auto* d = std::get_if<DivergenceReport>(&*outcome)) {
      run.truncated_at = *d;
      break;
    }
    run.points.push_back(std::get<BranchPoint>(std::move(*outcome)));
  }
  return run;
}

PullInEstimate pull_in_voltage(const OperatorMatrix& op, double rel_width, const SolverOptions& opts) {
  if (!is_admissible(op.boundary())) throw std::invalid_argument("boundary pair is not admissible");
  if (!(rel_width > 0.0)) throw std::invalid_argument("bracket width must be positive");
  const Dimension n = op.grid().dimension();

  PullInEstimate pie;
  pie.grid_nodes = op.grid().size();
  pie.grid_gamma = op.grid().gamma();
  pie.analytic_lower = std::max(classical_lower_bound(n), lambda_bar(n));
  pie.nu1 = nu1(op).value;
  pie.analytic_upper = 4.0 * pie.nu1 / 27.0;

  SolverOptions quiet = opts;
  quiet.compute_mu1 = false;

  double lo = 0.0;
  std::vector<double> v_lo(op.grid().size(), 0.0);
  BranchPoint best;
  best.lambda = 0.0;
  best.field = {op.grid_ptr(), std::vector<double>(op.phi().begin(), op.phi().end())};

  auto try_lambda = [&](double lambda) -> bool {
    auto out = minimal_solution(op, lambda, quiet, &v_lo);
    if (auto* p = std::get_if<BranchPoint>(&out)) {
      lo = lambda;
      best = *p;
      v_lo = shifted_values(op, *p);
      return true;
    }
    return false;
  };

  // Seed the bracket: the upper analytic bound (inflated) must fail.
  double hi = std::max(pie.analytic_upper, 1.0);
  for (int k = 0; k < 40 && try_lambda(hi); ++k) hi *= 1.5;
  const double seed = 0.5 * to_double(pie.analytic_lower);
  if (seed > 0 && seed < hi) try_lambda(seed);

  while (hi - lo > rel_width * hi) {
    const double mid = 0.5 * (lo + hi);
    if (!try_lambda(mid)) hi = mid;
  }

  // Oracle cross-check from a cold start just outside the bracket. Closer
  // than ~1e-6 to the fold a cold solve is too stiff to say anything.
  auto cold_ok = [&](double lambda) { return converged(minimal_solution(op, lambda, quiet)); };
  const double margin = std::max(rel_width, 1e-6);
  if (lo > 0 && (!cold_ok(lo * (1.0 - margin)) || cold_ok(hi * (1.0 + margin)))) {
    pie.ambiguous = true;
    lo *= 1.0 - 10.0 * margin;
    hi *= 1.0 + 10.0 * margin;
    v_lo.assign(op.grid().size(), 0.0);
    auto out = minimal_solution(op, lo, quiet);
    if (auto* p = std::get_if<BranchPoint>(&out)) best = *p;
  }

  pie.lambda_lo = lo;
  pie.lambda_hi = hi;
  pie.consistent = Rational(from_double(lo)) >= pie.analytic_lower && hi <= pie.analytic_upper;

  if (opts.compute_mu1 && lo > 0) {
    const auto weight = stability_weight(op, lo, best.field.values);
    best.mu1 = smallest_weighted_eigenvalue(op, weight).value;
  } else if (lo == 0) {
    best.mu1 = pie.nu1;
  }
  pie.near_fold = std::move(best);
  return pie;
}

bool DiagnosticsReport::stability_inequality_holds() const {
  return std::all_of(points.begin(), points.end(), [](const PointDiagnostics& p) { return p.stability_holds; });
}

bool DiagnosticsReport::barrier_holds() const {
  return std::all_of(points.begin(), points.end(), [](const PointDiagnostics& p) { return p.below_barrier; });
}

DiagnosticsReport extremal_diagnostics(const OperatorMatrix& op, const std::vector<BranchPoint>& branch,
                                       const PullInEstimate* pie, const DiagnosticsOptions& opts) {
  if (branch.empty()) throw std::invalid_argument("diagnostics need a nonempty branch");
  const auto& g = op.grid();
  const int N = g.dimension().value();
  const auto w = op.weights();
  const auto phi = op.phi();

  DiagnosticsReport rep;
  rep.quadrature_rel_tol = opts.quadrature_rel_tol;
  rep.barrier_checked = N >= 9;
  for (const auto& p : branch) {
    rep.max_energy_h2 = std::max(rep.max_energy_h2, p.energy_h2);
    rep.max_energy_cubed = std::max(rep.max_energy_cubed, p.energy_cubed);
    if (!std::isfinite(p.energy_h2) || !std::isfinite(p.energy_cubed)) rep.energies_finite = false;

    PointDiagnostics d;
    d.lambda = p.lambda;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double gap = 1.0 - p.field.values[i];
      const double v = p.field.values[i] - phi[i];
      d.stability_lhs += 2.0 * w[i] * v * v / (gap * gap * gap);
      d.stability_rhs += w[i] * v / (gap * gap);
    }
    d.stability_holds = d.stability_lhs <= d.stability_rhs * (1.0 + opts.quadrature_rel_tol) + 1e-300;

    if (rep.barrier_checked) {
      d.barrier_excess = -1e300;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double barrier = 1.0 - std::pow(g.node(i), 4.0 / 3.0);
        d.barrier_excess = std::max(d.barrier_excess, p.field.values[i] - barrier);
      }
      d.below_barrier = d.barrier_excess <= opts.barrier_slack;
    }
    rep.points.push_back(d);
  }

  if (pie && N >= 9 && pie->lambda_hi > 0) {
    TouchdownCheck t;
    t.c0 = c0_constant(from_double(pie->lambda_hi), g.dimension());
    t.slack = opts.touchdown_slack;
    const double c0 = to_double(t.c0);
    const auto& last = branch.back();
    t.min_margin = 1e300;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double lower = 1.0 - c0 * std::pow(g.node(i), 4.0 / 3.0);
      t.min_margin = std::min(t.min_margin, last.field.values[i] - lower);
    }
    t.holds = t.min_margin >= -t.slack;
    rep.touchdown = t;
  }
  return rep;
}

VerdictReport regularity_verdict(const std::vector<PullInEstimate>& refinements, Dimension n,
                                 const VerdictOptions& opts) {
  if (refinements.empty()) throw std::invalid_argument("verdict needs at least one grid");
  VerdictReport rep;
  rep.known = known_regime(n);
  for (const auto& r : refinements) rep.near_fold_max.push_back(r.near_fold.max_value);

  const auto& m = rep.near_fold_max;
  const double ceiling = 1.0 - opts.delta_reg;
  const bool bounded = std::all_of(m.begin(), m.end(), [&](double x) { return x <= ceiling; });
  // Approaching 1 means the gap 1 - max shrinks by a fixed factor on every
  // refinement; a mesh-converged plateau below 1 does not qualify.
  bool rising = m.size() > 1;
  for (std::size_t k = 1; k < m.size(); ++k) rising = rising && (1.0 - m[k]) <= opts.gap_contraction * (1.0 - m[k - 1]);
  // Once the gap is below the touchdown floor it is set by the bracket and
  // solver resolution, not the mesh; accept it if it does not drift back.
  bool pinned = m.size() > 1;
  for (std::size_t k = 0; k < m.size(); ++k) {
    pinned = pinned && 1.0 - m[k] <= opts.touchdown_gap && (k == 0 || m[k] >= m[k - 1] - opts.touchdown_gap / 10);
  }
  const bool touches = m.back() > ceiling && (rising || pinned);

  const double hardy_half = to_double(hardy_constant(n)) / 2.0;
  rep.below_hardy_half = n.value() >= 9 && refinements.back().lambda_hi <= hardy_half;

  std::ostringstream os;
  os << "near-fold max over " << m.size() << " grid(s):";
  for (double x : m) os << " " << x;
  if (bounded) {
    rep.verdict = Verdict::regular_consistent;
    os << "; stays <= 1 - " << opts.delta_reg;
  } else if (touches && (n.value() < 9 || rep.below_hardy_half)) {
    rep.verdict = Verdict::singular_consistent;
    os << "; approaches 1 under refinement";
    if (n.value() >= 9) os << " and lambda*_hi <= H_N/2";
  } else {
    rep.verdict = Verdict::inconclusive;
    if (touches) os << "; approaches 1 but lambda*_hi > H_N/2";
  }
  rep.regime_confirmed = (rep.verdict == Verdict::regular_consistent && rep.known == KnownRegime::regular) ||
                        (rep.verdict == Verdict::singular_consistent && rep.known == KnownRegime::singular);
  if (rep.known == KnownRegime::open) os << "; no established regime in this dimension";
  rep.detail = os.str();
  return rep;
}

VerdictReport regularity_verdict(const PullInEstimate& pie, const BranchPoint& near_fold, Dimension n,
                                 const VerdictOptions& opts) {
  PullInEstimate copy = pie;
  copy.near_fold = near_fold;
  return regularity_verdict(std::vector<PullInEstimate>{copy}, n, opts);
}

}  // namespace mems4
